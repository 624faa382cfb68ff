#pragma once

// The projective plane P(k^3): canonical point and line representatives, the
// affine chart {Z != 0}, slopes, the regions U, V_x, W, and the partition of
// P(k^3) into residue balls (points of the projective plane over O/u^M).
//
// Region predicates accept homogeneous vectors whose coordinates may be
// inexact. An inexact vector stands for every point it could be, so a True or
// False answer holds for that whole set and Unknown means it straddles.

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nafree/linalg.hpp"

namespace nafree {

/// Prefix depth (in digits) at which the regions are defined, as in val(x - 1) >= 2.
inline constexpr std::int64_t kDecidingDepth = 2;

/// Digits kept when normalizing by a pivot that is not a monomial.
inline constexpr std::int64_t kNormalizePrecision = 32;

/// Point of P(k^3), normalized: minimum coordinate valuation 0 and the last
/// coordinate of that valuation (priority Z, Y, X, as for residue balls) is
/// exactly 1; the vector is divided by it.
struct ProjPoint {
  Vec coords;

  std::uint32_t q() const { return coords.front().q(); }
  bool exact() const;
  bool identical(const ProjPoint& other) const;
};

/// Line of P(k^3) by its dual coordinates (a, b, c): aX + bY + cZ = 0.
struct ProjLine {
  Vec dual;

  bool identical(const ProjLine& other) const;
};

struct Flag {
  ProjPoint point;
  ProjLine line;
};

Vec cross(const Vec& a, const Vec& b);
Laurent dot(const Vec& a, const Vec& b);

ProjPoint normalize_point(const Vec& raw);
ProjLine normalize_line(const Vec& raw_dual);
ProjPoint point_from_affine(const Laurent& x, const Laurent& y);
ProjLine line_through(const ProjPoint& x, const ProjPoint& y);
/// Line through x with affine slope s (finite).
ProjLine line_with_slope(const ProjPoint& x, const Laurent& slope);

/// Pairing vanishes at the working precision.
Tri incident(const ProjPoint& x, const ProjLine& line);

/// Affine slope in the chart; `infinite` marks a vertical line.
struct Slope {
  bool infinite = false;
  Laurent value;
};

/// Slope of the line joining two chart points.
/// Throws OutsideChart if either point has Z = 0 and EqualPoints if they coincide.
Slope slope_between(const ProjPoint& x, const ProjPoint& y, std::int64_t relative_precision = 32);
/// Slope of a line from its dual coordinates: -a/b.
Slope slope_of(const ProjLine& line, std::int64_t relative_precision = 32);

/// num/den in c + u m, where c = 1 (unit_target) or c = u. False when den = 0.
Tri ratio_in(const Laurent& num, const Laurent& den, Region target);

// Region predicates on homogeneous (possibly inexact) vectors.
Tri in_U(const Vec& w);
/// w in V_x: in U, or on a line through x whose slope is in u + u m. Points
/// outside the chart are handled through the same homogeneous slope formula.
Tri in_V(const Vec& base, const Vec& w);
Tri in_W(const Flag& flag);

enum class RegionKind : std::uint8_t { U, V, W };
/// Dispatcher over the three regions. `base` is required for V and must lie in U.
Tri region_membership(const ProjPoint& point, RegionKind region, const ProjPoint* base = nullptr);
Tri region_membership(const Flag& flag, RegionKind region);

/// A point of the projective plane over O/u^M. The first unit coordinate in
/// the priority order Z, Y, X is 1; the coordinates before it are non-units.
struct ResidueBall {
  std::int64_t level = 1;
  std::uint32_t q = 2;
  std::array<std::vector<Digit>, 3> digits;  // X, Y, Z prefixes of length level

  /// Homogeneous vector standing for every point of the ball: the pivot is an
  /// exact 1, the other coordinates are known modulo u^level.
  Vec abstract_vector() const;
  /// An exact representative (digit prefixes read as polynomials).
  Vec representative() const;
  friend bool operator==(const ResidueBall&, const ResidueBall&) = default;
};

std::uint64_t ball_count(std::uint32_t q, std::int64_t level);
/// The index-th ball in the canonical order.
ResidueBall ball_at(std::uint32_t q, std::int64_t level, std::uint64_t index);
std::vector<ResidueBall> enumerate_balls(std::uint32_t q, std::int64_t level);
/// The level-M ball containing the point with coordinates v (v must not vanish).
ResidueBall ball_of(const Vec& v, std::int64_t level);

struct ImageBall {
  ProjPoint center;
  std::int64_t guaranteed_level;  // <= 0 means no guarantee
};

/// g(ball) lies inside the level-guaranteed_level ball around g(representative).
ImageBall image_ball(const Matrix& g, const ResidueBall& ball);

// "M:<X digits>/<Y digits>/<Z digits>", digits as characters for q <= 10 and
// dot-separated integers otherwise.
std::string to_string(const ResidueBall& ball);
ResidueBall parse_ball(const std::string& text, std::uint32_t q);
std::string to_string(const ProjPoint& p);
std::string to_string(const ProjLine& l);

}  // namespace nafree
