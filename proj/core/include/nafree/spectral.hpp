#pragma once

// Newton polygons, the regularity test, Hensel lifting of simple roots, and
// eigenvectors/flags of regular elements of SL_3(k).

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <boost/rational.hpp>

#include "nafree/linalg.hpp"
#include "nafree/projgeom.hpp"

namespace nafree {

using Rational = boost::rational<std::int64_t>;

/// Edge of the lower convex hull of {(i, val c_i)}.
struct NewtonSegment {
  std::int64_t start = 0;  // coefficient index
  std::int64_t end = 0;
  std::int64_t start_val = 0;
  std::int64_t end_val = 0;

  std::int64_t length() const { return end - start; }
  /// Geometric slope (end_val - start_val) / length. Roots on this segment have
  /// valuation equal to minus the slope.
  Rational slope() const { return Rational(end_val - start_val, length()); }
  Rational root_valuation() const { return -slope(); }
};

struct NewtonPolygon {
  std::vector<std::pair<std::int64_t, std::int64_t>> vertices;
  std::vector<NewtonSegment> segments;

  /// Slopes with multiplicity (one entry per unit of horizontal length).
  std::vector<Rational> slopes() const;
  std::vector<Rational> root_valuations() const;
};

NewtonPolygon newton_polygon(const Poly& f);

/// Diagonalizable over k with eigenvalues of pairwise distinct absolute value:
/// the Newton polygon of the characteristic polynomial has only length-1 edges.
bool regularity_test(const Matrix& h);

/// Root of f on a length-1 segment with f(root) = 0 mod u^target_precision,
/// found by Newton iteration (correct digits double each step). The returned
/// element carries the precision to which it is certified to agree with the
/// true root, or is exact when f vanishes on it exactly.
Laurent hensel_lift_root(const Poly& f, const NewtonSegment& segment, std::int64_t target_precision);

struct EigenSystem {
  std::vector<Laurent> eigenvalues;  // increasing valuation
  std::vector<ProjPoint> eigenvectors;
  Flag attracting;
  Flag repelling;
  std::int64_t precision = 0;  // relative digits requested for each eigenvalue
};

/// 2 * (mu_1 - mu_3) + 16.
std::int64_t default_eigen_precision(const Matrix& h);

/// Eigenvalues, normalized eigenvectors and the attracting/repelling flags of
/// a regular 3x3 matrix. Throws InvalidArgument if h is not regular.
EigenSystem eigen_flags(const Matrix& h, std::optional<std::int64_t> precision = std::nullopt);

}  // namespace nafree
