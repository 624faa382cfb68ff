#include "nafree/projgeom.hpp"

#include <algorithm>
#include <sstream>

namespace nafree {

bool ProjPoint::exact() const {
  return std::all_of(coords.begin(), coords.end(), [](const Laurent& x) { return x.exact(); });
}

bool ProjPoint::identical(const ProjPoint& other) const {
  if (coords.size() != other.coords.size()) return false;
  for (std::size_t i = 0; i < coords.size(); ++i)
    if (!coords[i].identical(other.coords[i])) return false;
  return true;
}

bool ProjLine::identical(const ProjLine& other) const {
  if (dual.size() != other.dual.size()) return false;
  for (std::size_t i = 0; i < dual.size(); ++i)
    if (!dual[i].identical(other.dual[i])) return false;
  return true;
}

Vec cross(const Vec& a, const Vec& b) {
  if (a.size() != 3 || b.size() != 3) throw InvalidArgument("cross product needs 3-vectors");
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

Laurent dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw InvalidArgument("dot product length mismatch");
  Laurent s(a.front().q());
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

namespace {

Vec normalize_coords(const Vec& raw) {
  if (raw.empty()) throw InvalidArgument("empty coordinate vector");
  std::int64_t best = kInfinity;
  std::int64_t undecided_floor = kInfinity;
  std::size_t pivot = raw.size();
  bool any_inexact = false;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const Valuation v = raw[i].valuation();
    if (v.infinite()) continue;
    if (v.undecidable()) {
      any_inexact = true;
      undecided_floor = std::min(undecided_floor, v.value);
      continue;
    }
    if (v.value <= best) {
      best = v.value;
      pivot = i;
    }
  }
  if (pivot == raw.size()) {
    if (any_inexact) throw InsufficientPrecision("no coordinate has a known nonzero leading digit");
    throw AllCoordinatesVanish("all coordinates vanish");
  }
  if (undecided_floor <= best) throw InsufficientPrecision("minimal coordinate valuation is undecidable");
  const std::uint32_t q = raw[pivot].q();
  Vec out;
  out.reserve(raw.size());
  const Laurent& p = raw[pivot];
  if (p.exact() && p.digits().size() == 1) {
    const std::uint32_t scale = residue::inv(p.lead_digit(), q);
    for (const auto& x : raw) out.push_back(x.shifted(-best).scaled(scale));
    return out;
  }
  std::int64_t target = kNormalizePrecision - best;
  if (!p.exact()) target = std::min(target, p.known_to() - 2 * best);
  const Laurent pinv = inv(p, target);
  for (std::size_t i = 0; i < raw.size(); ++i) out.push_back(i == pivot ? Laurent::one(q) : raw[i] * pinv);
  return out;
}

}  // namespace

ProjPoint normalize_point(const Vec& raw) {
  if (raw.size() != 3) throw InvalidArgument("projective points have three coordinates");
  return ProjPoint{normalize_coords(raw)};
}

ProjLine normalize_line(const Vec& raw_dual) {
  if (raw_dual.size() != 3) throw InvalidArgument("projective lines have three dual coordinates");
  try {
    return ProjLine{normalize_coords(raw_dual)};
  } catch (const AllCoordinatesVanish&) {
    throw EqualPoints("line through coincident points is undefined");
  }
}

ProjPoint point_from_affine(const Laurent& x, const Laurent& y) {
  return normalize_point({x, y, Laurent::one(x.q())});
}

ProjLine line_through(const ProjPoint& x, const ProjPoint& y) { return normalize_line(cross(x.coords, y.coords)); }

ProjLine line_with_slope(const ProjPoint& x, const Laurent& slope) {
  const std::uint32_t q = slope.q();
  return normalize_line(cross(x.coords, {Laurent::one(q), slope, Laurent(q)}));
}

Tri incident(const ProjPoint& x, const ProjLine& line) {
  const Laurent p = dot(x.coords, line.dual);
  if (p.has_digits()) return Tri::False;
  return Tri::True;
}

namespace {

Slope slope_from_dual(const Vec& m, std::int64_t relative) {
  Slope s;
  s.value = Laurent(m[0].q());
  if (m[1].is_exact_zero()) {
    s.infinite = true;
    return s;
  }
  if (!m[1].has_digits()) throw InsufficientPrecision("slope denominator is undecidable");
  s.value = divide(-m[0], m[1], relative);
  return s;
}

}  // namespace

Slope slope_between(const ProjPoint& x, const ProjPoint& y, std::int64_t relative_precision) {
  for (const ProjPoint* p : {&x, &y})
    if (!p->coords[2].has_digits()) throw OutsideChart("point " + to_string(*p) + " is not in the chart Z != 0");
  const Vec m = cross(x.coords, y.coords);
  if (std::none_of(m.begin(), m.end(), [](const Laurent& c) { return c.has_digits(); }))
    throw EqualPoints("slope between coincident points");
  return slope_from_dual(m, relative_precision);
}

Slope slope_of(const ProjLine& line, std::int64_t relative_precision) {
  return slope_from_dual(line.dual, relative_precision);
}

Tri ratio_in(const Laurent& num, const Laurent& den, Region target) {
  const std::uint32_t q = num.q();
  if (den.is_exact_zero()) return Tri::False;
  const bool unit_target = target == Region::OnePlusPiM;
  if (!unit_target && target != Region::PiPlusPiM) throw InvalidArgument("ratio_in supports 1+um and u+um only");
  const std::int64_t k = unit_target ? 0 : 1;
  if (den.has_digits()) {
    const std::int64_t d = den.lead_val();
    const Laurent c = unit_target ? den : den.shifted(1);
    const Laurent e = num - c;
    if (e.val_lower_bound() >= d + 2) return Tri::True;
    if (e.has_digits()) return Tri::False;
    return Tri::Unknown;
  }
  // den is only known to have valuation >= D
  const std::int64_t floor = den.val_lower_bound();
  if (num.has_digits() && num.lead_val() < floor + k) return Tri::False;
  (void)q;
  return Tri::Unknown;
}

Tri in_U(const Vec& w) {
  const Tri x = ratio_in(w[0], w[2], Region::OnePlusPiM);
  if (x == Tri::False) return Tri::False;
  return x && ratio_in(w[1], w[2], Region::OnePlusPiM);
}

Tri in_V(const Vec& base, const Vec& w) {
  const Tri u = in_U(w);
  if (u == Tri::True) return Tri::True;
  const Vec m = cross(base, w);
  return u || ratio_in(-m[0], m[1], Region::PiPlusPiM);
}

Tri in_W(const Flag& flag) {
  const Tri u = in_U(flag.point.coords);
  if (u == Tri::False) return Tri::False;
  return u && ratio_in(-flag.line.dual[0], flag.line.dual[1], Region::PiPlusPiM);
}

Tri region_membership(const ProjPoint& point, RegionKind region, const ProjPoint* base) {
  switch (region) {
    case RegionKind::U: return in_U(point.coords);
    case RegionKind::V:
      if (base == nullptr) throw InvalidArgument("V_x needs a base point");
      if (in_U(base->coords) != Tri::True) throw InvalidArgument("V_x is defined only for base points in U");
      return in_V(base->coords, point.coords);
    case RegionKind::W: throw InvalidArgument("W is a set of flags");
  }
  return Tri::Unknown;
}

Tri region_membership(const Flag& flag, RegionKind region) {
  if (region != RegionKind::W) throw InvalidArgument("flags only belong to W");
  return in_W(flag);
}

// ---------------------------------------------------------------------------
// Residue balls

namespace {

std::uint64_t ipow(std::uint64_t base, std::int64_t e) {
  std::uint64_t r = 1;
  for (std::int64_t i = 0; i < e; ++i) r *= base;
  return r;
}

// Writes `value` as `count` base-q digits into out[offset..offset+count), most
// significant first.
void spell(std::uint64_t value, std::uint32_t q, std::vector<Digit>& out, std::size_t offset, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) {
    out[offset + count - 1 - i] = static_cast<Digit>(value % q);
    value /= q;
  }
}

std::size_t pivot_of(const ResidueBall& ball) {
  if (ball.digits[2][0] != 0) return 2;
  if (ball.digits[1][0] != 0) return 1;
  return 0;
}

}  // namespace

Vec ResidueBall::abstract_vector() const {
  const std::size_t pivot = pivot_of(*this);
  Vec v;
  for (std::size_t i = 0; i < 3; ++i) {
    if (i == pivot)
      v.push_back(Laurent::one(q));
    else
      v.push_back(Laurent::from_digits(q, 0, digits[i], level));
  }
  return v;
}

Vec ResidueBall::representative() const {
  Vec v;
  for (std::size_t i = 0; i < 3; ++i) v.push_back(Laurent::from_digits(q, 0, digits[i]));
  return v;
}

std::uint64_t ball_count(std::uint32_t q, std::int64_t level) {
  if (level < 1) throw InvalidArgument("ball level must be >= 1");
  return ipow(q, 2 * (level - 1)) * (std::uint64_t{q} * q + q + 1);
}

ResidueBall ball_at(std::uint32_t q, std::int64_t level, std::uint64_t index) {
  const auto m = static_cast<std::size_t>(level);
  const std::uint64_t full = ipow(q, level);
  const std::uint64_t tail = ipow(q, level - 1);
  ResidueBall b;
  b.level = level;
  b.q = q;
  for (auto& d : b.digits) d.assign(m, 0);
  const std::uint64_t n_z = full * full;
  const std::uint64_t n_y = full * tail;
  if (index < n_z) {
    spell(index / full, q, b.digits[0], 0, m);
    spell(index % full, q, b.digits[1], 0, m);
    b.digits[2][0] = 1;
    return b;
  }
  index -= n_z;
  if (index < n_y) {
    spell(index / tail, q, b.digits[0], 0, m);
    b.digits[1][0] = 1;
    spell(index % tail, q, b.digits[2], 1, m - 1);
    return b;
  }
  index -= n_y;
  if (index >= tail * tail) throw InvalidArgument("ball index out of range");
  b.digits[0][0] = 1;
  spell(index / tail, q, b.digits[1], 1, m - 1);
  spell(index % tail, q, b.digits[2], 1, m - 1);
  return b;
}

std::vector<ResidueBall> enumerate_balls(std::uint32_t q, std::int64_t level) {
  const std::uint64_t n = ball_count(q, level);
  std::vector<ResidueBall> out;
  out.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) out.push_back(ball_at(q, level, i));
  return out;
}

ResidueBall ball_of(const Vec& v, std::int64_t level) {
  const ProjPoint p = normalize_point(v);
  std::size_t pivot = 3;
  for (std::size_t i : {2u, 1u, 0u}) {
    const Valuation val = p.coords[i].valuation();
    if (val.finite() && val.value == 0) {
      pivot = i;
      break;
    }
  }
  if (pivot == 3) throw InsufficientPrecision("cannot locate a unit coordinate");
  const std::uint32_t q = p.q();
  const Laurent scale = inv(p.coords[pivot], level);
  ResidueBall b;
  b.level = level;
  b.q = q;
  for (std::size_t i = 0; i < 3; ++i) {
    b.digits[i].assign(static_cast<std::size_t>(level), 0);
    if (i == pivot) {
      b.digits[i][0] = 1;
      continue;
    }
    const Laurent c = p.coords[i] * scale;
    for (std::int64_t e = 0; e < level; ++e) {
      const auto d = c.digit_at(e);
      if (!d) throw InsufficientPrecision("point not known to level " + std::to_string(level));
      b.digits[i][static_cast<std::size_t>(e)] = *d;
    }
  }
  return b;
}

ImageBall image_ball(const Matrix& g, const ResidueBall& ball) {
  ImageBall out{normalize_point(mat_apply(g, ball.representative())), 0};
  out.guaranteed_level = ball.level - cartan_projection(g).spread();
  return out;
}

std::string to_string(const ResidueBall& ball) {
  std::string out = std::to_string(ball.level) + ":";
  for (std::size_t i = 0; i < 3; ++i) {
    if (i > 0) out += "/";
    for (std::size_t k = 0; k < ball.digits[i].size(); ++k) {
      if (ball.q <= 10) {
        out += static_cast<char>('0' + ball.digits[i][k]);
      } else {
        if (k > 0) out += ".";
        out += std::to_string(ball.digits[i][k]);
      }
    }
  }
  return out;
}

ResidueBall parse_ball(const std::string& text, std::uint32_t q) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ParseError("ball needs 'M:'", 0);
  ResidueBall b;
  b.q = q;
  try {
    b.level = std::stoll(text.substr(0, colon));
  } catch (const std::exception&) {
    throw ParseError("bad ball level", 0);
  }
  if (b.level < 1) throw ParseError("ball level must be >= 1", 0);
  std::size_t pos = colon + 1;
  for (std::size_t i = 0; i < 3; ++i) {
    std::size_t end = text.find('/', pos);
    if (end == std::string::npos) end = text.size();
    const std::string part = text.substr(pos, end - pos);
    std::vector<Digit> digits;
    if (q <= 10) {
      for (std::size_t k = 0; k < part.size(); ++k) {
        const int d = part[k] - '0';
        if (d < 0 || d >= static_cast<int>(q)) throw DigitOutOfRange("ball digit out of range", pos + k);
        digits.push_back(static_cast<Digit>(d));
      }
    } else {
      std::stringstream ss(part);
      std::string item;
      while (std::getline(ss, item, '.')) {
        const int d = std::stoi(item);
        if (d < 0 || d >= static_cast<int>(q)) throw DigitOutOfRange("ball digit out of range", pos);
        digits.push_back(static_cast<Digit>(d));
      }
    }
    if (static_cast<std::int64_t>(digits.size()) != b.level) throw ParseError("ball prefix has wrong length", pos);
    b.digits[i] = std::move(digits);
    pos = end + 1;
  }
  // Must be canonically normalized.
  const std::size_t pivot = pivot_of(b);
  if (b.digits[pivot][0] != 1 || std::any_of(b.digits[pivot].begin() + 1, b.digits[pivot].end(), [](Digit d) { return d != 0; }))
    throw ParseError("ball is not canonically normalized", 0);
  return b;
}

std::string to_string(const ProjPoint& p) { return to_string(p.coords); }

std::string to_string(const ProjLine& l) {
  std::string out = "<";
  for (std::size_t i = 0; i < l.dual.size(); ++i) {
    if (i > 0) out += " : ";
    out += to_string(l.dual[i]);
  }
  return out + ">";
}

}  // namespace nafree
