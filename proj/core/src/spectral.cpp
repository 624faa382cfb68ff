#include "nafree/spectral.hpp"

#include <algorithm>

namespace nafree {

namespace {

struct Pt {
  std::int64_t x;
  std::int64_t y;
};

// (a - o) x (b - o); positive for a counter-clockwise turn.
std::int64_t turn(const Pt& o, const Pt& a, const Pt& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

std::int64_t ceil_of(const Rational& r) {
  const std::int64_t n = r.numerator();
  const std::int64_t d = r.denominator();
  std::int64_t fl = n / d;
  if (n % d != 0 && ((n < 0) == (d < 0))) ++fl;
  return fl;
}

}  // namespace

std::vector<Rational> NewtonPolygon::slopes() const {
  std::vector<Rational> out;
  for (const auto& s : segments)
    for (std::int64_t k = 0; k < s.length(); ++k) out.push_back(s.slope());
  return out;
}

std::vector<Rational> NewtonPolygon::root_valuations() const {
  std::vector<Rational> out;
  for (const auto& s : segments)
    for (std::int64_t k = 0; k < s.length(); ++k) out.push_back(s.root_valuation());
  return out;
}

NewtonPolygon newton_polygon(const Poly& f) {
  std::vector<Pt> points;
  std::vector<Pt> floors;  // coefficients known only as "valuation >= y"
  for (std::size_t i = 0; i < f.coeffs.size(); ++i) {
    const Valuation v = f.coeffs[i].valuation();
    if (v.infinite()) continue;
    if (v.undecidable())
      floors.push_back({static_cast<std::int64_t>(i), v.value});
    else
      points.push_back({static_cast<std::int64_t>(i), v.value});
  }
  if (points.empty()) throw InsufficientPrecision("no coefficient has a decided valuation");

  std::vector<Pt> hull;
  for (const auto& p : points) {
    while (hull.size() >= 2 && turn(hull[hull.size() - 2], hull.back(), p) <= 0) hull.pop_back();
    hull.push_back(p);
  }

  // An undecided coefficient is harmless only if it lies strictly above the hull.
  for (const auto& fl : floors) {
    if (fl.x < hull.front().x || fl.x > hull.back().x)
      throw InsufficientPrecision("undecided coefficient at the end of the polygon");
    for (std::size_t k = 0; k + 1 < hull.size(); ++k) {
      const Pt& a = hull[k];
      const Pt& b = hull[k + 1];
      if (fl.x < a.x || fl.x > b.x) continue;
      // fl.y > a.y + (b.y - a.y)(fl.x - a.x)/(b.x - a.x)
      if (fl.y * (b.x - a.x) <= a.y * (b.x - a.x) + (b.y - a.y) * (fl.x - a.x))
        throw InsufficientPrecision("undecided coefficient may touch the Newton polygon");
      break;
    }
  }

  NewtonPolygon poly;
  for (const auto& p : hull) poly.vertices.emplace_back(p.x, p.y);
  for (std::size_t k = 0; k + 1 < hull.size(); ++k)
    poly.segments.push_back({hull[k].x, hull[k + 1].x, hull[k].y, hull[k + 1].y});
  return poly;
}

bool regularity_test(const Matrix& h) {
  const Poly f = char_poly(h);
  const NewtonPolygon poly = newton_polygon(f);
  if (poly.vertices.front().first != 0) return false;  // zero eigenvalue
  if (static_cast<std::size_t>(poly.vertices.back().first) != f.degree()) return false;
  return std::all_of(poly.segments.begin(), poly.segments.end(),
                     [](const NewtonSegment& s) { return s.length() == 1; });
}

Laurent hensel_lift_root(const Poly& f, const NewtonSegment& segment, std::int64_t target_precision) {
  if (segment.length() != 1)
    throw NotSimpleSegment("segment of length " + std::to_string(segment.length()) + " has no simple root");
  const std::uint32_t q = f.coeffs.front().q();
  const auto i = static_cast<std::size_t>(segment.start);
  const std::int64_t r = segment.start_val - segment.end_val;

  // val g(root) for f = (X - root) g: sum over the other roots of min(r, r_j).
  Rational other(0);
  bool skipped = false;
  for (const auto& rv : newton_polygon(f).root_valuations()) {
    if (!skipped && rv == Rational(r)) {
      skipped = true;
      continue;
    }
    other += std::min(Rational(r), rv);
  }

  const std::uint32_t lead =
      residue::mul(q - f.coeffs[i].lead_digit(), residue::inv(f.coeffs[i + 1].lead_digit(), q), q);
  Laurent root = Laurent::monomial(q, lead, r);
  const Poly df = f.derivative();
  std::int64_t rho = 1;
  Laurent value = f(root);
  for (int iter = 0; iter < 64; ++iter) {
    if (value.is_exact_zero()) return root;
    if (value.val_lower_bound() >= target_precision) break;
    if (!value.has_digits())
      throw InsufficientPrecision("polynomial coefficients cannot support precision " +
                                  std::to_string(target_precision));
    const Laurent slope = df(root);
    if (!slope.has_digits()) throw InsufficientPrecision("derivative at the approximate root is undecidable");
    rho *= 2;
    const Laurent step = divide(value, slope, rho + 2);
    Laurent next = root - step;
    root = next.truncated_exact(std::min(r + rho, next.known_to()));
    value = f(root);
  }
  if (value.val_lower_bound() < target_precision)
    throw InsufficientPrecision("Hensel iteration did not reach the target precision");
  if (value.is_exact_zero()) return root;
  return root.truncated(ceil_of(Rational(value.val_lower_bound()) - other));
}

std::int64_t default_eigen_precision(const Matrix& h) { return 2 * cartan_projection(h).spread() + 16; }

namespace {

// Kernel of the rank-2 matrix b from the adjugate column of largest norm.
ProjPoint kernel_vector(const Matrix& b) {
  const Matrix adj = adjugate(b);
  std::size_t best_col = adj.dim();
  std::int64_t best = kInfinity;
  for (std::size_t j = 0; j < adj.dim(); ++j) {
    std::int64_t decided = kInfinity;
    std::int64_t floor = kInfinity;
    for (std::size_t i = 0; i < adj.dim(); ++i) {
      const Valuation v = adj(i, j).valuation();
      if (v.finite())
        decided = std::min(decided, v.value);
      else if (v.undecidable())
        floor = std::min(floor, v.value);
    }
    if (decided < floor && decided < best) {
      best = decided;
      best_col = j;
    }
  }
  if (best_col == adj.dim()) throw InsufficientPrecision("eigenvector pivot is undecidable");
  return normalize_point(adj.column(best_col));
}

}  // namespace

EigenSystem eigen_flags(const Matrix& h, std::optional<std::int64_t> precision) {
  if (h.dim() != 3) throw InvalidArgument("eigen flags are defined for 3x3 matrices");
  const std::uint32_t q = h.q();
  const Poly f = char_poly(h);
  const NewtonPolygon poly = newton_polygon(f);
  if (!regularity_test(h)) throw InvalidArgument("matrix is not regular");

  EigenSystem sys;
  sys.precision = precision.value_or(default_eigen_precision(h));
  std::vector<NewtonSegment> segs = poly.segments;
  std::sort(segs.begin(), segs.end(), [](const NewtonSegment& a, const NewtonSegment& b) {
    return a.root_valuation() < b.root_valuation();
  });
  std::vector<std::int64_t> vals;
  for (const auto& s : segs) vals.push_back(boost::rational_cast<std::int64_t>(s.root_valuation()));

  for (std::size_t k = 0; k < segs.size(); ++k) {
    std::int64_t other = 0;
    for (std::size_t j = 0; j < vals.size(); ++j)
      if (j != k) other += std::min(vals[k], vals[j]);
    const Laurent lambda = hensel_lift_root(f, segs[k], vals[k] + sys.precision + other);
    sys.eigenvalues.push_back(lambda);
    const Matrix b = h - Matrix::identity(q, 3).scaled(lambda);
    sys.eigenvectors.push_back(kernel_vector(b));
  }
  const auto& v = sys.eigenvectors;
  sys.attracting = Flag{v[0], normalize_line(cross(v[0].coords, v[1].coords))};
  sys.repelling = Flag{v[2], normalize_line(cross(v[2].coords, v[1].coords))};
  return sys;
}

}  // namespace nafree
