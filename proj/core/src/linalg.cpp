#include "nafree/linalg.hpp"

#include <algorithm>
#include <functional>

namespace nafree {

Matrix::Matrix(std::uint32_t q, std::size_t dim) : q_(q), dim_(dim), entries_(dim * dim, Laurent(q)) {}

Matrix Matrix::identity(std::uint32_t q, std::size_t dim) {
  Matrix m(q, dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = Laurent::one(q);
  return m;
}

Matrix Matrix::diagonal(const std::vector<Laurent>& diag) {
  if (diag.empty()) throw InvalidArgument("empty diagonal");
  Matrix m(diag.front().q(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

Matrix Matrix::diagonal_monomials(std::uint32_t q, const std::vector<std::int64_t>& exps) {
  std::vector<Laurent> diag;
  for (auto e : exps) diag.push_back(Laurent::monomial(q, 1, e));
  return diagonal(diag);
}

Matrix Matrix::from_columns(const std::vector<Vec>& columns) {
  const std::size_t d = columns.size();
  if (d == 0) throw InvalidArgument("no columns");
  Matrix m(columns.front().front().q(), d);
  for (std::size_t j = 0; j < d; ++j) {
    if (columns[j].size() != d) throw InvalidArgument("column length mismatch");
    for (std::size_t i = 0; i < d; ++i) m(i, j) = columns[j][i];
  }
  return m;
}

Matrix Matrix::elementary(std::size_t dim, std::size_t row, std::size_t col, const Laurent& entry) {
  if (row == col) throw InvalidArgument("elementary matrix needs row != col");
  Matrix m = identity(entry.q(), dim);
  m(row, col) = entry;
  return m;
}

bool Matrix::exact() const noexcept {
  return std::all_of(entries_.begin(), entries_.end(), [](const Laurent& x) { return x.exact(); });
}

bool Matrix::is_diagonal() const noexcept {
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j)
      if (i != j && !(*this)(i, j).is_exact_zero()) return false;
  return true;
}

Vec Matrix::column(std::size_t j) const {
  Vec v;
  for (std::size_t i = 0; i < dim_; ++i) v.push_back((*this)(i, j));
  return v;
}

Vec Matrix::row(std::size_t i) const {
  Vec v;
  for (std::size_t j = 0; j < dim_; ++j) v.push_back((*this)(i, j));
  return v;
}

Matrix Matrix::transposed() const {
  Matrix t(q_, dim_);
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::minor(std::size_t skip_row, std::size_t skip_col) const {
  Matrix m(q_, dim_ - 1);
  for (std::size_t i = 0, r = 0; i < dim_; ++i) {
    if (i == skip_row) continue;
    for (std::size_t j = 0, c = 0; j < dim_; ++j) {
      if (j == skip_col) continue;
      m(r, c++) = (*this)(i, j);
    }
    ++r;
  }
  return m;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.dim_ != b.dim_) throw InvalidArgument("dimension mismatch in matrix product");
  const std::size_t d = a.dim_;
  Matrix c(a.q_, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      Laurent s(a.q_);
      for (std::size_t k = 0; k < d; ++k) {
        const Laurent& x = a(i, k);
        const Laurent& y = b(k, j);
        if (x.is_exact_zero() || y.is_exact_zero()) continue;
        s += x * y;
      }
      c(i, j) = std::move(s);
    }
  return c;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  if (a.dim_ != b.dim_) throw InvalidArgument("dimension mismatch in matrix sum");
  Matrix c = a;
  for (std::size_t i = 0; i < c.entries_.size(); ++i) c.entries_[i] += b.entries_[i];
  return c;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  if (a.dim_ != b.dim_) throw InvalidArgument("dimension mismatch in matrix difference");
  Matrix c = a;
  for (std::size_t i = 0; i < c.entries_.size(); ++i) c.entries_[i] -= b.entries_[i];
  return c;
}

Matrix Matrix::scaled(const Laurent& c) const {
  Matrix m = *this;
  for (auto& e : m.entries_) e = e * c;
  return m;
}

bool Matrix::identical(const Matrix& other) const noexcept {
  if (dim_ != other.dim_ || q_ != other.q_) return false;
  for (std::size_t i = 0; i < entries_.size(); ++i)
    if (!entries_[i].identical(other.entries_[i])) return false;
  return true;
}

bool Matrix::is_identity() const noexcept { return identical(identity(q_, dim_)); }

Matrix mat_mul(const Matrix& a, const Matrix& b) { return a * b; }

Vec mat_apply(const Matrix& a, const Vec& v) {
  const std::size_t d = a.dim();
  if (v.size() != d) throw InvalidArgument("vector length mismatch");
  Vec out(d, Laurent(a.q()));
  for (std::size_t i = 0; i < d; ++i) {
    Laurent s(a.q());
    for (std::size_t k = 0; k < d; ++k) {
      if (a(i, k).is_exact_zero() || v[k].is_exact_zero()) continue;
      s += a(i, k) * v[k];
    }
    out[i] = std::move(s);
  }
  return out;
}

Laurent det(const Matrix& a) {
  const std::size_t d = a.dim();
  if (d == 1) return a(0, 0);
  if (d == 2) return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  if (d == 3) {
    return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
           a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
  }
  Laurent s(a.q());
  for (std::size_t j = 0; j < d; ++j) {
    if (a(0, j).is_exact_zero()) continue;
    const Laurent term = a(0, j) * det(a.minor(0, j));
    s = (j % 2 == 0) ? s + term : s - term;
  }
  return s;
}

Matrix adjugate(const Matrix& a) {
  const std::size_t d = a.dim();
  Matrix adj(a.q(), d);
  if (d == 1) {
    adj(0, 0) = Laurent::one(a.q());
    return adj;
  }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      Laurent c = det(a.minor(i, j));
      adj(j, i) = ((i + j) % 2 == 0) ? c : -c;
    }
  return adj;
}

Matrix mat_inv(const Matrix& a, std::int64_t relative_precision) {
  const Laurent dt = det(a);
  if (dt.is_exact_one()) return adjugate(a);
  if (!dt.has_digits())
    throw SingularOrUndecidable("determinant " + to_string(dt) + " has no known nonzero leading digit");
  std::int64_t target = -dt.lead_val() + relative_precision;
  if (!dt.exact()) target = std::min(target, dt.known_to() - 2 * dt.lead_val());
  return adjugate(a).scaled(inv(dt, target));
}

Matrix mat_pow(const Matrix& a, std::int64_t n) {
  Matrix base = n < 0 ? mat_inv(a) : a;
  std::uint64_t e = n < 0 ? static_cast<std::uint64_t>(-n) : static_cast<std::uint64_t>(n);
  Matrix result = Matrix::identity(a.q(), a.dim());
  while (e > 0) {
    if (e & 1u) result = result * base;
    e >>= 1u;
    if (e > 0) base = base * base;
  }
  return result;
}

namespace {

std::int64_t lognorm_of(std::span<const Laurent> xs) {
  std::int64_t min_val = kInfinity, floor = kInfinity;
  const Laurent* worst = nullptr;
  for (const auto& x : xs) {
    if (x.is_exact_zero()) continue;
    const Valuation v = x.valuation();
    if (v.undecidable()) {
      if (v.value < floor) worst = &x;
      floor = std::min(floor, v.value);
      continue;
    }
    min_val = std::min(min_val, v.value);
  }
  // an undecided entry only matters if it could undercut the least known valuation
  if (worst != nullptr && floor <= min_val)
    throw InsufficientPrecision("entry " + to_string(*worst) + " has undecided valuation");
  if (is_infinite(min_val)) throw InvalidArgument("norm of the zero vector/matrix");
  return -min_val;
}

}  // namespace

std::int64_t lognorm(const Matrix& a) {
  std::vector<Laurent> all;
  all.reserve(a.dim() * a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) all.push_back(a(i, j));
  return lognorm_of(all);
}

std::int64_t lognorm(const Vec& v) { return lognorm_of(v); }

namespace {

// One Smith-normal-form sweep at a fixed relative precision for pivot inverses.
std::vector<std::int64_t> smith_valuations(const Matrix& a, std::int64_t relative) {
  const std::size_t d = a.dim();
  Matrix w = a;
  std::vector<std::int64_t> divisors;
  for (std::size_t k = 0; k < d; ++k) {
    std::size_t pr = d, pc = d;
    std::int64_t best = kInfinity;
    std::int64_t undecided_floor = kInfinity;
    for (std::size_t i = k; i < d; ++i)
      for (std::size_t j = k; j < d; ++j) {
        const Laurent& x = w(i, j);
        if (x.is_exact_zero()) continue;
        const Valuation v = x.valuation();
        if (v.undecidable()) {
          undecided_floor = std::min(undecided_floor, v.value);
          continue;
        }
        if (v.value < best) {
          best = v.value;
          pr = i;
          pc = j;
        }
      }
    if (undecided_floor <= best)
      throw InsufficientPrecision("cannot decide the minimal-valuation pivot at step " + std::to_string(k));
    if (pr == d) throw SingularOrUndecidable("matrix is singular");
    for (std::size_t j = 0; j < d; ++j) std::swap(w(k, j), w(pr, j));
    for (std::size_t i = 0; i < d; ++i) std::swap(w(i, k), w(i, pc));
    const Laurent& p = w(k, k);
    std::int64_t target = -best + relative;
    if (!p.exact()) target = std::min(target, p.known_to() - 2 * best);
    const Laurent pinv = inv(p, target);
    for (std::size_t i = k + 1; i < d; ++i) {
      if (w(i, k).is_exact_zero()) continue;
      const Laurent f = w(i, k) * pinv;
      for (std::size_t j = k + 1; j < d; ++j) {
        if (w(k, j).is_exact_zero()) continue;
        w(i, j) -= f * w(k, j);
      }
    }
    divisors.push_back(best);
  }
  return divisors;
}

}  // namespace

CartanVec cartan_projection(const Matrix& a) {
  std::int64_t relative = 16;
  for (;;) {
    try {
      auto divisors = smith_valuations(a, relative);
      CartanVec c;
      for (auto v : divisors) c.mu.push_back(-v);
      std::sort(c.mu.begin(), c.mu.end(), std::greater<>());
      return c;
    } catch (const InsufficientPrecision&) {
      if (!a.exact() || relative > 4096) throw;
      relative *= 4;
    }
  }
}

Laurent Poly::operator()(const Laurent& x) const {
  Laurent acc(x.q());
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Poly Poly::derivative() const {
  Poly d;
  for (std::size_t i = 1; i < coeffs.size(); ++i) d.coeffs.push_back(coeffs[i].scaled(static_cast<std::uint32_t>(i % coeffs[i].q())));
  if (d.coeffs.empty() && !coeffs.empty()) d.coeffs.push_back(Laurent(coeffs.front().q()));
  return d;
}

Poly char_poly(const Matrix& a) {
  const std::size_t n = a.dim();
  const std::uint32_t q = a.q();
  // vect holds coefficients from the highest degree down.
  std::vector<Laurent> vect{Laurent::one(q), -a(0, 0)};
  for (std::size_t r = 1; r < n; ++r) {
    std::vector<Laurent> t{Laurent::one(q), -a(r, r)};
    Vec col(r, Laurent(q));
    for (std::size_t i = 0; i < r; ++i) col[i] = a(i, r);
    for (std::size_t k = 0; k < r; ++k) {
      Laurent dot(q);
      for (std::size_t j = 0; j < r; ++j) dot += a(r, j) * col[j];
      t.push_back(-dot);
      Vec next(r, Laurent(q));
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) next[i] += a(i, j) * col[j];
      col = std::move(next);
    }
    std::vector<Laurent> fresh(r + 2, Laurent(q));
    for (std::size_t i = 0; i < r + 2; ++i)
      for (std::size_t j = 0; j <= std::min(i, r); ++j) fresh[i] += t[i - j] * vect[j];
    vect = std::move(fresh);
  }
  Poly p;
  p.coeffs.assign(vect.rbegin(), vect.rend());
  return p;
}

Matrix eval_poly(const Poly& p, const Matrix& a) {
  Matrix acc(a.q(), a.dim());
  const Matrix id = Matrix::identity(a.q(), a.dim());
  for (auto it = p.coeffs.rbegin(); it != p.coeffs.rend(); ++it) acc = acc * a + id.scaled(*it);
  return acc;
}

Matrix parse_matrix(std::string_view text, std::uint32_t q) {
  std::vector<std::vector<Laurent>> rows;
  std::size_t row_start = 0;
  while (row_start <= text.size()) {
    std::size_t row_end = text.find(';', row_start);
    if (row_end == std::string_view::npos) row_end = text.size();
    const std::string_view row_text = text.substr(row_start, row_end - row_start);
    std::vector<Laurent> row;
    std::size_t cell_start = 0;
    while (cell_start <= row_text.size()) {
      std::size_t cell_end = row_text.find(',', cell_start);
      if (cell_end == std::string_view::npos) cell_end = row_text.size();
      try {
        row.push_back(parse_laurent(row_text.substr(cell_start, cell_end - cell_start), q));
      } catch (const DigitOutOfRange& e) {
        throw DigitOutOfRange(e.what(), row_start + cell_start + e.position());
      } catch (const ParseError& e) {
        throw ParseError(e.what(), row_start + cell_start + e.position());
      }
      cell_start = cell_end + 1;
    }
    rows.push_back(std::move(row));
    row_start = row_end + 1;
  }
  const std::size_t d = rows.size();
  Matrix m(q, d);
  for (std::size_t i = 0; i < d; ++i) {
    if (rows[i].size() != d) throw ParseError("matrix is not square", 0);
    for (std::size_t j = 0; j < d; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

std::string to_string(const Matrix& a) {
  std::string out;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    if (i > 0) out += "; ";
    for (std::size_t j = 0; j < a.dim(); ++j) {
      if (j > 0) out += ", ";
      out += to_string(a(i, j));
    }
  }
  return out;
}

std::string to_string(const Vec& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += " : ";
    out += to_string(v[i]);
  }
  return out + "]";
}

}  // namespace nafree
