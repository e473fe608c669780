#include "k3/exactmath.hpp"

#include <algorithm>
#include <istream>
#include <sstream>

namespace k3 {

Rational make_rational(const Integer &num, const Integer &den) {
  if (den == 0) throw std::domain_error("zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

Integer floor_of(const Rational &x) {
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return q;
}

Integer ceil_of(const Rational &x) {
  Integer q;
  mpz_cdiv_q(q.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return q;
}

Rational mod_rational(const Rational &x, const Rational &m) {
  Rational t = x / m;
  Rational r = x - Rational(floor_of(t)) * m;
  r.canonicalize();
  return r;
}

std::string to_string(const Rational &x) { return x.get_str(); }

Rational parse_rational(const std::string &s) {
  Rational r;
  if (r.set_str(s, 10) != 0) throw std::invalid_argument("bad rational: " + s);
  if (r.get_den() == 0) throw std::invalid_argument("zero denominator: " + s);
  r.canonicalize();
  return r;
}

template <class T> Mat<T>::Mat(std::initializer_list<std::initializer_list<T>> rows) {
  r_ = rows.size();
  c_ = r_ ? rows.begin()->size() : 0;
  a_.reserve(r_ * c_);
  for (const auto &row : rows) {
    if (row.size() != c_) throw std::invalid_argument("ragged matrix literal");
    for (const auto &x : row) a_.push_back(x);
  }
}

template <class T> Mat<T> Mat<T>::identity(std::size_t n) {
  Mat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
  return m;
}

template <class T> std::vector<T> Mat<T>::row(std::size_t i) const {
  return std::vector<T>(a_.begin() + i * c_, a_.begin() + (i + 1) * c_);
}

template <class T> void Mat<T>::set_row(std::size_t i, const std::vector<T> &v) {
  std::copy(v.begin(), v.end(), a_.begin() + i * c_);
}

template <class T> void Mat<T>::append_row(const std::vector<T> &v) {
  if (r_ == 0 && c_ == 0) c_ = v.size();
  if (v.size() != c_) throw std::invalid_argument("append_row: width mismatch");
  a_.insert(a_.end(), v.begin(), v.end());
  ++r_;
}

template <class T> void Mat<T>::swap_rows(std::size_t i, std::size_t j) {
  if (i == j) return;
  for (std::size_t k = 0; k < c_; ++k) std::swap((*this)(i, k), (*this)(j, k));
}

template <class T> void Mat<T>::swap_cols(std::size_t i, std::size_t j) {
  if (i == j) return;
  for (std::size_t k = 0; k < r_; ++k) std::swap((*this)(k, i), (*this)(k, j));
}

template <class T> Mat<T> Mat<T>::transpose() const {
  Mat t(c_, r_);
  for (std::size_t i = 0; i < r_; ++i)
    for (std::size_t j = 0; j < c_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

template <class T>
Mat<T> Mat<T>::submatrix(const std::vector<std::size_t> &ri, const std::vector<std::size_t> &ci) const {
  Mat s(ri.size(), ci.size());
  for (std::size_t i = 0; i < ri.size(); ++i)
    for (std::size_t j = 0; j < ci.size(); ++j) s(i, j) = (*this)(ri[i], ci[j]);
  return s;
}

template <class T> bool Mat<T>::is_symmetric() const {
  if (r_ != c_) return false;
  for (std::size_t i = 0; i < r_; ++i)
    for (std::size_t j = i + 1; j < c_; ++j)
      if ((*this)(i, j) != (*this)(j, i)) return false;
  return true;
}

template <class T> Mat<T> operator*(const Mat<T> &a, const Mat<T> &b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matrix product: shape mismatch");
  Mat<T> c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      if (a(i, k) == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += a(i, k) * b(k, j);
    }
  return c;
}

template <class T> std::vector<T> operator*(const Mat<T> &a, const std::vector<T> &v) {
  if (a.cols() != v.size()) throw std::invalid_argument("matrix-vector product: shape mismatch");
  std::vector<T> w(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) w[i] += a(i, k) * v[k];
  return w;
}

template class Mat<Integer>;
template class Mat<Rational>;
template Mat<Integer> operator*(const Mat<Integer> &, const Mat<Integer> &);
template Mat<Rational> operator*(const Mat<Rational> &, const Mat<Rational> &);
template std::vector<Integer> operator*(const Mat<Integer> &, const std::vector<Integer> &);
template std::vector<Rational> operator*(const Mat<Rational> &, const std::vector<Rational> &);

RatMatrix to_rational(const IntMatrix &m) {
  RatMatrix r(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = m(i, j);
  return r;
}

RatVector to_rational(const IntVector &v) { return RatVector(v.begin(), v.end()); }

IntMatrix to_integer(const RatMatrix &m) {
  IntMatrix r(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (m(i, j).get_den() != 1) throw std::domain_error("non-integral entry " + to_string(m(i, j)));
      r(i, j) = m(i, j).get_num();
    }
  return r;
}

IntVector to_integer(const RatVector &v) {
  IntVector r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i].get_den() != 1) throw std::domain_error("non-integral entry " + to_string(v[i]));
    r[i] = v[i].get_num();
  }
  return r;
}

Rational bilinear(const RatMatrix &g, const RatVector &v, const RatVector &w) {
  Rational s = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0) continue;
    Rational t = 0;
    for (std::size_t j = 0; j < w.size(); ++j)
      if (w[j] != 0) t += g(i, j) * w[j];
    s += v[i] * t;
  }
  return s;
}

Integer bilinear(const IntMatrix &g, const IntVector &v, const IntVector &w) {
  Integer s = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0) continue;
    Integer t = 0;
    for (std::size_t j = 0; j < w.size(); ++j)
      if (w[j] != 0) t += g(i, j) * w[j];
    s += v[i] * t;
  }
  return s;
}

namespace {

// Row operation r_i += k * r_j on M and on the row-transform U.
void add_row(IntMatrix &m, std::size_t i, std::size_t j, const Integer &k) {
  for (std::size_t c = 0; c < m.cols(); ++c)
    if (m(j, c) != 0) m(i, c) += k * m(j, c);
}

void add_col(IntMatrix &m, std::size_t i, std::size_t j, const Integer &k) {
  for (std::size_t r = 0; r < m.rows(); ++r)
    if (m(r, j) != 0) m(r, i) += k * m(r, j);
}

} // namespace

SmithData smith_normal_form(const IntMatrix &a) {
  const std::size_t m = a.rows(), n = a.cols();
  IntMatrix d = a, u = IntMatrix::identity(m), v = IntMatrix::identity(n);
  const std::size_t steps = std::min(m, n);
  for (std::size_t t = 0; t < steps; ++t) {
    for (;;) {
      // Pivot: smallest nonzero |entry| in the trailing block, lowest index on ties.
      bool found = false;
      std::size_t pi = 0, pj = 0;
      Integer best;
      for (std::size_t i = t; i < m; ++i)
        for (std::size_t j = t; j < n; ++j) {
          if (d(i, j) == 0) continue;
          Integer av = abs(d(i, j));
          if (!found || av < best) {
            found = true;
            best = av;
            pi = i;
            pj = j;
          }
        }
      if (!found) goto done;
      d.swap_rows(t, pi);
      u.swap_rows(t, pi);
      d.swap_cols(t, pj);
      v.swap_cols(t, pj);
      bool remainder = false;
      const Integer p = d(t, t);
      for (std::size_t i = t + 1; i < m; ++i) {
        if (d(i, t) == 0) continue;
        Integer q;
        mpz_fdiv_q(q.get_mpz_t(), d(i, t).get_mpz_t(), p.get_mpz_t());
        add_row(d, i, t, -q);
        add_row(u, i, t, -q);
        if (d(i, t) != 0) remainder = true;
      }
      for (std::size_t j = t + 1; j < n; ++j) {
        if (d(t, j) == 0) continue;
        Integer q;
        mpz_fdiv_q(q.get_mpz_t(), d(t, j).get_mpz_t(), p.get_mpz_t());
        add_col(d, j, t, -q);
        add_col(v, j, t, -q);
        if (d(t, j) != 0) remainder = true;
      }
      if (remainder) continue;
      // Divisibility of the trailing block by the pivot.
      bool fixed = false;
      for (std::size_t i = t + 1; i < m && !fixed; ++i)
        for (std::size_t j = t + 1; j < n; ++j)
          if (d(i, j) % p != 0) {
            add_row(d, t, i, 1);
            add_row(u, t, i, 1);
            fixed = true;
            break;
          }
      if (!fixed) break;
    }
    if (d(t, t) < 0) {
      for (std::size_t c = 0; c < n; ++c) d(t, c) = -d(t, c);
      for (std::size_t c = 0; c < m; ++c) u(t, c) = -u(t, c);
    }
  }
done:
  return SmithData{d, u, v};
}

Integer exact_determinant(const IntMatrix &a) {
  if (!a.is_square()) throw std::invalid_argument("determinant of a non-square matrix");
  const std::size_t n = a.rows();
  if (n == 0) return 1;
  IntMatrix m = a;
  Integer prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m(k, k) == 0) {
      std::size_t s = k + 1;
      while (s < n && m(s, k) == 0) ++s;
      if (s == n) return 0;
      m.swap_rows(k, s);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) {
        m(i, j) = m(i, j) * m(k, k) - m(i, k) * m(k, j);
        mpz_divexact(m(i, j).get_mpz_t(), m(i, j).get_mpz_t(), prev.get_mpz_t());
      }
    prev = m(k, k);
  }
  return sign * m(n - 1, n - 1);
}

Rational determinant(const RatMatrix &a) {
  if (!a.is_square()) throw std::invalid_argument("determinant of a non-square matrix");
  RatMatrix m = a;
  const std::size_t n = m.rows();
  Rational det = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    while (p < n && m(p, k) == 0) ++p;
    if (p == n) return 0;
    if (p != k) {
      m.swap_rows(p, k);
      det = -det;
    }
    det *= m(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      if (m(i, k) == 0) continue;
      Rational f = m(i, k) / m(k, k);
      for (std::size_t j = k; j < n; ++j) m(i, j) -= f * m(k, j);
    }
  }
  return det;
}

IntMatrix kernel_basis(const IntMatrix &a) {
  SmithData s = smith_normal_form(a);
  std::size_t r = 0;
  while (r < std::min(a.rows(), a.cols()) && s.D(r, r) != 0) ++r;
  IntMatrix k(a.cols() - r, a.cols());
  for (std::size_t j = r; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.cols(); ++i) k(j - r, i) = s.V(i, j);
  return k;
}

IntMatrix hermite_normal_form(const IntMatrix &a) {
  IntMatrix m = a;
  const std::size_t rows = m.rows(), cols = m.cols();
  std::size_t k = 0;
  for (std::size_t j = 0; j < cols && k < rows; ++j) {
    // Euclid on column j among rows k..
    for (;;) {
      std::size_t best = rows;
      for (std::size_t i = k; i < rows; ++i)
        if (m(i, j) != 0 && (best == rows || abs(m(i, j)) < abs(m(best, j)))) best = i;
      if (best == rows) break;
      m.swap_rows(k, best);
      bool again = false;
      for (std::size_t i = k + 1; i < rows; ++i) {
        if (m(i, j) == 0) continue;
        Integer q;
        mpz_fdiv_q(q.get_mpz_t(), m(i, j).get_mpz_t(), m(k, j).get_mpz_t());
        add_row(m, i, k, -q);
        if (m(i, j) != 0) again = true;
      }
      if (!again) break;
    }
    if (m(k, j) == 0) continue;
    if (m(k, j) < 0)
      for (std::size_t c = 0; c < cols; ++c) m(k, c) = -m(k, c);
    for (std::size_t i = 0; i < k; ++i) {
      Integer q;
      mpz_fdiv_q(q.get_mpz_t(), m(i, j).get_mpz_t(), m(k, j).get_mpz_t());
      if (q != 0) add_row(m, i, k, -q);
    }
    ++k;
  }
  IntMatrix out(k, cols);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t c = 0; c < cols; ++c) out(i, c) = m(i, c);
  return out;
}

namespace {

// Reduced row echelon form in place; returns pivot columns.
std::vector<std::size_t> rref(RatMatrix &m) {
  std::vector<std::size_t> piv;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t p = r;
    while (p < m.rows() && m(p, c) == 0) ++p;
    if (p == m.rows()) continue;
    m.swap_rows(p, r);
    Rational inv = 1 / m(r, c);
    for (std::size_t j = c; j < m.cols(); ++j) m(r, j) *= inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || m(i, c) == 0) continue;
      Rational f = m(i, c);
      for (std::size_t j = c; j < m.cols(); ++j) m(i, j) -= f * m(r, j);
    }
    piv.push_back(c);
    ++r;
  }
  return piv;
}

} // namespace

std::size_t rank_of(const RatMatrix &a) {
  RatMatrix m = a;
  return rref(m).size();
}

RatMatrix inverse(const RatMatrix &a) {
  if (!a.is_square()) throw std::invalid_argument("inverse of a non-square matrix");
  const std::size_t n = a.rows();
  RatMatrix m(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m(i, j) = a(i, j);
    m(i, n + i) = 1;
  }
  auto piv = rref(m);
  if (piv.size() < n || piv[n - 1] != n - 1) throw std::domain_error("singular matrix");
  RatMatrix inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = m(i, n + j);
  return inv;
}

RatVector solve_left(const RatMatrix &a, const RatVector &b) {
  // x A = b  <=>  A^T x^T = b^T
  const std::size_t n = a.rows();
  RatMatrix m(a.cols(), n + 1);
  for (std::size_t i = 0; i < a.cols(); ++i) {
    for (std::size_t j = 0; j < n; ++j) m(i, j) = a(j, i);
    m(i, n) = b[i];
  }
  auto piv = rref(m);
  if (piv.size() < n || (!piv.empty() && piv.back() == n)) throw std::domain_error("no unique solution");
  for (std::size_t i = 0; i < piv.size(); ++i)
    if (piv[i] != i) throw std::domain_error("no unique solution");
  for (std::size_t i = n; i < m.rows(); ++i)
    if (m(i, n) != 0) throw std::domain_error("inconsistent system");
  RatVector x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = m(i, n);
  return x;
}

std::vector<std::size_t> independent_rows(const RatMatrix &a) {
  std::vector<std::size_t> chosen;
  std::vector<RatVector> basis;       // echelonized rows
  std::vector<std::size_t> pivots;    // pivot column of each basis row
  for (std::size_t i = 0; i < a.rows(); ++i) {
    RatVector v = a.row(i);
    for (std::size_t b = 0; b < basis.size(); ++b) {
      const Rational f = v[pivots[b]];
      if (f == 0) continue;
      for (std::size_t j = 0; j < v.size(); ++j)
        if (basis[b][j] != 0) v[j] -= f * basis[b][j];
    }
    std::size_t p = 0;
    while (p < v.size() && v[p] == 0) ++p;
    if (p == v.size()) continue;
    Rational inv = 1 / v[p];
    for (auto &x : v) x *= inv;
    // keep earlier basis rows reduced at the new pivot
    for (auto &row : basis) {
      const Rational f = row[p];
      if (f == 0) continue;
      for (std::size_t j = 0; j < v.size(); ++j)
        if (v[j] != 0) row[j] -= f * v[j];
    }
    basis.push_back(std::move(v));
    pivots.push_back(p);
    chosen.push_back(i);
  }
  return chosen;
}

IntMatrix parse_int_matrix(std::istream &in) {
  long r = -1, c = -1;
  if (!(in >> r >> c) || r < 0 || c < 0) throw std::invalid_argument("matrix header: expected 'R C'");
  IntMatrix m(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
  for (long i = 0; i < r; ++i)
    for (long j = 0; j < c; ++j) {
      std::string tok;
      if (!(in >> tok)) throw std::invalid_argument("matrix body: too few entries");
      Integer x;
      if (x.set_str(tok, 10) != 0) throw std::invalid_argument("matrix body: bad integer '" + tok + "'");
      m(i, j) = x;
    }
  return m;
}

std::string format_int_matrix(const IntMatrix &m) {
  std::ostringstream out;
  out << m.rows() << ' ' << m.cols() << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) out << (j ? " " : "") << m(i, j).get_str();
    out << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------- number fields

int NumberField::degree() const {
  switch (tag) {
  case FieldTag::Rationals: return 1;
  case FieldTag::Sqrt2: return 2;
  case FieldTag::Cyclotomic8: return 4;
  case FieldTag::Cyclotomic12: return 4;
  }
  return 1;
}

std::vector<int> NumberField::min_poly_tail() const {
  switch (tag) {
  case FieldTag::Rationals: return {0};          // x
  case FieldTag::Sqrt2: return {-2, 0};          // x^2 - 2
  case FieldTag::Cyclotomic8: return {1, 0, 0, 0};   // x^4 + 1
  case FieldTag::Cyclotomic12: return {1, 0, -1, 0}; // x^4 - x^2 + 1
  }
  return {0};
}

std::string NumberField::name() const {
  switch (tag) {
  case FieldTag::Rationals: return "Q";
  case FieldTag::Sqrt2: return "sqrt2";
  case FieldTag::Cyclotomic8: return "zeta8";
  case FieldTag::Cyclotomic12: return "zeta12";
  }
  return "?";
}

NumberField NumberField::from_name(const std::string &s) {
  if (s == "Q") return {FieldTag::Rationals};
  if (s == "sqrt2") return {FieldTag::Sqrt2};
  if (s == "zeta8") return {FieldTag::Cyclotomic8};
  if (s == "zeta12") return {FieldTag::Cyclotomic12};
  throw std::invalid_argument("unknown field tag: " + s);
}

NFElement::NFElement(NumberField f) : f_(f), c_(static_cast<std::size_t>(f.degree())) {}

NFElement::NFElement(NumberField f, const Rational &q) : NFElement(f) { c_[0] = q; }

NFElement::NFElement(NumberField f, std::vector<Rational> coords) : f_(f), c_(std::move(coords)) {
  if (c_.size() != static_cast<std::size_t>(f.degree())) throw field_error("coordinate count does not match field degree");
}

NFElement NFElement::generator(NumberField f) {
  NFElement g(f);
  if (f.degree() == 1) throw field_error("Q has no nontrivial generator");
  g.c_[1] = 1;
  return g;
}

bool NFElement::is_zero() const {
  return std::all_of(c_.begin(), c_.end(), [](const Rational &x) { return x == 0; });
}

bool NFElement::is_rational() const {
  return std::all_of(c_.begin() + 1, c_.end(), [](const Rational &x) { return x == 0; });
}

void NFElement::check_same(const NFElement &o) const {
  if (f_ != o.f_) throw field_error("field mismatch: " + f_.name() + " vs " + o.f_.name());
}

NFElement NFElement::operator-() const {
  NFElement r = *this;
  for (auto &x : r.c_) x = -x;
  return r;
}

NFElement &NFElement::operator+=(const NFElement &o) {
  check_same(o);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

NFElement &NFElement::operator-=(const NFElement &o) {
  check_same(o);
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

NFElement &NFElement::operator*=(const NFElement &o) {
  check_same(o);
  const std::size_t n = c_.size();
  std::vector<Rational> prod(2 * n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    if (c_[i] == 0) continue;
    for (std::size_t j = 0; j < n; ++j)
      if (o.c_[j] != 0) prod[i + j] += c_[i] * o.c_[j];
  }
  const auto tail = f_.min_poly_tail();
  for (std::size_t k = prod.size(); k-- > n;) {
    if (prod[k] == 0) continue;
    const Rational top = prod[k];
    prod[k] = 0;
    for (std::size_t t = 0; t < n; ++t)
      if (tail[t] != 0) prod[k - n + t] -= top * tail[t];
  }
  prod.resize(n);
  c_ = std::move(prod);
  return *this;
}

NFElement NFElement::inverse() const {
  if (is_zero()) throw field_error("division by zero");
  const std::size_t n = c_.size();
  RatMatrix mult(n, n);
  NFElement xk(f_, Rational(1));
  for (std::size_t k = 0; k < n; ++k) {
    NFElement row = *this * xk;
    for (std::size_t j = 0; j < n; ++j) mult(k, j) = row.c_[j];
    if (k + 1 < n) xk *= generator(f_);
  }
  RatVector e(n);
  e[0] = 1;
  return NFElement(f_, solve_left(mult, e));
}

NFElement &NFElement::operator/=(const NFElement &o) {
  check_same(o);
  return *this *= o.inverse();
}

NFElement NFElement::pow(long e) const {
  if (e < 0) return inverse().pow(-e);
  NFElement r(f_, Rational(1)), b = *this;
  while (e) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}

NFElement NFElement::conjugate() const {
  if (f_.tag == FieldTag::Rationals || f_.tag == FieldTag::Sqrt2) return *this;
  const NFElement gbar = generator(f_).inverse();
  NFElement r(f_), p(f_, Rational(1));
  for (std::size_t k = 0; k < c_.size(); ++k) {
    if (c_[k] != 0) {
      NFElement t = p;
      for (auto &x : t.c_) x *= c_[k];
      r += t;
    }
    p *= gbar;
  }
  return r;
}

bool NFElement::operator<(const NFElement &o) const {
  check_same(o);
  return std::lexicographical_compare(c_.begin(), c_.end(), o.c_.begin(), o.c_.end());
}

std::string NFElement::to_string() const {
  std::string s = f_.name() + ":";
  for (std::size_t i = 0; i < c_.size(); ++i) s += (i ? "," : "") + c_[i].get_str();
  return s;
}

NFElement NFElement::parse(const std::string &s) {
  auto colon = s.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("field element: missing ':'");
  NumberField f = NumberField::from_name(s.substr(0, colon));
  std::vector<Rational> coords;
  std::stringstream ss(s.substr(colon + 1));
  std::string tok;
  while (std::getline(ss, tok, ',')) coords.push_back(parse_rational(tok));
  if (coords.size() != static_cast<std::size_t>(f.degree())) throw std::invalid_argument("field element: wrong coordinate count");
  return NFElement(f, coords);
}

NFElement nf_arith(const NFElement &a, const NFElement &b, NFOp op) {
  switch (op) {
  case NFOp::Add: return a + b;
  case NFOp::Sub: return a - b;
  case NFOp::Mul: return a * b;
  case NFOp::Div: return a / b;
  }
  return a;
}

NFElement nf_automorphism(const NFElement &a, NFAuto which) {
  return which == NFAuto::Identity ? a : a.conjugate();
}

namespace nf {
NFElement sqrt2() { return NFElement::generator({FieldTag::Sqrt2}); }
NFElement zeta8() { return NFElement::generator({FieldTag::Cyclotomic8}); }
NFElement zeta12() { return NFElement::generator({FieldTag::Cyclotomic12}); }
NFElement i12() { return zeta12().pow(3); }
NFElement sqrt3() {
  // zeta + zeta^{-1} = 2 cos(pi/6)
  NFElement z = zeta12();
  NFElement s = z + z.inverse();
  if (s * s != NFElement({FieldTag::Cyclotomic12}, Rational(3))) throw field_error("sqrt3 constant check failed");
  return s;
}
NFElement omega12() { return zeta12().pow(4); }
} // namespace nf

} // namespace k3
