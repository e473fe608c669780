#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace k3 {

using Integer = mpz_class;
using Rational = mpq_class;

// num/den in lowest terms; den != 0.
Rational make_rational(const Integer &num, const Integer &den);
Integer floor_of(const Rational &x);
Integer ceil_of(const Rational &x);
// Representative of x modulo m in [0, m).
Rational mod_rational(const Rational &x, const Rational &m);
std::string to_string(const Rational &x);
Rational parse_rational(const std::string &s);

// Dense row-major matrix over an exact ring (Integer or Rational).
template <class T> class Mat {
public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols) : r_(rows), c_(cols), a_(rows * cols) {}
  Mat(std::initializer_list<std::initializer_list<T>> rows);

  static Mat identity(std::size_t n);

  std::size_t rows() const { return r_; }
  std::size_t cols() const { return c_; }
  bool empty() const { return r_ == 0 || c_ == 0; }
  T &operator()(std::size_t i, std::size_t j) { return a_[i * c_ + j]; }
  const T &operator()(std::size_t i, std::size_t j) const { return a_[i * c_ + j]; }

  std::vector<T> row(std::size_t i) const;
  void set_row(std::size_t i, const std::vector<T> &v);
  void append_row(const std::vector<T> &v);
  void swap_rows(std::size_t i, std::size_t j);
  void swap_cols(std::size_t i, std::size_t j);

  Mat transpose() const;
  Mat submatrix(const std::vector<std::size_t> &ri, const std::vector<std::size_t> &ci) const;
  bool is_square() const { return r_ == c_; }
  bool is_symmetric() const;

  bool operator==(const Mat &o) const { return r_ == o.r_ && c_ == o.c_ && a_ == o.a_; }
  bool operator!=(const Mat &o) const { return !(*this == o); }

private:
  std::size_t r_ = 0, c_ = 0;
  std::vector<T> a_;
};

using IntMatrix = Mat<Integer>;
using RatMatrix = Mat<Rational>;
using IntVector = std::vector<Integer>;
using RatVector = std::vector<Rational>;

template <class T> Mat<T> operator*(const Mat<T> &a, const Mat<T> &b);
template <class T> std::vector<T> operator*(const Mat<T> &a, const std::vector<T> &v);

RatMatrix to_rational(const IntMatrix &m);
RatVector to_rational(const IntVector &v);
// Throws if some entry is not an integer.
IntMatrix to_integer(const RatMatrix &m);
IntVector to_integer(const RatVector &v);

// v^T G w for a Gram matrix G.
Rational bilinear(const RatMatrix &g, const RatVector &v, const RatVector &w);
Integer bilinear(const IntMatrix &g, const IntVector &v, const IntVector &w);

struct SmithData {
  IntMatrix D, U, V;
};

// U*A*V = D with d_1 | d_2 | ... on the diagonal; pivots are chosen by smallest
// nonzero absolute value, ties broken by lowest (row, column).
SmithData smith_normal_form(const IntMatrix &a);

// Fraction-free (Bareiss) elimination.
Integer exact_determinant(const IntMatrix &a);
Rational determinant(const RatMatrix &a);

// Saturated basis of {x in Z^n : A x = 0}, one vector per row.
IntMatrix kernel_basis(const IntMatrix &a);

// Row-style Hermite normal form of the row span; zero rows dropped.
IntMatrix hermite_normal_form(const IntMatrix &a);

std::size_t rank_of(const RatMatrix &a);
RatMatrix inverse(const RatMatrix &a);
// Solves x A = b (row vector x); throws if A is singular.
RatVector solve_left(const RatMatrix &a, const RatVector &b);
// Indices of a maximal independent subset of rows, chosen greedily in order.
std::vector<std::size_t> independent_rows(const RatMatrix &a);

IntMatrix parse_int_matrix(std::istream &in);
std::string format_int_matrix(const IntMatrix &m);

enum class FieldTag { Rationals, Sqrt2, Cyclotomic8, Cyclotomic12 };

struct NumberField {
  FieldTag tag = FieldTag::Rationals;
  int degree() const;
  // Monic minimal polynomial x^n + c_{n-1} x^{n-1} + ... ; lowest degree first.
  std::vector<int> min_poly_tail() const;
  std::string name() const;
  bool operator==(const NumberField &o) const { return tag == o.tag; }
  bool operator!=(const NumberField &o) const { return tag != o.tag; }

  static NumberField from_name(const std::string &s);
};

class field_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Element of one of the fixed fields, in the power basis of the generator
// (sqrt2, zeta8 or zeta12).
class NFElement {
public:
  NFElement() : NFElement(NumberField{}) {}
  explicit NFElement(NumberField f);
  NFElement(NumberField f, const Rational &q);
  NFElement(NumberField f, std::vector<Rational> coords);

  static NFElement generator(NumberField f);

  const NumberField &field() const { return f_; }
  const std::vector<Rational> &coords() const { return c_; }
  bool is_zero() const;
  bool is_rational() const;

  NFElement operator-() const;
  NFElement &operator+=(const NFElement &o);
  NFElement &operator-=(const NFElement &o);
  NFElement &operator*=(const NFElement &o);
  NFElement &operator/=(const NFElement &o);
  NFElement inverse() const;
  NFElement pow(long e) const;
  // Complex conjugation under the standard embedding.
  NFElement conjugate() const;

  bool operator==(const NFElement &o) const { return f_ == o.f_ && c_ == o.c_; }
  bool operator!=(const NFElement &o) const { return !(*this == o); }
  bool operator<(const NFElement &o) const;

  std::string to_string() const;
  static NFElement parse(const std::string &s);

private:
  void check_same(const NFElement &o) const;
  NumberField f_;
  std::vector<Rational> c_;
};

inline NFElement operator+(NFElement a, const NFElement &b) { return a += b; }
inline NFElement operator-(NFElement a, const NFElement &b) { return a -= b; }
inline NFElement operator*(NFElement a, const NFElement &b) { return a *= b; }
inline NFElement operator/(NFElement a, const NFElement &b) { return a /= b; }

enum class NFOp { Add, Sub, Mul, Div };
NFElement nf_arith(const NFElement &a, const NFElement &b, NFOp op);
enum class NFAuto { Identity, Conjugate };
NFElement nf_automorphism(const NFElement &a, NFAuto which);

namespace nf {
NFElement sqrt2();
NFElement zeta8();
NFElement zeta12();
NFElement i12();     // i in Q(zeta12)
NFElement sqrt3();   // sqrt 3 in Q(zeta12), positive real embedding
NFElement omega12(); // primitive cube root of unity exp(2 pi i / 3) in Q(zeta12)
} // namespace nf

} // namespace k3
