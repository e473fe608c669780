#include "doctest.h"
#include "k3/exactmath.hpp"

#include <random>
#include <sstream>

using namespace k3;

namespace {

// Laplace expansion; independent of the elimination code.
Integer cofactor_det(const IntMatrix &a) {
  const std::size_t n = a.rows();
  if (n == 0) return 1;
  if (n == 1) return a(0, 0);
  Integer s = 0;
  for (std::size_t j = 0; j < n; ++j) {
    if (a(0, j) == 0) continue;
    std::vector<std::size_t> ri, ci;
    for (std::size_t i = 1; i < n; ++i) ri.push_back(i);
    for (std::size_t c = 0; c < n; ++c)
      if (c != j) ci.push_back(c);
    Integer m = cofactor_det(a.submatrix(ri, ci));
    s += (j % 2 ? -1 : 1) * a(0, j) * m;
  }
  return s;
}

IntMatrix random_matrix(std::mt19937 &rng, std::size_t r, std::size_t c, int lo, int hi) {
  std::uniform_int_distribution<int> d(lo, hi);
  IntMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = d(rng);
  return m;
}

IntMatrix e8_gram() {
  // Cartan matrix of E8, Bourbaki numbering.
  IntMatrix g = IntMatrix::identity(8);
  for (std::size_t i = 0; i < 8; ++i) g(i, i) = 2;
  auto link = [&](int a, int b) { g(a, b) = g(b, a) = -1; };
  link(0, 2);
  link(1, 3);
  link(2, 3);
  link(3, 4);
  link(4, 5);
  link(5, 6);
  link(6, 7);
  return g;
}

void check_smith(const IntMatrix &a) {
  SmithData s = smith_normal_form(a);
  CHECK(s.U * a * s.V == s.D);
  CHECK(abs(exact_determinant(s.U)) == 1);
  CHECK(abs(exact_determinant(s.V)) == 1);
  const std::size_t k = std::min(a.rows(), a.cols());
  for (std::size_t i = 0; i < s.D.rows(); ++i)
    for (std::size_t j = 0; j < s.D.cols(); ++j)
      if (i != j) CHECK(s.D(i, j) == 0);
  for (std::size_t i = 0; i < k; ++i) CHECK(s.D(i, i) >= 0);
  for (std::size_t i = 0; i + 1 < k; ++i) {
    if (s.D(i, i) == 0) CHECK(s.D(i + 1, i + 1) == 0);
    else CHECK(s.D(i + 1, i + 1) % s.D(i, i) == 0);
  }
}

} // namespace

TEST_CASE("smith form of small matrices") {
  SmithData s = smith_normal_form(IntMatrix{{2, 0}, {0, 2}});
  CHECK(s.D == (IntMatrix{{2, 0}, {0, 2}}));
  CHECK(s.U == IntMatrix::identity(2));
  CHECK(s.V == IntMatrix::identity(2));

  s = smith_normal_form(IntMatrix{{4, 1}, {1, -2}});
  CHECK(s.D == (IntMatrix{{1, 0}, {0, 9}}));

  IntMatrix e8 = e8_gram();
  CHECK(cofactor_det(e8) == 1);
  CHECK(smith_normal_form(e8).D == IntMatrix::identity(8));
}

TEST_CASE("smith form identities on random matrices") {
  std::mt19937 rng(12345);
  for (int t = 0; t < 60; ++t) {
    std::size_t r = 1 + rng() % 5, c = 1 + rng() % 5;
    check_smith(random_matrix(rng, r, c, -6, 6));
  }
  // rank-deficient inputs
  for (int t = 0; t < 20; ++t) {
    IntMatrix a = random_matrix(rng, 4, 2, -4, 4), b = random_matrix(rng, 2, 4, -4, 4);
    check_smith(a * b);
  }
  SmithData s1 = smith_normal_form(IntMatrix{{6, 4}, {4, 6}});
  SmithData s2 = smith_normal_form(IntMatrix{{6, 4}, {4, 6}});
  CHECK(s1.U == s2.U);
  CHECK(s1.V == s2.V);
}

TEST_CASE("determinants") {
  CHECK(exact_determinant(IntMatrix::identity(5)) == 1);
  CHECK(exact_determinant(IntMatrix{{0, 1}, {1, 0}}) == -1);
  CHECK_THROWS(exact_determinant(IntMatrix(2, 3)));
  std::mt19937 rng(7);
  for (int t = 0; t < 50; ++t) {
    std::size_t n = 1 + rng() % 5;
    IntMatrix a = random_matrix(rng, n, n, -5, 5), b = random_matrix(rng, n, n, -5, 5);
    CHECK(exact_determinant(a) == cofactor_det(a));
    CHECK(exact_determinant(a * b) == exact_determinant(a) * exact_determinant(b));
    CHECK(determinant(to_rational(a)) == Rational(exact_determinant(a)));
  }
}

TEST_CASE("integer kernels") {
  CHECK(kernel_basis(IntMatrix::identity(3)).rows() == 0);
  IntMatrix k = kernel_basis(IntMatrix{{2, 4}});
  REQUIRE(k.rows() == 1);
  CHECK(((k(0, 0) == 2 && k(0, 1) == -1) || (k(0, 0) == -2 && k(0, 1) == 1)));
  IntMatrix a2{{-2, 1, 1}, {1, -2, 1}, {1, 1, -2}};
  k = kernel_basis(a2);
  REQUIRE(k.rows() == 1);
  CHECK(abs(k(0, 0)) == 1);
  CHECK(k(0, 0) == k(0, 1));
  CHECK(k(0, 1) == k(0, 2));

  std::mt19937 rng(99);
  for (int t = 0; t < 40; ++t) {
    IntMatrix a = random_matrix(rng, 2 + rng() % 3, 5, -3, 3);
    IntMatrix kb = kernel_basis(a);
    for (std::size_t i = 0; i < kb.rows(); ++i) {
      IntVector v = kb.row(i);
      for (const auto &x : a * v) CHECK(x == 0);
    }
    CHECK(kb.rows() == 5 - rank_of(to_rational(a)));
    if (kb.rows() > 0) {
      SmithData s = smith_normal_form(kb);
      for (std::size_t i = 0; i < kb.rows(); ++i) CHECK(s.D(i, i) == 1);
    }
  }
}

TEST_CASE("hermite form spans the same lattice") {
  IntMatrix a{{2, 4}, {4, 2}, {6, 6}};
  IntMatrix h = hermite_normal_form(a);
  CHECK(h == (IntMatrix{{2, 4}, {0, 6}}));
}

TEST_CASE("matrix text format round trip") {
  IntMatrix m{{1, -2, 3}, {0, 5, -7}};
  std::string s = format_int_matrix(m);
  CHECK(s == "2 3\n1 -2 3\n0 5 -7\n");
  std::istringstream in(s);
  CHECK(parse_int_matrix(in) == m);
  std::istringstream bad("2 2\n1 x 3 4\n");
  CHECK_THROWS(parse_int_matrix(bad));
}

TEST_CASE("number field arithmetic") {
  NumberField q2{FieldTag::Sqrt2};
  NFElement r2 = nf::sqrt2();
  CHECK(r2 * r2 == NFElement(q2, 2));
  NFElement a = NFElement(q2, -1) + r2, b = NFElement(q2, -1) - r2;
  CHECK(a * b == NFElement(q2, -1));
  CHECK(nf_arith(a, b, NFOp::Div) * b == a);
  NFElement z = nf::zeta12();
  CHECK(z.pow(6) == NFElement(z.field(), -1));
  CHECK(z.pow(12) == NFElement(z.field(), 1));
  CHECK(nf::zeta8().pow(4) == NFElement(nf::zeta8().field(), -1));
  CHECK(nf::sqrt3() * nf::sqrt3() == NFElement(z.field(), 3));
  NFElement w = nf::omega12();
  CHECK(w * w + w + NFElement(z.field(), 1) == NFElement(z.field()));
  CHECK_THROWS_AS(r2 + z, field_error);
  CHECK_THROWS_AS(r2 / NFElement(q2), field_error);
  CHECK(NFElement::parse(a.to_string()) == a);
}

TEST_CASE("complex conjugation") {
  CHECK(nf_automorphism(nf::sqrt2(), NFAuto::Conjugate) == nf::sqrt2());
  CHECK(nf::zeta12().conjugate() == nf::zeta12().pow(11));
  CHECK(nf::i12().conjugate() == -nf::i12());
  CHECK(nf::sqrt3().conjugate() == nf::sqrt3());
  CHECK(nf::zeta8().conjugate() == nf::zeta8().pow(7));
}

TEST_CASE("field axioms and conjugation on random elements") {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> d(-5, 5);
  for (FieldTag tag : {FieldTag::Sqrt2, FieldTag::Cyclotomic8, FieldTag::Cyclotomic12}) {
    NumberField f{tag};
    auto rnd = [&] {
      std::vector<Rational> c(f.degree());
      for (auto &x : c) x = Rational(d(rng), 1 + (rng() % 3));
      for (auto &x : c) x.canonicalize();
      return NFElement(f, c);
    };
    for (int t = 0; t < 30; ++t) {
      NFElement x = rnd(), y = rnd(), w = rnd();
      CHECK((x + y) + w == x + (y + w));
      CHECK((x * y) * w == x * (y * w));
      CHECK(x * (y + w) == x * y + x * w);
      CHECK(x * y == y * x);
      if (!x.is_zero()) CHECK(x * x.inverse() == NFElement(f, 1));
      CHECK((x * y).conjugate() == x.conjugate() * y.conjugate());
      CHECK((x + y).conjugate() == x.conjugate() + y.conjugate());
      CHECK(x.conjugate().conjugate() == x);
    }
  }
}
