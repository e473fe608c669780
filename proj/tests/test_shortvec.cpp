#include "doctest.h"
#include "k3/shortvec.hpp"

#include <cmath>
#include <random>
#include <set>

using namespace k3;

namespace {

// Random negative definite Gram matrix, diagonally dominant so that a box of
// radius sqrt(2 |bound| / |g_ii|) around the origin contains every solution.
IntMatrix random_definite(std::mt19937 &rng, std::size_t n) {
  std::uniform_int_distribution<int> off(-1, 1), extra(0, 4);
  IntMatrix g(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) g(i, j) = g(j, i) = off(rng);
  for (std::size_t i = 0; i < n; ++i) {
    long row = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) row += std::abs(g(i, j).get_si());
    g(i, i) = -(2 * row + 2 + extra(rng));
  }
  return g;
}

// Every v in the box with the requested norm of v + shift; shift denominators divide 4.
std::vector<IntVector> brute_force(const IntMatrix &g, const RatVector &shift, const Rational &target) {
  const std::size_t n = g.rows();
  std::vector<long> radius(n), s4(n);
  std::vector<std::vector<long>> gl(n, std::vector<long>(n));
  for (std::size_t i = 0; i < n; ++i) {
    double r = std::sqrt(2.0 * std::abs(target.get_d()) / std::abs(g(i, i).get_d()));
    radius[i] = static_cast<long>(r) + 2 + static_cast<long>(std::abs(shift[i].get_d()));
    s4[i] = Rational(shift[i] * 4).get_num().get_si();
    for (std::size_t j = 0; j < n; ++j) gl[i][j] = g(i, j).get_si();
  }
  const long t16 = Rational(target * 16).get_num().get_si();
  std::vector<IntVector> out;
  std::vector<long> c(n), x(n);
  for (std::size_t i = 0; i < n; ++i) c[i] = -radius[i];
  for (;;) {
    for (std::size_t i = 0; i < n; ++i) x[i] = 4 * c[i] + s4[i];
    long norm = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) norm += x[i] * gl[i][j] * x[j];
    if (norm == t16) out.push_back(IntVector(c.begin(), c.end()));
    std::size_t i = 0;
    while (i < n && ++c[i] > radius[i]) {
      c[i] = -radius[i];
      ++i;
    }
    if (i == n) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

IntMatrix e8() { return e8_negative().gram; }

} // namespace

TEST_CASE("root counts") {
  CHECK(vectors_of_norm({IntMatrix{{-2}}, -2, std::nullopt, std::nullopt}) == std::vector<IntVector>{{1}});
  CHECK(vectors_of_norm({e8(), -2, std::nullopt, std::nullopt}).size() == 120);
  Lattice e8e8 = direct_sum(e8_negative(), e8_negative());
  CHECK(vectors_of_norm({e8e8.gram, -2, std::nullopt, std::nullopt}).size() == 240);
  CHECK(vectors_of_norm({e8(), -4, std::nullopt, std::nullopt}).size() == 2160 / 2);
  CHECK_THROWS_AS(vectors_of_norm({IntMatrix{{2}}, -2, std::nullopt, std::nullopt}), shortvec_error);
  CHECK_THROWS_AS(vectors_of_norm({hyperbolic_plane().gram, -2, std::nullopt, std::nullopt}), shortvec_error);
}

TEST_CASE("completeness against a brute-force oracle") {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> dim(1, 6), num(-7, 7);
  for (int trial = 0; trial < 60; ++trial) {
    std::size_t n = dim(rng);
    IntMatrix g = random_definite(rng, n);
    for (long norm : {-2L, -4L, -6L, -8L}) {
      auto all = brute_force(g, RatVector(n), norm);
      auto half = vectors_of_norm({g, norm, std::nullopt, std::nullopt});
      CHECK(half.size() * 2 == all.size());
      for (auto &v : half) {
        IntVector w = v;
        for (auto &x : w) x = -x;
        CHECK(std::binary_search(all.begin(), all.end(), v));
        CHECK(std::binary_search(all.begin(), all.end(), w));
      }
    }
    // coset with denominator 4
    RatVector shift(n);
    for (auto &s : shift) s = Rational(num(rng), 4);
    Rational target = -Rational(9, 4) * (1 + trial % 3);
    CHECK(vectors_of_norm({g, target, shift, std::nullopt}) == brute_force(g, shift, target));
  }
}

TEST_CASE("congruence queries") {
  std::mt19937 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    IntMatrix g = random_definite(rng, 3);
    IntVector r{1, 0, 1};
    auto got = vectors_of_norm({g, -36, std::nullopt, Congruence{2, r}});
    std::vector<IntVector> expected;
    for (auto &v : brute_force(g, RatVector(3), -36))
      if ((v[0] - 1) % 2 == 0 && v[1] % 2 == 0 && (v[2] - 1) % 2 == 0) expected.push_back(v);
    CHECK(got == expected);
  }
}

TEST_CASE("lines of small polarized lattices") {
  PolarizedLattice single(Lattice(IntMatrix{{4, 1}, {1, -2}}), IntVector{1, 0});
  CHECK(lines_of_polarized(single) == std::vector<IntVector>{{0, 1}});
  CHECK(pencil_members(single, IntVector{0, 1}).empty());

  IntMatrix plane(4, 4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) plane(i, j) = i == j ? -2 : 1;
  PolarizedLattice p(Lattice(plane), IntVector{1, 1, 1, 1});
  auto lines = lines_of_polarized(p);
  CHECK(lines.size() == 4);
  CHECK(pencil_members(p, lines[0]).size() == 3);
  PolarizedFrame frame(p);
  CHECK(frame.vectors(0, -2).empty());
  CHECK(frame.h_divisor() == 1);
}
