#include "doctest.h"
#include "k3/quartics.hpp"

#include <random>
#include <set>

using namespace k3;

namespace {

const NumberField kSqrt2{FieldTag::Sqrt2};

NFElement q2(long n, long d = 1) { return NFElement(kSqrt2, make_rational(n, d)); }

NFPoint random_point(std::mt19937 &rng, const NumberField &f) {
  std::uniform_int_distribution<long> d(-9, 9);
  NFPoint p;
  for (auto &x : p) {
    std::vector<Rational> c(static_cast<std::size_t>(f.degree()));
    for (auto &r : c) r = d(rng);
    x = NFElement(f, c);
  }
  return p;
}

std::size_t planes_through(const Configuration &c, int line) {
  std::size_t n = 0;
  for (const auto &p : planes_of(c))
    if (std::find(p.begin(), p.end(), line) != p.end()) ++n;
  return n;
}

} // namespace

TEST_CASE("square roots in Q(sqrt2)") {
  const NFElement e = nf::sqrt2();
  auto r = nf_sqrt(q2(3) + q2(2) * e);
  REQUIRE(r);
  CHECK(*r * *r == q2(3) + q2(2) * e);
  CHECK(nf_sqrt(q2(2)) == e);
  CHECK(nf_sqrt(q2(9, 4)) == q2(3, 2));
  CHECK(!nf_sqrt(q2(3)));
  CHECK(!nf_sqrt(q2(1) + e));
  CHECK(!nf_sqrt(q2(-4)));
  std::mt19937 rng(11);
  std::uniform_int_distribution<long> d(-20, 20);
  for (int i = 0; i < 50; ++i) {
    const NFElement x = q2(d(rng), 1 + (d(rng) + 20) % 5) + q2(d(rng)) * e;
    auto s = nf_sqrt(x * x);
    REQUIRE(s);
    CHECK((*s == x || *s == -x));
  }
}

TEST_CASE("projective lines are stored canonically") {
  std::mt19937 rng(3);
  for (const NumberField f : {NumberField{FieldTag::Sqrt2}, NumberField{FieldTag::Cyclotomic12}}) {
    for (int i = 0; i < 20; ++i) {
      const NFPoint a = random_point(rng, f), b = random_point(rng, f);
      const ProjLine l = ProjLine::through(a, b);
      const NFElement s = NFElement(f, Rational(3)), t = NFElement(f, Rational(-2));
      NFPoint c, d;
      for (int k = 0; k < 4; ++k) {
        c[k] = s * a[k] + t * b[k];
        d[k] = a[k] - b[k];
      }
      CHECK(ProjLine::through(c, d) == l);
      CHECK(ProjLine::through(b, a) == l);
      CHECK(l.contains(c));
      CHECK(!l.contains(random_point(rng, f)));
    }
  }
  const NFPoint p = nf_point(kSqrt2, {1, 2, 3, 4});
  CHECK_THROWS_AS(ProjLine::through(p, p), quartic_error);
  CHECK_THROWS_AS(ProjLine::cut_out_by(p, p), quartic_error);
  // the kernel of two forms is orthogonal to both
  const ProjLine k = ProjLine::cut_out_by(nf_point(kSqrt2, {1, 0, 2, 0}), nf_point(kSqrt2, {0, 1, 0, -1}));
  for (const auto &r : k.rows()) {
    CHECK((r[0] + q2(2) * r[2]).is_zero());
    CHECK((r[1] - r[3]).is_zero());
  }
}

TEST_CASE("the quartic Y and its two descriptions") {
  const QuarticSurface y = y56_quartic();
  auto r = y.ratio_to(y56_quartic_from_phi());
  REQUIRE(r);
  CHECK(*r == -nf::sqrt2() / q2(2));
  CHECK(y.terms().size() == 6);
  CHECK(y.coefficient({3, 0, 0, 1}) == q2(4));
  CHECK(y.coefficient({1, 0, 0, 3}) == q2(-4));
  CHECK(y.coefficient({0, 3, 1, 0}) == -nf::sqrt2());
  CHECK_THROWS_AS(QuarticSurface(kSqrt2, {{{3, 0, 0, 0}, q2(1)}}), quartic_error);
  CHECK_THROWS_AS(QuarticSurface(kSqrt2, {{{4, 0, 0, 0}, q2(0)}}), quartic_error);
  // evaluation agrees with restriction at (s,t) = (1,1)
  std::mt19937 rng(5);
  for (int i = 0; i < 10; ++i) {
    const NFPoint a = random_point(rng, kSqrt2), b = random_point(rng, kSqrt2);
    NFPoint c;
    for (int k = 0; k < 4; ++k) c[k] = a[k] + b[k];
    NFElement sum = q2(0);
    for (const auto &x : y.restrict_to(a, b)) sum += x;
    CHECK(sum == y.evaluate(c));
    CHECK(y.restrict_to(a, b)[0] == y.evaluate(a));
    CHECK(y.restrict_to(a, b)[4] == y.evaluate(b));
  }
}

TEST_CASE("line containment and intersection") {
  const QuarticSurface y = y56_quartic();
  const NFElement e = nf::sqrt2(), one = q2(1), o = q2(0);
  const ProjLine m1 = ProjLine::cut_out_by({one, o, o, o}, {o, one, o, o});
  const ProjLine m2 = ProjLine::cut_out_by({o, o, one, o}, {o, o, o, one});
  const ProjLine p1 = ProjLine::through({e - one, one, o, o}, {o, o, e - one, one});
  const ProjLine p3 = ProjLine::through({one - e, one, o, o}, {o, o, one - e, one});
  CHECK(line_on_surface(m1, y));
  CHECK(line_on_surface(p1, y));
  CHECK(!lines_meet(m1, m2));
  CHECK(lines_meet(p1, m1));
  CHECK(lines_meet(p1, m2));
  CHECK(!lines_meet(p1, p3));
  CHECK_THROWS_AS(lines_meet(p1, p1), quartic_error);
  std::mt19937 rng(17);
  for (int i = 0; i < 20; ++i)
    CHECK(!line_on_surface(ProjLine::through(random_point(rng, kSqrt2), random_point(rng, kSqrt2)), y));
  CHECK_THROWS_AS(line_on_surface(m1, schur_quartic()), field_error);
}

TEST_CASE("Schur's quartic") {
  const QuarticSurface x = schur_quartic();
  const NumberField f = x.field();
  CHECK(nf::sqrt3() * nf::sqrt3() == NFElement(f, Rational(3)));

  const auto g = schur_binary_group();
  CHECK(g.size() == 48);
  // the kernel of GL(2) -> PGL(2) restricted to the group is generated by i
  std::size_t scalars = 0;
  for (const auto &m : g)
    if (m[0][1].is_zero() && m[1][0].is_zero() && m[0][0] == m[1][1]) {
      ++scalars;
      CHECK(m[0][0].pow(4) == NFElement(f, Rational(1)));
    }
  CHECK(scalars == 4);

  // z1 = 0, z3 = 0 as printed for k = 0 is not on the surface; z0 = 0, z2 = 0 is
  const NFElement one(f, Rational(1)), o(f);
  CHECK(!line_on_surface(ProjLine::cut_out_by({o, one, o, o}, {o, o, o, one}), x));
  CHECK(line_on_surface(ProjLine::cut_out_by({one, o, o, o}, {o, o, one, o}), x));

  const SchurLines s = schur_construction();
  CHECK(s.lines.size() == 64);
  CHECK(s.l0_orbit == 48);
  for (const auto &l : s.lines) CHECK(line_on_surface(l, x));

  const FanoConfiguration fano = fano_configuration(s.lines);
  const Configuration &c = fano.config;
  CHECK(c.size() == 64);
  CHECK(c.lattice().rank() == 20);
  CHECK(c.lattice().base.det() == -48);
  CHECK(forms_isomorphic(discriminant_form(c.lattice().base), form_direct_sum(form_v(2), form_cyclic(4, 3))));
  CHECK(format_structure(pencil_structure(c), true) == "(6,0)^16 (4,6)^48");
  for (std::size_t i = 0; i < 64; ++i) CHECK(planes_through(c, fano.index[i]) == (i < 16 ? 6u : 4u));
  for (const auto &p : planes_of(c)) CHECK(segre_count_check(c, p).ok());
  CHECK(skew_lemma_audit(c).empty());

  const std::vector<std::size_t> expected{8, 4, 28, 4};
  const auto real = schur_real_structures();
  REQUIRE(real.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(real[i].is_involution());
    CHECK(real[i].preserves(x));
    CHECK(real_line_count(s.lines, real[i]) == expected[i]);
  }
  // z -> diag(1,1,2,1) conj(z) squares to a non-scalar matrix
  NFMatrix4 bad = nf_identity(f);
  bad[2][2] = NFElement(f, Rational(2));
  CHECK(!SemilinearMap::antilinear(bad).is_involution());
  CHECK_THROWS_AS(real_line_count(s.lines, SemilinearMap::antilinear(bad)), quartic_error);
}

TEST_CASE("automorphism groups") {
  const QuarticSurface x = schur_quartic();
  const auto s = schur_lines();
  const AutomorphismAudit a = automorphism_audit(x, schur_automorphism_generators(), s);
  CHECK(a.order == 1152);
  CHECK(a.faithful);
  // the sixteen and the orbit of l0
  CHECK(a.line_orbits == 2);
  const ProjectiveGroup aut0 = ProjectiveGroup::generate(schur_automorphism_generators(false));
  CHECK(aut0.order() == 576);
  CHECK(aut0.orbit(s[16]).size() == 48);

  const QuarticSurface y = y56_quartic();
  const auto yl = y56_lines();
  const AutomorphismAudit b = automorphism_audit(y, y56_automorphism_generators(), yl);
  CHECK(b.order == 32);
  CHECK(b.faithful);
  CHECK(b.kernel == 1);

  const AutomorphismAudit id = automorphism_audit(y, {SemilinearMap::linear(nf_identity(kSqrt2))}, yl);
  CHECK(id.order == 1);
  CHECK(id.line_orbits == 56);

  NFMatrix4 swap03 = nf_identity(kSqrt2);
  swap03[0][0] = swap03[3][3] = q2(0);
  swap03[0][3] = swap03[3][0] = q2(1);
  CHECK(!SemilinearMap::linear(swap03).preserves(y));
  CHECK_THROWS_AS(automorphism_audit(y, {SemilinearMap::linear(swap03)}, yl), quartic_error);
  CHECK_THROWS_AS(automorphism_audit(y, {standard_conjugation(kSqrt2)}, yl), quartic_error);
  for (const auto &g : y56_automorphism_generators()) CHECK(g.preserves(y));
}

TEST_CASE("the 56 lines of Y") {
  const QuarticSurface y = y56_quartic();
  const Y56Lines c = y56_construction();
  CHECK(c.lines.size() == 56);
  CHECK(c.l_lines.size() == 10);
  CHECK(c.planes.size() == 6);
  CHECK(c.quadrics.size() == 16);
  CHECK(std::set<ProjLine>(c.lines.begin(), c.lines.end()).size() == 56);
  for (const auto &l : c.lines) CHECK(line_on_surface(l, y));
  const auto bad = y56_incidence_audit(c);
  CHECK(bad.empty());
  for (const auto &b : bad) MESSAGE(b);

  // first plane row: z1 = 0 with the new lines z0 = z3 and z0 = -z3
  const NFElement one = q2(1), o = q2(0);
  CHECK(c.planes[0].plane == "z1=0");
  CHECK(c.l_names[c.planes[0].l] == "B1");
  CHECK(c.lines[c.planes[0].r[0]] == ProjLine::cut_out_by({o, one, o, o}, {one, o, o, -one}));
  CHECK(c.lines[c.planes[0].r[1]] == ProjLine::cut_out_by({o, one, o, o}, {one, o, o, one}));

  // the quadric u + 2e v, as printed, misses A1 = l(1/e, -2) while 2e u + v contains it
  const NFElement e = nf::sqrt2(), u = e / q2(2), v = q2(-2);
  CHECK(!(u + q2(2) * e * v).is_zero());
  CHECK((q2(2) * e * u + v).is_zero());
  CHECK(c.quadrics[0].chi == "2e*u+v");
  CHECK(c.l_names[c.quadrics[0].quadruple[0]] == "A1");

  // every line is real
  CHECK(real_line_count(c.lines, standard_conjugation(kSqrt2)) == 56);

  const FanoConfiguration fano = fano_configuration(c.lines);
  const Configuration &cf = fano.config;
  CHECK(cf.lattice().rank() == 20);
  CHECK(cf.lattice().base.det() == -64);
  CHECK(forms_isomorphic(discriminant_form(cf.lattice().base), form_direct_sum(form_cyclic(3, 2), form_cyclic(63, 32))));
  CHECK(format_structure(pencil_structure(cf), true) == "(4,4)^32 (3,7)^24");
  for (const auto &p : planes_of(cf)) CHECK(segre_count_check(cf, p).ok());
  CHECK(skew_lemma_audit(cf).empty());
  CHECK(totally_reflexive_test(cf.lattice().base));
  const auto t = transcendental_candidates(cf.lattice());
  REQUIRE(t.size() == 1);
  CHECK(t[0].to_string() == "[2,0,32]");
}

TEST_CASE("Fermat quartic") {
  const auto lines = fermat_lines();
  CHECK(lines.size() == 48);
  const QuarticSurface x = fermat_quartic();
  for (const auto &l : lines) CHECK(line_on_surface(l, x));
  const FanoConfiguration fano = fano_configuration(lines);
  // every line meets 14 others in two triangles and eight single lines
  // (floating-point plane grouping of the standard lines)
  CHECK(format_structure(pencil_structure(fano.config), true) == "(2,8)^48");
  CHECK(fano.config.lattice().rank() == 20);
  for (std::size_t i = 0; i < 48; ++i) {
    std::size_t meets = 0;
    for (std::size_t j = 0; j < 48; ++j)
      if (i != j && lines_meet(lines[i], lines[j])) ++meets;
    CHECK(meets == 14);
    CHECK(fano.config.valency(fano.index[i]) == 14);
  }
  // no line is defined over the reals
  CHECK(real_line_count(lines, standard_conjugation(x.field())) == 0);
}

TEST_CASE("configurations of few lines") {
  const Y56Lines c = y56_construction();
  const auto &p = c.planes[0];
  // m_1, b_1 and the two residual lines of the plane z1 = 0
  std::vector<ProjLine> plane{c.lines[0], c.lines[c.l_lines[p.l]], c.lines[p.r[0]], c.lines[p.r[1]]};
  const FanoConfiguration fano = fano_configuration(plane);
  CHECK(fano.config.size() == 4);
  CHECK(fano.config.lattice().rank() == 4);
  // the lines span with h = a1 + a2 + a3 + a4; Gram J - 3I of det -27
  CHECK(fano.config.lattice().base.det() == -27);
  CHECK(planes_of(fano.config).size() == 1);

  std::vector<ProjLine> twice{c.lines[0], c.lines[0]};
  CHECK_THROWS_AS(fano_configuration(twice), quartic_error);
  // three concurrent lines that are not coplanar fail the triangle check
  const NFElement one = q2(1), o = q2(0);
  std::vector<ProjLine> tripod{ProjLine::through({one, o, o, o}, {o, one, o, o}), ProjLine::through({one, o, o, o}, {o, o, one, o}),
                               ProjLine::through({one, o, o, o}, {o, o, o, one})};
  CHECK_THROWS_AS(fano_configuration(tripod), quartic_error);
}
