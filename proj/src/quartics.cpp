#include "k3/quartics.hpp"

#include "k3/lattice.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

namespace k3 {

namespace {

NFElement zero_of(const NumberField &f) { return NFElement(f); }
NFElement one_of(const NumberField &f) { return NFElement(f, Rational(1)); }
NFElement rat(const NumberField &f, long num, long den = 1) { return NFElement(f, make_rational(num, den)); }

// Row reduction in place; returns the pivot columns. Rows end up in reduced
// echelon form with zero rows at the bottom.
std::vector<int> reduce_rows(std::vector<NFPoint> &rows) {
  std::vector<int> pivots;
  std::size_t r = 0;
  for (int c = 0; c < 4 && r < rows.size(); ++c) {
    std::size_t k = r;
    while (k < rows.size() && rows[k][c].is_zero()) ++k;
    if (k == rows.size()) continue;
    std::swap(rows[k], rows[r]);
    const NFElement inv = rows[r][c].inverse();
    for (auto &x : rows[r]) x *= inv;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || rows[i][c].is_zero()) continue;
      const NFElement f = rows[i][c];
      for (int j = 0; j < 4; ++j) rows[i][j] -= f * rows[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

using Binary = std::vector<NFElement>; // coefficient of t^j at index j

Binary times_linear(const Binary &p, const NFElement &a, const NFElement &b) {
  Binary r(p.size() + 1, zero_of(a.field()));
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (p[j].is_zero()) continue;
    r[j] += p[j] * a;
    r[j + 1] += p[j] * b;
  }
  return r;
}

using Poly4 = std::map<Exponent, NFElement>;

void add_term(Poly4 &p, const Exponent &e, const NFElement &c) {
  if (c.is_zero()) return;
  auto it = p.find(e);
  if (it == p.end()) {
    p.emplace(e, c);
    return;
  }
  it->second += c;
  if (it->second.is_zero()) p.erase(it);
}

Poly4 multiply(const Poly4 &a, const Poly4 &b) {
  Poly4 r;
  for (const auto &[ea, ca] : a)
    for (const auto &[eb, cb] : b) {
      Exponent e;
      for (int i = 0; i < 4; ++i) e[i] = ea[i] + eb[i];
      add_term(r, e, ca * cb);
    }
  return r;
}

Poly4 linear_form(const NFPoint &row) {
  Poly4 p;
  for (int j = 0; j < 4; ++j) {
    Exponent e{0, 0, 0, 0};
    e[j] = 1;
    add_term(p, e, row[j]);
  }
  return p;
}

NFMatrix4 conjugate_matrix(NFMatrix4 m) {
  for (auto &row : m)
    for (auto &x : row) x = x.conjugate();
  return m;
}

// Univariate polynomials, lowest degree first, trailing zeros trimmed.
using Uni = std::vector<NFElement>;

void trim(Uni &p) {
  while (!p.empty() && p.back().is_zero()) p.pop_back();
}

Uni uni_mod(Uni a, const Uni &b) {
  trim(a);
  const NFElement lead_inv = b.back().inverse();
  while (a.size() >= b.size()) {
    const NFElement f = a.back() * lead_inv;
    const std::size_t shift = a.size() - b.size();
    for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] -= f * b[i];
    a.pop_back();
    trim(a);
  }
  return a;
}

Uni uni_gcd(Uni a, Uni b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    Uni r = uni_mod(a, b);
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.empty()) {
    const NFElement inv = a.back().inverse();
    for (auto &x : a) x *= inv;
  }
  return a;
}

// Coefficients c_0..c_n of the polynomial taking values[k] at k = 0..n.
Uni interpolate(const std::vector<NFElement> &values) {
  const std::size_t n = values.size();
  const NumberField f = values[0].field();
  // Newton divided differences at the nodes 0, 1, ..., n-1
  std::vector<NFElement> d = values;
  for (std::size_t j = 1; j < n; ++j)
    for (std::size_t i = n - 1; i >= j; --i) d[i] = (d[i] - d[i - 1]) / rat(f, static_cast<long>(j));
  Uni poly(1, d[n - 1]);
  for (std::size_t k = n - 1; k-- > 0;) {
    // poly = poly * (x - k) + d[k]
    Uni next(poly.size() + 1, zero_of(f));
    for (std::size_t i = 0; i < poly.size(); ++i) {
      next[i + 1] += poly[i];
      next[i] -= poly[i] * rat(f, static_cast<long>(k));
    }
    next[0] += d[k];
    poly = std::move(next);
  }
  trim(poly);
  return poly;
}

std::optional<Rational> rational_sqrt(const Rational &q) {
  if (q < 0) return std::nullopt;
  mpz_class n = q.get_num(), d = q.get_den();
  if (!mpz_perfect_square_p(n.get_mpz_t()) || !mpz_perfect_square_p(d.get_mpz_t())) return std::nullopt;
  mpz_class rn, rd;
  mpz_sqrt(rn.get_mpz_t(), n.get_mpz_t());
  mpz_sqrt(rd.get_mpz_t(), d.get_mpz_t());
  return make_rational(rn, rd);
}

std::string exponent_string(const Exponent &e) {
  std::string s;
  for (int i = 0; i < 4; ++i) {
    if (e[i] == 0) continue;
    if (!s.empty()) s += '*';
    s += "z" + std::to_string(i);
    if (e[i] > 1) s += "^" + std::to_string(e[i]);
  }
  return s;
}

bool coplanar(const ProjLine &a, const ProjLine &b, const ProjLine &c) {
  std::vector<NFPoint> rows{a.rows()[0], a.rows()[1], b.rows()[0], b.rows()[1], c.rows()[0], c.rows()[1]};
  return reduce_rows(rows).size() == 3;
}

} // namespace

NFPoint nf_point(const NumberField &f, const std::array<Rational, 4> &z) {
  return {NFElement(f, z[0]), NFElement(f, z[1]), NFElement(f, z[2]), NFElement(f, z[3])};
}

NFMatrix4 nf_identity(const NumberField &f) {
  NFMatrix4 m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m[i][j] = i == j ? one_of(f) : zero_of(f);
  return m;
}

NFMatrix4 nf_multiply(const NFMatrix4 &a, const NFMatrix4 &b) {
  NFMatrix4 r;
  const NumberField f = a[0][0].field();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      NFElement s = zero_of(f);
      for (int k = 0; k < 4; ++k)
        if (!a[i][k].is_zero() && !b[k][j].is_zero()) s += a[i][k] * b[k][j];
      r[i][j] = s;
    }
  return r;
}

NFPoint nf_apply(const NFMatrix4 &g, const NFPoint &z) {
  NFPoint r;
  for (int i = 0; i < 4; ++i) {
    NFElement s = zero_of(z[0].field());
    for (int k = 0; k < 4; ++k)
      if (!g[i][k].is_zero() && !z[k].is_zero()) s += g[i][k] * z[k];
    r[i] = s;
  }
  return r;
}

NFElement nf_det(const NFMatrix4 &m) {
  std::vector<NFPoint> rows(m.begin(), m.end());
  const NumberField f = m[0][0].field();
  NFElement det = one_of(f);
  for (int c = 0; c < 4; ++c) {
    int k = c;
    while (k < 4 && rows[k][c].is_zero()) ++k;
    if (k == 4) return zero_of(f);
    if (k != c) {
      std::swap(rows[k], rows[c]);
      det = -det;
    }
    det *= rows[c][c];
    const NFElement inv = rows[c][c].inverse();
    for (int i = c + 1; i < 4; ++i) {
      if (rows[i][c].is_zero()) continue;
      const NFElement f2 = rows[i][c] * inv;
      for (int j = c; j < 4; ++j) rows[i][j] -= f2 * rows[c][j];
    }
  }
  return det;
}

NFMatrix4 projective_normal_form(const NFMatrix4 &m) {
  for (const auto &row : m)
    for (const auto &x : row)
      if (!x.is_zero()) {
        const NFElement inv = x.inverse();
        NFMatrix4 r = m;
        for (auto &rr : r)
          for (auto &y : rr) y *= inv;
        return r;
      }
  throw quartic_error("zero matrix");
}

std::optional<NFElement> nf_sqrt(const NFElement &a) {
  const NumberField f = a.field();
  if (f.tag == FieldTag::Rationals) {
    auto r = rational_sqrt(a.coords()[0]);
    if (!r) return std::nullopt;
    return NFElement(f, *r);
  }
  if (f.tag != FieldTag::Sqrt2) throw field_error("square roots are only implemented over Q and Q(sqrt2)");
  // (x + y sqrt2)^2 = p + q sqrt2: x^2 + 2 y^2 = p, 2 x y = q
  const Rational p = a.coords()[0], q = a.coords()[1];
  if (q == 0) {
    if (auto r = rational_sqrt(p)) return NFElement(f, {*r, Rational(0)});
    if (auto r = rational_sqrt(p / 2)) return NFElement(f, {Rational(0), *r});
    return std::nullopt;
  }
  // x^2 is a root of X^2 - p X + q^2/2
  auto disc = rational_sqrt(p * p - 2 * q * q);
  if (!disc) return std::nullopt;
  for (const Rational &x2 : {Rational((p + *disc) / 2), Rational((p - *disc) / 2)}) {
    auto x = rational_sqrt(x2);
    if (!x || *x == 0) continue;
    NFElement r(f, {*x, Rational(q / (2 * *x))});
    if (r * r == a) return r;
  }
  return std::nullopt;
}

// QuarticSurface

QuarticSurface::QuarticSurface(NumberField f, std::map<Exponent, NFElement> terms) : f_(f) {
  for (auto &[e, c] : terms) {
    if (e[0] < 0 || e[1] < 0 || e[2] < 0 || e[3] < 0 || e[0] + e[1] + e[2] + e[3] != 4)
      throw quartic_error("monomial " + exponent_string(e) + " is not of degree 4");
    if (c.field() != f) throw field_error("coefficient field does not match surface field");
    if (!c.is_zero()) terms_.emplace(e, c);
  }
  if (terms_.empty()) throw quartic_error("zero form");
}

NFElement QuarticSurface::coefficient(const Exponent &e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? zero_of(f_) : it->second;
}

NFElement QuarticSurface::evaluate(const NFPoint &z) const {
  NFElement s = zero_of(f_);
  for (const auto &[e, c] : terms_) {
    NFElement t = c;
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k < e[i]; ++k) t *= z[i];
    s += t;
  }
  return s;
}

std::vector<NFElement> QuarticSurface::restrict_to(const NFPoint &a, const NFPoint &b) const {
  for (int i = 0; i < 4; ++i)
    if (a[i].field() != f_ || b[i].field() != f_) throw field_error("point field does not match surface field");
  std::vector<NFElement> out(5, zero_of(f_));
  for (const auto &[e, c] : terms_) {
    Binary p{c};
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k < e[i]; ++k) p = times_linear(p, a[i], b[i]);
    for (int j = 0; j < 5; ++j) out[j] += p[j];
  }
  return out;
}

QuarticSurface QuarticSurface::pull_back(const NFMatrix4 &g) const {
  std::array<Poly4, 4> subs;
  for (int i = 0; i < 4; ++i) subs[i] = linear_form(g[i]);
  Poly4 total;
  for (const auto &[e, c] : terms_) {
    Poly4 p;
    p.emplace(Exponent{0, 0, 0, 0}, c);
    for (int i = 0; i < 4; ++i)
      for (int k = 0; k < e[i]; ++k) p = multiply(p, subs[i]);
    for (const auto &[ep, cp] : p) add_term(total, ep, cp);
  }
  if (total.empty()) throw quartic_error("pull-back by a singular matrix vanishes");
  return QuarticSurface(f_, std::move(total));
}

QuarticSurface QuarticSurface::conjugate() const {
  std::map<Exponent, NFElement> t;
  for (const auto &[e, c] : terms_) t.emplace(e, c.conjugate());
  return QuarticSurface(f_, std::move(t));
}

std::optional<NFElement> QuarticSurface::ratio_to(const QuarticSurface &other) const {
  if (other.f_ != f_ || other.terms_.size() != terms_.size()) return std::nullopt;
  const auto &[e0, c0] = *terms_.begin();
  const NFElement r = other.coefficient(e0) / c0;
  for (const auto &[e, c] : terms_)
    if (other.coefficient(e) != r * c) return std::nullopt;
  return r;
}

std::string QuarticSurface::to_string() const {
  std::ostringstream out;
  bool first = true;
  for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
    out << (first ? "" : " + ") << "(" << it->second.to_string() << ")*" << exponent_string(it->first);
    first = false;
  }
  return out.str();
}

// ProjLine

ProjLine ProjLine::through(const NFPoint &a, const NFPoint &b) {
  std::vector<NFPoint> rows{a, b};
  if (reduce_rows(rows).size() != 2) throw quartic_error("points do not span a line");
  return ProjLine({rows[0], rows[1]});
}

ProjLine ProjLine::cut_out_by(const NFPoint &f, const NFPoint &g) {
  std::vector<NFPoint> rows{f, g};
  const auto pivots = reduce_rows(rows);
  if (pivots.size() != 2) throw quartic_error("linear forms are dependent");
  const NumberField fld = f[0].field();
  std::vector<NFPoint> kernel;
  for (int c = 0; c < 4; ++c) {
    if (std::find(pivots.begin(), pivots.end(), c) != pivots.end()) continue;
    NFPoint v{zero_of(fld), zero_of(fld), zero_of(fld), zero_of(fld)};
    v[c] = one_of(fld);
    for (int k = 0; k < 2; ++k) v[pivots[k]] = -rows[k][c];
    kernel.push_back(v);
  }
  return through(kernel[0], kernel[1]);
}

bool ProjLine::contains(const NFPoint &z) const {
  std::vector<NFPoint> rows{rows_[0], rows_[1], z};
  return reduce_rows(rows).size() == 2;
}

std::string ProjLine::to_string() const {
  std::string s;
  for (int r = 0; r < 2; ++r) {
    s += r ? " ; " : "";
    for (int j = 0; j < 4; ++j) s += (j ? " " : "") + rows_[r][j].to_string();
  }
  return s;
}

// SemilinearMap

NFPoint SemilinearMap::apply(const NFPoint &z) const {
  if (automorphism == NFAuto::Identity) return nf_apply(matrix, z);
  NFPoint c;
  for (int i = 0; i < 4; ++i) c[i] = z[i].conjugate();
  return nf_apply(matrix, c);
}

ProjLine SemilinearMap::apply(const ProjLine &l) const { return ProjLine::through(apply(l.rows()[0]), apply(l.rows()[1])); }

SemilinearMap SemilinearMap::then_after(const SemilinearMap &other) const {
  const NFMatrix4 inner = automorphism == NFAuto::Identity ? other.matrix : conjugate_matrix(other.matrix);
  const NFAuto a = automorphism == other.automorphism ? NFAuto::Identity : NFAuto::Conjugate;
  return {nf_multiply(matrix, inner), a};
}

bool SemilinearMap::is_involution() const {
  const NFMatrix4 sq = then_after(*this).matrix;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i == j ? sq[i][j] != sq[0][0] : !sq[i][j].is_zero()) return false;
  return !sq[0][0].is_zero();
}

bool SemilinearMap::preserves(const QuarticSurface &x) const {
  if (nf_det(matrix).is_zero()) return false;
  // sigma(z) lies on X iff X(M z) = 0, resp. conj(X)(conj(M) z) = 0
  const QuarticSurface moved =
      automorphism == NFAuto::Identity ? x.pull_back(matrix) : x.conjugate().pull_back(conjugate_matrix(matrix));
  return x.ratio_to(moved).has_value();
}

bool line_on_surface(const ProjLine &l, const QuarticSurface &x) {
  if (l.field() != x.field()) throw field_error("line and surface are over different fields");
  for (const auto &c : x.restrict_to(l.rows()[0], l.rows()[1]))
    if (!c.is_zero()) return false;
  return true;
}

bool lines_meet(const ProjLine &a, const ProjLine &b) {
  if (a == b) throw quartic_error("a line is not compared with itself");
  return nf_det({a.rows()[0], a.rows()[1], b.rows()[0], b.rows()[1]}).is_zero();
}

// Surfaces

QuarticSurface schur_quartic() {
  const NumberField f{FieldTag::Cyclotomic12};
  return QuarticSurface(f, {{{4, 0, 0, 0}, rat(f, 1)},
                            {{1, 3, 0, 0}, rat(f, -1)},
                            {{0, 0, 4, 0}, rat(f, -1)},
                            {{0, 0, 1, 3}, rat(f, 1)}});
}

QuarticSurface fermat_quartic() {
  const NumberField f{FieldTag::Cyclotomic8};
  return QuarticSurface(f, {{{4, 0, 0, 0}, rat(f, 1)},
                            {{0, 4, 0, 0}, rat(f, 1)},
                            {{0, 0, 4, 0}, rat(f, 1)},
                            {{0, 0, 0, 4}, rat(f, 1)}});
}

QuarticSurface y56_quartic() {
  const NumberField f{FieldTag::Sqrt2};
  const NFElement e = nf::sqrt2();
  return QuarticSurface(f, {{{2, 1, 1, 0}, rat(f, 3) * e},
                            {{0, 1, 1, 2}, rat(f, 3) * e},
                            {{0, 3, 1, 0}, -e},
                            {{0, 1, 3, 0}, -e},
                            {{3, 0, 0, 1}, rat(f, 4)},
                            {{1, 0, 0, 3}, rat(f, -4)}});
}

QuarticSurface y56_quartic_from_phi() {
  const NumberField f{FieldTag::Sqrt2};
  const NFElement e = nf::sqrt2();
  // exponents of (u, v)
  const std::map<std::pair<int, int>, NFElement> phi1{{{0, 1}, rat(f, -3)}, {{0, 3}, rat(f, 1)}, {{1, 0}, rat(f, 2) * e}};
  const std::map<std::pair<int, int>, NFElement> phi2{{{3, 0}, rat(f, 2) * e}, {{0, 1}, rat(f, -1)}, {{2, 1}, rat(f, 3)}};
  // z_1^a z_3^b phi(z_0/z_1, z_2/z_3) with u -> z0/z1, v -> z2/z3
  std::map<Exponent, NFElement> terms;
  auto homogenize = [&](const auto &phi, int a, int b, const NFElement &sign) {
    for (const auto &[uv, c] : phi) {
      const Exponent ex{uv.first, a - uv.first, uv.second, b - uv.second};
      auto it = terms.find(ex);
      if (it == terms.end()) terms.emplace(ex, sign * c);
      else it->second += sign * c;
    }
  };
  homogenize(phi1, 1, 3, rat(f, 1));
  homogenize(phi2, 3, 1, rat(f, -1));
  return QuarticSurface(f, std::move(terms));
}

// Schur

using Mat2 = std::array<std::array<NFElement, 2>, 2>;

std::vector<Mat2> schur_binary_group() {
  const NumberField f{FieldTag::Cyclotomic12};
  const NFElement s = nf::sqrt3().inverse();
  if (nf::sqrt3() * nf::sqrt3() != rat(f, 3)) throw quartic_error("sqrt3 constant is wrong");
  const std::vector<Mat2> gens{Mat2{{{s, -s}, {rat(f, -2) * s, -s}}},
                               Mat2{{{rat(f, 1), rat(f, 0)}, {rat(f, 0), nf::omega12()}}}};
  auto mul = [&](const Mat2 &a, const Mat2 &b) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
    return r;
  };
  const Mat2 id{{{rat(f, 1), rat(f, 0)}, {rat(f, 0), rat(f, 1)}}};
  std::set<Mat2> seen{id};
  std::vector<Mat2> out{id};
  for (std::size_t k = 0; k < out.size(); ++k)
    for (const auto &g : gens) {
      Mat2 m = mul(g, out[k]);
      if (seen.insert(m).second) out.push_back(m);
      if (out.size() > 1000) throw quartic_error("binary group does not close");
    }
  // u(u^3 - v^3) is preserved literally
  for (const auto &m : out) {
    const NFElement u = m[0][0] + m[0][1], v = m[1][0] + m[1][1]; // image of (1,1)
    const NFElement u2 = m[0][0] + rat(f, 2) * m[0][1], v2 = m[1][0] + rat(f, 2) * m[1][1];
    const NFElement u3 = rat(f, 3) * m[0][0] - m[0][1], v3 = rat(f, 3) * m[1][0] - m[1][1];
    const NFElement u4 = m[0][0], v4 = m[1][0];
    const NFElement u5 = m[0][0] + rat(f, 5) * m[0][1], v5 = m[1][0] + rat(f, 5) * m[1][1];
    auto phi = [](const NFElement &x, const NFElement &y) { return x * (x * x * x - y * y * y); };
    if (phi(u, v) != phi(rat(f, 1), rat(f, 1)) || phi(u2, v2) != phi(rat(f, 1), rat(f, 2)) ||
        phi(u3, v3) != phi(rat(f, 3), rat(f, -1)) || phi(u4, v4) != phi(rat(f, 1), rat(f, 0)) ||
        phi(u5, v5) != phi(rat(f, 1), rat(f, 5)))
      throw quartic_error("binary group element does not preserve the form");
  }
  return out;
}

namespace {

NFMatrix4 block_matrix(const Mat2 &a, const Mat2 &b) {
  const NumberField f = a[0][0].field();
  NFMatrix4 m = nf_identity(f);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      m[i][j] = a[i][j];
      m[2 + i][2 + j] = b[i][j];
    }
  return m;
}

NFMatrix4 permutation_matrix(const NumberField &f, const std::array<int, 4> &target, const std::array<long, 4> &sign) {
  // z'_i = sign_i z_{target_i}
  NFMatrix4 m;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m[i][j] = j == target[i] ? rat(f, sign[i]) : zero_of(f);
  return m;
}

} // namespace

std::vector<SemilinearMap> schur_automorphism_generators(bool with_swap) {
  const NumberField f{FieldTag::Cyclotomic12};
  const NFElement s = nf::sqrt3().inverse();
  const Mat2 id{{{rat(f, 1), rat(f, 0)}, {rat(f, 0), rat(f, 1)}}};
  const Mat2 g1{{{s, -s}, {rat(f, -2) * s, -s}}};
  const Mat2 g2{{{rat(f, 1), rat(f, 0)}, {rat(f, 0), nf::omega12()}}};
  std::vector<SemilinearMap> gens{SemilinearMap::linear(block_matrix(g1, id)), SemilinearMap::linear(block_matrix(g2, id)),
                                  SemilinearMap::linear(block_matrix(id, g1)), SemilinearMap::linear(block_matrix(id, g2))};
  if (with_swap) gens.push_back(SemilinearMap::linear(permutation_matrix(f, {2, 3, 0, 1}, {1, 1, 1, 1})));
  return gens;
}

std::vector<SemilinearMap> schur_real_structures() {
  const NumberField f{FieldTag::Cyclotomic12};
  NFMatrix4 twist = nf_identity(f);
  twist[2][2] = nf::i12();
  twist[3][3] = nf::i12();
  return {SemilinearMap::antilinear(nf_identity(f)), SemilinearMap::antilinear(twist),
          SemilinearMap::antilinear(permutation_matrix(f, {2, 3, 0, 1}, {1, 1, 1, 1})),
          SemilinearMap::antilinear(permutation_matrix(f, {2, 3, 0, 1}, {1, 1, -1, -1}))};
}

SemilinearMap standard_conjugation(const NumberField &f) { return SemilinearMap::antilinear(nf_identity(f)); }

SchurLines schur_construction() {
  const NumberField f{FieldTag::Cyclotomic12};
  const NFElement w = nf::omega12();
  const std::vector<NFElement> roots{rat(f, 0), rat(f, 1), w, w * w};
  const QuarticSurface x = schur_quartic();
  SchurLines out;
  // z0 = k z1, z2 = k' z3 for roots k, k' of u(u^3 - v^3)
  for (const auto &k : roots)
    for (const auto &k2 : roots)
      out.lines.push_back(ProjLine::through({k, rat(f, 1), rat(f, 0), rat(f, 0)}, {rat(f, 0), rat(f, 0), k2, rat(f, 1)}));

  const ProjLine l0 = ProjLine::cut_out_by({rat(f, 1), rat(f, 0), rat(f, -1), rat(f, 0)}, {rat(f, 0), rat(f, 1), rat(f, 0), rat(f, -1)});
  const auto gens = schur_automorphism_generators(false);
  std::set<ProjLine> seen{l0};
  std::vector<ProjLine> orbit{l0};
  for (std::size_t k = 0; k < orbit.size(); ++k)
    for (const auto &g : gens) {
      ProjLine m = g.apply(orbit[k]);
      if (seen.insert(m).second) orbit.push_back(m);
    }
  out.l0_orbit = orbit.size();
  if (orbit.size() != 48) throw quartic_error("orbit of l0 has " + std::to_string(orbit.size()) + " lines, expected 48");
  out.lines.insert(out.lines.end(), orbit.begin(), orbit.end());

  std::set<ProjLine> all(out.lines.begin(), out.lines.end());
  if (all.size() != out.lines.size()) throw quartic_error("repeated line in the Schur construction");
  for (const auto &l : out.lines)
    if (!line_on_surface(l, x)) throw quartic_error("line not on Schur's quartic: " + l.to_string());
  return out;
}

std::vector<ProjLine> schur_lines() { return schur_construction().lines; }

std::vector<ProjLine> fermat_lines() {
  const NumberField f{FieldTag::Cyclotomic8};
  const NFElement z = nf::zeta8();
  // fourth roots of -1
  const std::vector<NFElement> roots{z, z.pow(3), z.pow(5), z.pow(7)};
  const std::array<std::array<int, 4>, 3> pairings{{{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}}};
  const QuarticSurface x = fermat_quartic();
  std::vector<ProjLine> out;
  for (const auto &p : pairings)
    for (const auto &a : roots)
      for (const auto &b : roots) {
        // z_p0 = a z_p1, z_p2 = b z_p3
        NFPoint u{rat(f, 0), rat(f, 0), rat(f, 0), rat(f, 0)}, v = u;
        u[p[0]] = a;
        u[p[1]] = rat(f, 1);
        v[p[2]] = b;
        v[p[3]] = rat(f, 1);
        out.push_back(ProjLine::through(u, v));
      }
  std::set<ProjLine> all(out.begin(), out.end());
  if (all.size() != out.size()) throw quartic_error("repeated line on the Fermat quartic");
  for (const auto &l : out)
    if (!line_on_surface(l, x)) throw quartic_error("line not on the Fermat quartic: " + l.to_string());
  return out;
}

// Y

namespace {

struct QuadricRow {
  std::string chi;
  std::array<const char *, 4> quadruple;
  std::array<NFElement, 4> coeffs; // chi = c0 + c1 u + c2 v + c3 u v
};

// z1 z3 chi(z0/z1, z2/z3) as the bilinear form x^T M y in x = (z0,z1), y = (z2,z3)
Mat2 quadric_matrix(const std::array<NFElement, 4> &c) { return Mat2{{{c[3], c[1]}, {c[2], c[0]}}}; }

NFElement quadric_value(const Mat2 &m, const NFPoint &a, const NFPoint &b) {
  // x_a^T M y_b
  NFElement s = zero_of(a[0].field());
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) s += a[i] * m[i][j] * b[2 + j];
  return s;
}

bool line_in_quadric(const Mat2 &m, const ProjLine &l) {
  const auto &r = l.rows();
  return quadric_value(m, r[0], r[0]).is_zero() && quadric_value(m, r[1], r[1]).is_zero() &&
         (quadric_value(m, r[0], r[1]) + quadric_value(m, r[1], r[0])).is_zero();
}

// The two lines of the ruling through m_1 and m_2, other than those, on Y.
// That ruling consists of the graphs y = lambda A x of the Moebius maps with
// M A antisymmetric; A = adj(M) J.
std::array<ProjLine, 2> quadric_residuals(const QuarticSurface &y, const Mat2 &m) {
  const NumberField f = y.field();
  if ((m[0][0] * m[1][1] - m[0][1] * m[1][0]).is_zero()) throw quartic_error("quadric is singular");
  const Mat2 adj{{{m[1][1], -m[0][1]}, {-m[1][0], m[0][0]}}};
  // A = adj * J with J = [[0,1],[-1,0]]
  const Mat2 a{{{-adj[0][1], adj[0][0]}, {-adj[1][1], adj[1][0]}}};
  auto points = [&](const NFElement &lambda) {
    NFPoint p0{rat(f, 1), rat(f, 0), lambda * a[0][0], lambda * a[1][0]};
    NFPoint p1{rat(f, 0), rat(f, 1), lambda * a[0][1], lambda * a[1][1]};
    return std::array<NFPoint, 2>{p0, p1};
  };
  // each coefficient of Y restricted to the line is a polynomial of degree <= 4 in lambda
  std::array<std::vector<NFElement>, 5> samples;
  for (long k = 0; k <= 4; ++k) {
    const auto p = points(rat(f, k));
    const auto c = y.restrict_to(p[0], p[1]);
    for (int j = 0; j < 5; ++j) samples[j].push_back(c[j]);
  }
  Uni g;
  for (const auto &s : samples) g = uni_gcd(g, interpolate(s));
  // lambda = 0 is m_2; lambda = infinity (degree drop) is m_1
  if (g.size() != 4 || !g[0].is_zero())
    throw quartic_error("unexpected common roots on a quadric (degree " + std::to_string(g.size()) + ")");
  const NFElement qa = g[3], qb = g[2], qc = g[1];
  const NFElement disc = qb * qb - rat(f, 4) * qa * qc;
  if (disc.is_zero()) throw quartic_error("residual quadratic has a double root");
  auto root = nf_sqrt(disc);
  if (!root) throw quartic_error("residual quadratic is irreducible over " + f.name());
  std::array<ProjLine, 2> out{ProjLine::through(points((-qb + *root) / (rat(f, 2) * qa))[0], points((-qb + *root) / (rat(f, 2) * qa))[1]),
                              ProjLine::through(points((-qb - *root) / (rat(f, 2) * qa))[0], points((-qb - *root) / (rat(f, 2) * qa))[1])};
  return out;
}

} // namespace

Y56Lines y56_construction() {
  const NumberField f{FieldTag::Sqrt2};
  const NFElement e = nf::sqrt2(), one = rat(f, 1), o = rat(f, 0);
  const QuarticSurface y = y56_quartic();
  Y56Lines out;
  out.lines.push_back(ProjLine::cut_out_by({one, o, o, o}, {o, one, o, o})); // m_1
  out.lines.push_back(ProjLine::cut_out_by({o, o, one, o}, {o, o, o, one})); // m_2

  // l(u, v) = {z0 = u z1, z2 = v z3}; nullopt stands for infinity
  struct Point {
    const char *name;
    std::optional<NFElement> u, v;
  };
  const std::vector<Point> table{{"P1", e - one, e - one},       {"P2", e + one, -e - one},
                                 {"P3", one - e, one - e},       {"P4", -e - one, e + one},
                                 {"A1", e / rat(f, 2), rat(f, -2)}, {"A2", rat(f, 1, 2), e},
                                 {"C1", -e / rat(f, 2), rat(f, 2)}, {"C2", rat(f, -1, 2), -e},
                                 {"B1", std::nullopt, std::nullopt}, {"B2", o, o}};
  for (const auto &p : table) {
    const NFPoint a = p.u ? NFPoint{*p.u, one, o, o} : NFPoint{one, o, o, o};
    const NFPoint b = p.v ? NFPoint{o, o, *p.v, one} : NFPoint{o, o, one, o};
    out.l_names.push_back(p.name);
    out.l_lines.push_back(static_cast<int>(out.lines.size()));
    out.lines.push_back(ProjLine::through(a, b));
  }
  auto l_index = [&](const std::string &name) {
    auto it = std::find(out.l_names.begin(), out.l_names.end(), name);
    if (it == out.l_names.end()) throw quartic_error("unknown line " + name);
    return static_cast<int>(it - out.l_names.begin());
  };

  // planes through m_i and l, with the two further lines as plane /\ factor
  struct PlaneRow {
    const char *name;
    NFPoint plane;
    std::array<NFPoint, 2> factors;
    int m;
    const char *l;
  };
  const std::vector<PlaneRow> planes{
      {"z1=0", {o, one, o, o}, {NFPoint{one, o, o, -one}, NFPoint{one, o, o, one}}, 0, "B1"},
      {"z2=0", {o, o, one, o}, {NFPoint{one, o, o, -one}, NFPoint{one, o, o, one}}, 1, "B2"},
      {"z1=e*z0", {-e, one, o, o}, {NFPoint{one, o, one, -one}, NFPoint{one, o, -one, one}}, 0, "A1"},
      {"z1=-e*z0", {e, one, o, o}, {NFPoint{one, o, one, one}, NFPoint{one, o, -one, -one}}, 0, "C1"},
      {"z2=e*z3", {o, o, one, -e}, {NFPoint{one, one, o, one}, NFPoint{one, one, o, -one}}, 1, "A2"},
      {"z2=-e*z3", {o, o, one, e}, {NFPoint{one, -one, o, -one}, NFPoint{one, -one, o, one}}, 1, "C2"},
  };
  for (const auto &p : planes) {
    Y56Lines::PlaneResidual r;
    r.plane = p.name;
    r.m = p.m;
    r.l = l_index(p.l);
    for (int k = 0; k < 2; ++k) {
      r.r[k] = static_cast<int>(out.lines.size());
      out.lines.push_back(ProjLine::cut_out_by(p.plane, p.factors[k]));
    }
    out.planes.push_back(r);
  }

  const std::vector<QuadricRow> quadrics{
      // printed as u + 2e v and u - 2e v, which miss A1, C1 and A2, C2
      {"2e*u+v", {"A1", "B1", "C1", "B2"}, {o, rat(f, 2) * e, one, o}},
      {"2e*u-v", {"A2", "B2", "C2", "B1"}, {o, rat(f, 2) * e, -one, o}},
      {"u-v", {"P1", "P3", "B1", "B2"}, {o, one, -one, o}},
      {"u+v", {"P2", "P4", "B1", "B2"}, {o, one, one, o}},
      {"1+e*u+v", {"P3", "P4", "B1", "A1"}, {one, e, one, o}},
      {"1-e*u-v", {"P1", "P2", "B1", "C1"}, {one, -e, -one, o}},
      {"e*u-v+uv", {"P2", "P3", "B2", "A2"}, {o, e, -one, one}},
      {"e*u-v-uv", {"P1", "P4", "B2", "C2"}, {o, e, -one, -one}},
      {"e-2e*u-v+uv", {"P1", "P4", "A1", "C1"}, {e, rat(f, -2) * e, -one, one}},
      {"e+2e*u+v+uv", {"P2", "P3", "A1", "C1"}, {e, rat(f, 2) * e, one, one}},
      {"1-2e*u+v-e*uv", {"P1", "P2", "A2", "C2"}, {one, rat(f, -2) * e, one, -e}},
      {"1+2e*u-v-e*uv", {"P3", "P4", "A2", "C2"}, {one, rat(f, 2) * e, -one, -e}},
      {"-3e+4+(2e-2)u-(2e-2)v+e*uv", {"P1", "P3", "A1", "A2"},
       {rat(f, 4) - rat(f, 3) * e, rat(f, 2) * e - rat(f, 2), rat(f, 2) - rat(f, 2) * e, e}},
      {"-3e+4-(2e-2)u+(2e-2)v+e*uv", {"P1", "P3", "C1", "C2"},
       {rat(f, 4) - rat(f, 3) * e, rat(f, 2) - rat(f, 2) * e, rat(f, 2) * e - rat(f, 2), e}},
      {"3e+4+(2e+2)u+(2e+2)v+e*uv", {"P2", "P4", "A1", "C2"},
       {rat(f, 4) + rat(f, 3) * e, rat(f, 2) * e + rat(f, 2), rat(f, 2) * e + rat(f, 2), e}},
      {"3e+4-(2e+2)u-(2e+2)v+e*uv", {"P2", "P4", "A2", "C1"},
       {rat(f, 4) + rat(f, 3) * e, -rat(f, 2) * e - rat(f, 2), -rat(f, 2) * e - rat(f, 2), e}},
  };
  for (const auto &q : quadrics) {
    const Mat2 m = quadric_matrix(q.coeffs);
    Y56Lines::QuadricResidual r;
    r.chi = q.chi;
    for (int k = 0; k < 4; ++k) {
      r.quadruple[k] = l_index(q.quadruple[k]);
      if (!line_in_quadric(m, out.lines[out.l_lines[r.quadruple[k]]]))
        throw quartic_error(std::string("line ") + q.quadruple[k] + " is not in the quadric " + q.chi);
    }
    if (!line_in_quadric(m, out.lines[0]) || !line_in_quadric(m, out.lines[1]))
      throw quartic_error("quadric " + q.chi + " does not contain m_1 and m_2");
    const auto res = quadric_residuals(y, m);
    for (int k = 0; k < 2; ++k) {
      r.n[k] = static_cast<int>(out.lines.size());
      out.lines.push_back(res[k]);
    }
    out.quadrics.push_back(r);
  }

  std::set<ProjLine> all(out.lines.begin(), out.lines.end());
  if (all.size() != out.lines.size()) throw quartic_error("repeated line in the construction of Y");
  for (const auto &l : out.lines)
    if (!line_on_surface(l, y)) throw quartic_error("line not on Y: " + l.to_string());
  return out;
}

std::vector<ProjLine> y56_lines() { return y56_construction().lines; }

std::vector<std::string> y56_incidence_audit(const Y56Lines &y) {
  std::vector<std::string> bad;
  auto meet = [&](int a, int b) { return lines_meet(y.lines[a], y.lines[b]); };
  const int m[2] = {0, 1};
  if (meet(m[0], m[1])) bad.push_back("m_1 and m_2 meet");
  const std::size_t nl = y.l_lines.size();
  for (std::size_t i = 0; i < nl; ++i) {
    for (std::size_t j = i + 1; j < nl; ++j)
      if (meet(y.l_lines[i], y.l_lines[j])) bad.push_back(y.l_names[i] + " meets " + y.l_names[j]);
    for (int k = 0; k < 2; ++k)
      if (!meet(y.l_lines[i], m[k])) bad.push_back(y.l_names[i] + " misses m_" + std::to_string(k + 1));
  }
  for (const auto &p : y.planes) {
    const std::string tag = "plane " + p.plane + ": ";
    for (int r : p.r) {
      if (!meet(r, m[p.m])) bad.push_back(tag + "residual misses m_i");
      if (meet(r, m[1 - p.m])) bad.push_back(tag + "residual meets m_{3-i}");
      for (std::size_t j = 0; j < nl; ++j) {
        const bool expect = static_cast<int>(j) == p.l;
        if (meet(r, y.l_lines[j]) != expect) bad.push_back(tag + "residual vs " + y.l_names[j]);
      }
    }
    if (!meet(p.r[0], p.r[1])) bad.push_back(tag + "residuals are skew");
  }
  for (const auto &q : y.quadrics) {
    const std::string tag = "quadric " + q.chi + ": ";
    for (int n : q.n) {
      if (meet(n, m[0]) || meet(n, m[1])) bad.push_back(tag + "residual meets m_1 or m_2");
      for (std::size_t j = 0; j < nl; ++j) {
        const bool expect = std::find(q.quadruple.begin(), q.quadruple.end(), static_cast<int>(j)) != q.quadruple.end();
        if (meet(n, y.l_lines[j]) != expect) bad.push_back(tag + "residual vs " + y.l_names[j]);
      }
    }
    // lines l outside the quadruple that span a plane with some m_i
    for (const auto &p : y.planes) {
      if (std::find(q.quadruple.begin(), q.quadruple.end(), p.l) != q.quadruple.end()) continue;
      const bool a = meet(q.n[0], p.r[0]), b = meet(q.n[0], p.r[1]);
      const bool c = meet(q.n[1], p.r[0]), d = meet(q.n[1], p.r[1]);
      const bool kronecker = (a && !b && !c && d) || (!a && b && c && !d);
      if (!kronecker) bad.push_back(tag + "n_i vs r_j(" + y.l_names[p.l] + ") is not a permutation matrix");
    }
  }
  return bad;
}

std::vector<SemilinearMap> y56_automorphism_generators() {
  const NumberField f{FieldTag::Sqrt2};
  std::vector<SemilinearMap> gens;
  // reflections with rho_0 rho_3 = rho_1 rho_2, modulo -1
  for (const std::array<long, 4> rho : {std::array<long, 4>{1, 1, -1, -1}, std::array<long, 4>{1, -1, 1, -1},
                                        std::array<long, 4>{1, -1, -1, 1}})
    gens.push_back(SemilinearMap::linear(permutation_matrix(f, {0, 1, 2, 3}, rho)));
  gens.push_back(SemilinearMap::linear(permutation_matrix(f, {0, 2, 1, 3}, {1, 1, 1, 1})));
  // z0 -> z3, z3 -> -z0
  gens.push_back(SemilinearMap::linear(permutation_matrix(f, {3, 1, 2, 0}, {1, 1, 1, -1})));
  NFMatrix4 inv = nf_identity(f);
  const NFElement s = nf::sqrt2().inverse();
  inv[0][0] = s;
  inv[0][3] = s;
  inv[3][0] = s;
  inv[3][3] = -s;
  gens.push_back(SemilinearMap::linear(inv));
  return gens;
}

// Fano configuration

FanoConfiguration fano_configuration(const std::vector<ProjLine> &lines, bool check_pairwise) {
  const std::size_t n = lines.size();
  if (n == 0) throw quartic_error("no lines");
  {
    std::set<ProjLine> all(lines.begin(), lines.end());
    if (all.size() != n) throw quartic_error("repeated line");
  }
  IntMatrix gram(n + 1, n + 1);
  gram(0, 0) = 4;
  for (std::size_t i = 0; i < n; ++i) {
    gram(0, i + 1) = gram(i + 1, 0) = 1;
    gram(i + 1, i + 1) = -2;
    for (std::size_t j = i + 1; j < n; ++j) gram(i + 1, j + 1) = gram(j + 1, i + 1) = lines_meet(lines[i], lines[j]) ? 1 : 0;
  }
  if (check_pairwise) {
    // three pairwise meeting lines on a smooth quartic are coplanar
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        if (gram(i + 1, j + 1) == 0) continue;
        for (std::size_t k = j + 1; k < n; ++k) {
          if (gram(i + 1, k + 1) == 0 || gram(j + 1, k + 1) == 0) continue;
          if (!coplanar(lines[i], lines[j], lines[k])) throw quartic_error("three concurrent lines are not coplanar");
        }
      }
  }
  const GeneratedLattice gl = lattice_from_generators(gram);
  PolarizedLattice s(gl.lattice, gl.coords.row(0));
  std::vector<IntVector> coords;
  for (std::size_t i = 0; i < n; ++i) coords.push_back(gl.coords.row(i + 1));
  const ValidityReport v = validate_configuration(s);
  if (!v.ok()) {
    std::string why;
    for (const auto &f : v.failures) why += (why.empty() ? "" : "; ") + f;
    throw quartic_error("not a configuration: " + why);
  }
  if (v.line_count != n)
    throw quartic_error("lattice has " + std::to_string(v.line_count) + " line classes for " + std::to_string(n) + " lines");
  FanoConfiguration out{Configuration(s, coords), {}};
  for (const auto &c : coords) out.index.push_back(out.config.find(c));
  return out;
}

std::size_t real_line_count(const std::vector<ProjLine> &lines, const SemilinearMap &sigma) {
  if (!sigma.is_involution()) throw quartic_error("map is not an involution");
  std::set<ProjLine> all(lines.begin(), lines.end());
  std::size_t fixed = 0;
  for (const auto &l : lines) {
    const ProjLine m = sigma.apply(l);
    if (!all.count(m)) throw quartic_error("map does not permute the lines");
    if (m == l) ++fixed;
  }
  return fixed;
}

ProjectiveGroup ProjectiveGroup::generate(const std::vector<SemilinearMap> &gens, std::size_t max_order) {
  if (gens.empty()) throw quartic_error("no generators");
  std::vector<NFMatrix4> g;
  for (const auto &s : gens) {
    if (s.automorphism != NFAuto::Identity) throw quartic_error("generator is not linear");
    if (nf_det(s.matrix).is_zero()) throw quartic_error("generator is singular");
    g.push_back(projective_normal_form(s.matrix));
  }
  ProjectiveGroup out;
  const NFMatrix4 id = nf_identity(g[0][0][0].field());
  std::set<NFMatrix4> seen{id};
  out.elems_.push_back(id);
  for (std::size_t k = 0; k < out.elems_.size(); ++k)
    for (const auto &h : g) {
      NFMatrix4 m = projective_normal_form(nf_multiply(h, out.elems_[k]));
      if (seen.insert(m).second) {
        out.elems_.push_back(std::move(m));
        if (out.elems_.size() > max_order) throw quartic_error("group exceeds " + std::to_string(max_order) + " elements");
      }
    }
  return out;
}

std::vector<ProjLine> ProjectiveGroup::orbit(const ProjLine &l) const {
  std::set<ProjLine> seen;
  for (const auto &g : elems_) seen.insert(SemilinearMap::linear(g).apply(l));
  return {seen.begin(), seen.end()};
}

AutomorphismAudit automorphism_audit(const QuarticSurface &x, const std::vector<SemilinearMap> &gens,
                                     const std::vector<ProjLine> &lines) {
  for (const auto &g : gens) {
    if (g.automorphism != NFAuto::Identity) throw quartic_error("generator is not linear");
    if (!g.preserves(x)) throw quartic_error("generator does not preserve the surface");
  }
  const ProjectiveGroup group = ProjectiveGroup::generate(gens);
  std::map<ProjLine, std::size_t> index;
  for (std::size_t i = 0; i < lines.size(); ++i) index.emplace(lines[i], i);
  AutomorphismAudit out;
  out.order = group.order();
  // union-find over the line orbits
  std::vector<std::size_t> parent(lines.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  auto find = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (const auto &g : group.elements()) {
    const SemilinearMap s = SemilinearMap::linear(g);
    bool trivial = true;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      auto it = index.find(s.apply(lines[i]));
      if (it == index.end()) throw quartic_error("group element does not permute the lines");
      if (it->second != i) trivial = false;
      parent[find(i)] = find(it->second);
    }
    if (trivial) ++out.kernel;
  }
  for (std::size_t i = 0; i < lines.size(); ++i)
    if (find(i) == i) ++out.line_orbits;
  out.faithful = out.kernel == 1;
  return out;
}

} // namespace k3
