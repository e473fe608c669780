#include "k3/lattice.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

namespace k3 {

Lattice::Lattice(IntMatrix g, std::vector<std::string> names) : gram(std::move(g)), labels(std::move(names)) {
  if (!gram.is_symmetric()) throw lattice_error("Gram matrix is not symmetric");
}

bool Lattice::is_even() const {
  for (std::size_t i = 0; i < rank(); ++i)
    if (gram(i, i) % 2 != 0) return false;
  return true;
}

PolarizedLattice::PolarizedLattice(Lattice l, IntVector pol) : base(std::move(l)), h(std::move(pol)) {
  if (h.size() != base.rank()) throw lattice_error("polarization has wrong length");
}

Lattice direct_sum(const Lattice &a, const Lattice &b) {
  const std::size_t n = a.rank(), m = b.rank();
  IntMatrix g(n + m, n + m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g(i, j) = a.gram(i, j);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) g(n + i, n + j) = b.gram(i, j);
  std::vector<std::string> names = a.labels;
  names.insert(names.end(), b.labels.begin(), b.labels.end());
  if (names.size() != n + m) names.clear();
  return Lattice(g, names);
}

Lattice hyperbolic_plane(long scale) { return Lattice(IntMatrix{{0, scale}, {scale, 0}}); }

Lattice e8_negative() {
  IntMatrix g(8, 8);
  for (std::size_t i = 0; i < 8; ++i) g(i, i) = -2;
  auto link = [&](int a, int b) { g(a, b) = g(b, a) = 1; };
  link(0, 2);
  link(1, 3);
  link(2, 3);
  link(3, 4);
  link(4, 5);
  link(5, 6);
  link(6, 7);
  return Lattice(g);
}

Lattice rank_one(long n) { return Lattice(IntMatrix{{n}}); }

Signature signature(const IntMatrix &gram) {
  RatMatrix m = to_rational(gram);
  const std::size_t n = m.rows();
  Signature s;
  std::size_t k = 0;
  while (k < n) {
    std::size_t p = k;
    while (p < n && m(p, p) == 0) ++p;
    if (p == n) {
      // No diagonal pivot left: use x_i + x_j to create one, or stop if zero.
      bool found = false;
      for (std::size_t i = k; i < n && !found; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
          if (m(i, j) != 0) {
            for (std::size_t c = 0; c < n; ++c) m(i, c) += m(j, c);
            for (std::size_t r = 0; r < n; ++r) m(r, i) += m(r, j);
            p = i;
            found = true;
            break;
          }
      if (!found) {
        s.zero += n - k;
        break;
      }
    }
    m.swap_rows(k, p);
    m.swap_cols(k, p);
    const Rational piv = m(k, k);
    (piv > 0 ? s.pos : s.neg)++;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (m(i, k) == 0) continue;
      Rational f = m(i, k) / piv;
      for (std::size_t j = k; j < n; ++j) m(i, j) -= f * m(k, j);
      for (std::size_t r = k; r < n; ++r) m(r, i) = m(i, r);
    }
    for (std::size_t i = k + 1; i < n; ++i) m(k, i) = m(i, k) = 0;
    ++k;
  }
  return s;
}

// ------------------------------------------------------------ finite forms

namespace {

std::vector<long> prime_factors(long n) {
  std::vector<long> ps;
  for (long p = 2; p * p <= n; ++p)
    if (n % p == 0) {
      ps.push_back(p);
      while (n % p == 0) n /= p;
    }
  if (n > 1) ps.push_back(n);
  return ps;
}

long ipow(long b, int e) {
  long r = 1;
  while (e-- > 0) r *= b;
  return r;
}

int valuation(long n, long p) {
  int v = 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

long mod_pos(long a, long m) {
  long r = a % m;
  return r < 0 ? r + m : r;
}

} // namespace

DiscriminantForm::DiscriminantForm(std::vector<long> orders, RatMatrix b, std::vector<Rational> q)
    : orders_(std::move(orders)), b_(std::move(b)), q_(std::move(q)) {
  const std::size_t n = orders_.size();
  if (b_.rows() != n || b_.cols() != n || q_.size() != n) throw lattice_error("discriminant form: inconsistent sizes");
  for (std::size_t i = 0; i < n; ++i) {
    q_[i] = mod_rational(q_[i], 2);
    for (std::size_t j = 0; j < n; ++j) b_(i, j) = mod_rational(i == j ? q_[i] : b_(i, j), 1);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (b_(i, j) != b_(j, i)) throw lattice_error("discriminant form: b not symmetric");
      if (mod_rational(b_(i, j) * orders_[i], 1) != 0) throw lattice_error("discriminant form: b incompatible with orders");
    }
}

long DiscriminantForm::order() const {
  long o = 1;
  for (long d : orders_) o *= d;
  return o;
}

Rational DiscriminantForm::b(const Elem &x, const Elem &y) const {
  Rational s = 0;
  for (std::size_t i = 0; i < ngens(); ++i) {
    if (x[i] == 0) continue;
    for (std::size_t j = 0; j < ngens(); ++j)
      if (y[j] != 0) s += b_(i, j) * (x[i] * y[j]);
  }
  return mod_rational(s, 1);
}

Rational DiscriminantForm::q(const Elem &x) const {
  Rational s = 0;
  for (std::size_t i = 0; i < ngens(); ++i) {
    if (x[i] == 0) continue;
    s += q_[i] * (x[i] * x[i]);
    for (std::size_t j = i + 1; j < ngens(); ++j)
      if (x[j] != 0) s += 2 * b_(i, j) * (x[i] * x[j]);
  }
  return mod_rational(s, 2);
}

long DiscriminantForm::elem_order(const Elem &x) const {
  long o = 1;
  for (std::size_t i = 0; i < ngens(); ++i) {
    long oi = orders_[i] / std::gcd(orders_[i], mod_pos(x[i], orders_[i]));
    o = std::lcm(o, oi);
  }
  return o;
}

Elem DiscriminantForm::normalize(Elem x) const {
  for (std::size_t i = 0; i < ngens(); ++i) x[i] = mod_pos(x[i], orders_[i]);
  return x;
}

Elem DiscriminantForm::add(const Elem &x, const Elem &y) const {
  Elem z(ngens());
  for (std::size_t i = 0; i < ngens(); ++i) z[i] = mod_pos(x[i] + y[i], orders_[i]);
  return z;
}

Elem DiscriminantForm::scale(const Elem &x, long k) const {
  Elem z(ngens());
  for (std::size_t i = 0; i < ngens(); ++i) z[i] = mod_pos((x[i] % orders_[i]) * (k % orders_[i]), orders_[i]);
  return z;
}

bool DiscriminantForm::is_zero(const Elem &x) const {
  for (std::size_t i = 0; i < ngens(); ++i)
    if (mod_pos(x[i], orders_[i]) != 0) return false;
  return true;
}

std::vector<Elem> DiscriminantForm::elements() const {
  std::vector<Elem> out;
  Elem x(ngens(), 0);
  for (;;) {
    out.push_back(x);
    std::size_t i = ngens();
    while (i > 0) {
      --i;
      if (++x[i] < orders_[i]) goto next;
      x[i] = 0;
    }
    break;
  next:;
  }
  return out;
}

DiscriminantForm DiscriminantForm::negated() const {
  RatMatrix nb = b_;
  std::vector<Rational> nq = q_;
  for (std::size_t i = 0; i < ngens(); ++i) {
    nq[i] = -nq[i];
    for (std::size_t j = 0; j < ngens(); ++j) nb(i, j) = -nb(i, j);
  }
  return DiscriminantForm(orders_, nb, nq);
}

std::vector<Elem> DiscriminantForm::primary_generators(long p) const {
  std::vector<Elem> gens;
  for (std::size_t i = 0; i < ngens(); ++i) {
    int v = valuation(orders_[i], p);
    if (v == 0) continue;
    Elem g(ngens(), 0);
    g[i] = orders_[i] / ipow(p, v);
    gens.push_back(g);
  }
  return gens;
}

DiscriminantForm DiscriminantForm::primary_part(long p) const {
  auto gens = primary_generators(p);
  const std::size_t n = gens.size();
  std::vector<long> ord(n);
  RatMatrix bb(n, n);
  std::vector<Rational> qq(n);
  for (std::size_t i = 0; i < n; ++i) {
    ord[i] = elem_order(gens[i]);
    qq[i] = q(gens[i]);
    for (std::size_t j = 0; j < n; ++j) bb(i, j) = b(gens[i], gens[j]);
  }
  return DiscriminantForm(ord, bb, qq);
}

std::vector<long> DiscriminantForm::primes() const { return prime_factors(order()); }

std::string DiscriminantForm::to_string() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < ngens(); ++i) out << (i ? "," : "") << orders_[i];
  out << " ; ";
  for (std::size_t i = 0; i < ngens(); ++i) out << (i ? "," : "") << q_[i].get_str();
  out << " ;";
  bool first = true;
  for (std::size_t i = 0; i < ngens(); ++i)
    for (std::size_t j = i + 1; j < ngens(); ++j) {
      out << (first ? " " : ",") << b_(i, j).get_str();
      first = false;
    }
  return out.str();
}

DiscriminantForm form_direct_sum(const DiscriminantForm &a, const DiscriminantForm &b) {
  const std::size_t n = a.ngens(), m = b.ngens();
  std::vector<long> ord = a.orders();
  ord.insert(ord.end(), b.orders().begin(), b.orders().end());
  RatMatrix bb(n + m, n + m);
  std::vector<Rational> qq = a.q_values();
  qq.insert(qq.end(), b.q_values().begin(), b.q_values().end());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) bb(i, j) = a.b_matrix()(i, j);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) bb(n + i, n + j) = b.b_matrix()(i, j);
  return DiscriminantForm(ord, bb, qq);
}

DiscriminantForm form_cyclic(long m, long n) {
  if (std::gcd(m, n) != 1 || (m % 2 != 0 && n % 2 != 0)) throw lattice_error("<m/n> needs coprime m, n with one even");
  RatMatrix b(1, 1);
  Rational q(m, n);
  q.canonicalize();
  return DiscriminantForm({n}, b, {q});
}

DiscriminantForm form_u(int k) {
  long d = ipow(2, k);
  RatMatrix b(2, 2);
  b(0, 1) = b(1, 0) = Rational(1, d);
  return DiscriminantForm({d, d}, b, {Rational(0), Rational(0)});
}

DiscriminantForm form_v(int k) {
  long d = ipow(2, k);
  RatMatrix b(2, 2);
  b(0, 1) = b(1, 0) = Rational(1, d);
  Rational q(1, ipow(2, k - 1));
  return DiscriminantForm({d, d}, b, {q, q});
}

DiscriminantForm trivial_form() { return DiscriminantForm({}, RatMatrix(0, 0), {}); }

RatVector DiscriminantData::lift(const Elem &x) const {
  RatVector v(generators.cols());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0) continue;
    for (std::size_t j = 0; j < v.size(); ++j) v[j] += generators(i, j) * x[i];
  }
  return v;
}

DiscriminantData discriminant_data(const Lattice &l) {
  if (!l.is_even()) throw lattice_error("discriminant form needs an even lattice");
  const std::size_t n = l.rank();
  SmithData s = smith_normal_form(l.gram);
  for (std::size_t i = 0; i < n; ++i)
    if (s.D(i, i) == 0) throw lattice_error("discriminant form needs a nondegenerate lattice");
  std::vector<long> orders;
  RatMatrix gens(0, n);
  for (std::size_t i = 0; i < n; ++i) {
    if (s.D(i, i) == 1) continue;
    if (!s.D(i, i).fits_slong_p()) throw lattice_error("discriminant group too large");
    orders.push_back(s.D(i, i).get_si());
    RatVector v(n);
    for (std::size_t j = 0; j < n; ++j) v[j] = Rational(s.V(j, i), s.D(i, i));
    for (auto &x : v) x.canonicalize();
    gens.append_row(v);
  }
  const RatMatrix g = to_rational(l.gram);
  const std::size_t k = orders.size();
  RatMatrix b(k, k);
  std::vector<Rational> q(k);
  for (std::size_t i = 0; i < k; ++i) {
    RatVector vi = gens.row(i);
    q[i] = bilinear(g, vi, vi);
    for (std::size_t j = 0; j < k; ++j) b(i, j) = bilinear(g, vi, gens.row(j));
  }
  if (gens.rows() == 0) gens = RatMatrix(0, n);
  IntMatrix ug = s.U * l.gram;
  IntMatrix red(0, n);
  for (std::size_t i = 0; i < n; ++i)
    if (s.D(i, i) != 1) red.append_row(ug.row(i));
  return DiscriminantData{DiscriminantForm(orders, b, q), gens, red};
}

DiscriminantForm discriminant_form(const Lattice &l) { return discriminant_data(l).form; }

Elem DiscriminantData::reduce(const RatVector &v) const {
  Elem x(form.ngens());
  for (std::size_t i = 0; i < x.size(); ++i) {
    Rational c = 0;
    for (std::size_t j = 0; j < v.size(); ++j) c += reduction(i, j) * v[j];
    if (c.get_den() != 1) throw lattice_error("vector is not in the dual lattice");
    Integer r = c.get_num() % form.orders()[i];
    if (r < 0) r += form.orders()[i];
    x[i] = r.get_si();
  }
  return x;
}

long FqIsoClass::ell() const {
  long e = 0;
  for (const auto &[p, d] : primes) e = std::max(e, d.ell);
  return e;
}

long FqIsoClass::ell_p(long p) const {
  auto it = primes.find(p);
  return it == primes.end() ? 0 : it->second.ell;
}

namespace {

int legendre(const Integer &a, long p) {
  Integer pp = p;
  return mpz_legendre(a.get_mpz_t(), pp.get_mpz_t());
}

// Square class of a p-adic unit given as a rational.
int unit_class(const Rational &u, long p) {
  Integer nd = u.get_num() * u.get_den();
  if (nd % p == 0) throw lattice_error("expected a p-adic unit");
  if (p == 2) {
    Integer r = nd % 8;
    if (r < 0) r += 8;
    return static_cast<int>(r.get_si());
  }
  return legendre(nd, p);
}

bool odd_at_two(const DiscriminantForm &d2) {
  // scan the order-2 elements of the 2-part
  const std::size_t n = d2.ngens();
  for (unsigned long mask = 1; mask < (1UL << n); ++mask) {
    Elem x(n, 0);
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) x[i] = d2.orders()[i] / 2;
    Rational qv = d2.q(x);
    if (qv == Rational(1, 2) || qv == Rational(3, 2)) return true;
  }
  return false;
}

} // namespace

FqIsoClass primary_invariants(const DiscriminantForm &d) {
  FqIsoClass c;
  c.order = d.order();
  for (long p : d.primes()) {
    DiscriminantForm dp = d.primary_part(p);
    PrimeData pd;
    pd.ell = static_cast<long>(dp.ngens());
    if (p == 2) pd.even = !odd_at_two(dp);
    if (p != 2 || pd.even) {
      RatMatrix eps = dp.b_matrix();
      for (std::size_t i = 0; i < dp.ngens(); ++i) eps(i, i) = dp.q_values()[i];
      Rational u = determinant(eps) * dp.order();
      pd.det_class = unit_class(u, p);
    }
    c.primes[p] = pd;
  }
  return c;
}

// ------------------------------------------------------------ isomorphisms

namespace {

struct ElemInfo {
  Elem x;
  long order;
  Rational q;
};

bool iso_search(const DiscriminantForm &src, const std::vector<ElemInfo> &pool, const DiscriminantForm &dst,
                std::vector<Elem> &img, std::size_t i, long sign) {
  const std::size_t n = src.ngens();
  if (i == n) return true;
  Elem gi(n, 0);
  gi[i] = 1;
  const long oi = src.orders()[i];
  const Rational qi = mod_rational(src.q_values()[i] * sign, 2);
  for (const auto &cand : pool) {
    if (cand.order != oi || cand.q != qi) continue;
    bool ok = true;
    for (std::size_t j = 0; j < i && ok; ++j) {
      Elem gj(n, 0);
      gj[j] = 1;
      if (dst.b(cand.x, img[j]) != mod_rational(src.b(gi, gj) * sign, 1)) ok = false;
    }
    if (!ok) continue;
    img[i] = cand.x;
    if (iso_search(src, pool, dst, img, i + 1, sign)) return true;
  }
  return false;
}

std::optional<FormIsomorphism> iso_impl(const DiscriminantForm &d1, const DiscriminantForm &d2, long sign) {
  if (d1.order() != d2.order()) return std::nullopt;
  FormIsomorphism w;
  for (long p : d1.primes()) {
    DiscriminantForm a = d1.primary_part(p), b = d2.primary_part(p);
    if (a.order() != b.order()) return std::nullopt;
    std::vector<long> oa = a.orders(), ob = b.orders();
    std::sort(oa.begin(), oa.end());
    std::sort(ob.begin(), ob.end());
    if (oa != ob) return std::nullopt;
    std::vector<ElemInfo> pool;
    for (auto &x : b.elements()) pool.push_back({x, b.elem_order(x), b.q(x)});
    std::vector<Elem> img(a.ngens());
    if (!iso_search(a, pool, b, img, 0, sign)) return std::nullopt;
    // express in the coordinates of d1 / d2
    auto ga = d1.primary_generators(p), gb = d2.primary_generators(p);
    std::vector<Elem> full(img.size());
    for (std::size_t i = 0; i < img.size(); ++i) {
      Elem e(d2.ngens(), 0);
      for (std::size_t j = 0; j < img[i].size(); ++j) e = d2.add(e, d2.scale(gb[j], img[i][j]));
      full[i] = e;
    }
    w.primes.push_back(p);
    w.source_gens.push_back(ga);
    w.images.push_back(full);
  }
  return w;
}

} // namespace

std::optional<FormIsomorphism> forms_isomorphic(const DiscriminantForm &d1, const DiscriminantForm &d2) {
  return iso_impl(d1, d2, 1);
}

std::optional<FormIsomorphism> forms_anti_isomorphic(const DiscriminantForm &d1, const DiscriminantForm &d2) {
  return iso_impl(d1, d2, -1);
}

// ------------------------------------------------------------ Nikulin

bool nikulin_embeds(std::size_t sig_pos, std::size_t sig_neg, std::size_t rank, const DiscriminantForm &d) {
  constexpr std::size_t kPos = 3, kNeg = 19, kRank = 22;
  FqIsoClass c = primary_invariants(d);
  if (sig_pos > kPos || sig_neg > kNeg) return false;
  if (rank + static_cast<std::size_t>(c.ell()) > kRank) return false;
  const long order = c.order;
  for (const auto &[p, pd] : c.primes) {
    if (rank + static_cast<std::size_t>(pd.ell) != kRank) continue;
    long away = order;
    while (away % p == 0) away /= p;
    Integer target = away;
    if ((sig_pos + 1) % 2 == 1) target = -target; // (-1)^(sigma_+ - 1)
    if (p != 2) {
      if (legendre(target, p) != *pd.det_class) return false;
    } else {
      if (!pd.even) continue;
      Integer r = (target * *pd.det_class) % 8;
      if (r < 0) r += 8;
      if (r != 1 && r != 7) return false;
    }
  }
  return true;
}

bool nikulin_embeds(const Lattice &s) {
  Signature sg = signature(s.gram);
  if (sg.zero != 0) throw lattice_error("Nikulin test needs a nondegenerate lattice");
  return nikulin_embeds(sg.pos, sg.neg, s.rank(), discriminant_form(s));
}

std::vector<Elem> isotropic_subgroup_candidates(const DiscriminantForm &d, long p) {
  std::vector<Elem> out;
  auto gens = d.primary_generators(p);
  // elements killed by p: combinations of (order_i / p) * e_i
  std::vector<Elem> base;
  for (std::size_t i = 0; i < d.ngens(); ++i)
    if (d.orders()[i] % p == 0) {
      Elem e(d.ngens(), 0);
      e[i] = d.orders()[i] / p;
      base.push_back(e);
    }
  const std::size_t k = base.size();
  std::vector<long> digits(k, 0);
  std::set<Elem> seen;
  for (;;) {
    std::size_t i = 0;
    while (i < k && ++digits[i] == p) digits[i++] = 0;
    if (i == k) break;
    Elem x(d.ngens(), 0);
    for (std::size_t j = 0; j < k; ++j) x = d.add(x, d.scale(base[j], digits[j]));
    if (d.q(x) != 0) continue;
    Elem rep = x;
    for (long m = 2; m < p; ++m) rep = std::min(rep, d.scale(x, m));
    if (seen.insert(rep).second) out.push_back(rep);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ------------------------------------------------------------ sublattices

SpannedLattice span_of(const RatMatrix &ambient, const RatMatrix &vectors) {
  Integer den = 1;
  for (std::size_t i = 0; i < vectors.rows(); ++i)
    for (std::size_t j = 0; j < vectors.cols(); ++j) {
      Integer d = vectors(i, j).get_den();
      mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), d.get_mpz_t());
    }
  IntMatrix scaled(vectors.rows(), vectors.cols());
  for (std::size_t i = 0; i < vectors.rows(); ++i)
    for (std::size_t j = 0; j < vectors.cols(); ++j) {
      Rational v = vectors(i, j) * den;
      scaled(i, j) = v.get_num();
    }
  IntMatrix hnf = hermite_normal_form(scaled);
  RatMatrix basis(hnf.rows(), hnf.cols());
  for (std::size_t i = 0; i < hnf.rows(); ++i)
    for (std::size_t j = 0; j < hnf.cols(); ++j) {
      basis(i, j) = Rational(hnf(i, j), den);
      basis(i, j).canonicalize();
    }
  RatMatrix g = basis * ambient * basis.transpose();
  return SpannedLattice{Lattice(to_integer(g)), basis};
}

GeneratedLattice lattice_from_generators(const IntMatrix &gen_gram) {
  if (!gen_gram.is_symmetric()) throw lattice_error("generator Gram matrix is not symmetric");
  const std::size_t n = gen_gram.rows();
  RatMatrix g = to_rational(gen_gram);
  std::vector<std::size_t> free = independent_rows(g);
  RatMatrix gbb = g.submatrix(free, free);
  RatMatrix gbb_inv = inverse(gbb);
  // coordinates of every generator in the free basis: c_g = G[g,B] * G_BB^{-1}
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  RatMatrix c = g.submatrix(all, free) * gbb_inv;
  SpannedLattice sp = span_of(gbb, c);
  RatMatrix yinv = inverse(sp.basis);
  RatMatrix coords = c * yinv;
  return GeneratedLattice{sp.lattice, to_integer(coords), free};
}

Extension finite_index_extension(const Lattice &l, const DiscriminantData &dd, const std::vector<Elem> &gens) {
  const std::size_t n = l.rank();
  RatMatrix vecs = to_rational(IntMatrix::identity(n));
  for (const auto &x : gens) {
    for (std::size_t i = 0; i < gens.size(); ++i)
      if (dd.form.b(x, gens[i]) != 0) throw lattice_error("pivot is not b-isotropic");
    if (dd.form.q(x) != 0) throw lattice_error("pivot is not q-isotropic");
    vecs.append_row(dd.lift(x));
  }
  RatMatrix g = to_rational(l.gram);
  SpannedLattice sp;
  try {
    sp = span_of(g, vecs);
  } catch (const std::domain_error &) {
    throw lattice_error("extension is not integral");
  }
  if (!sp.lattice.is_even()) throw lattice_error("extension is not even");
  return Extension{sp.lattice, sp.basis};
}

Extension finite_index_extension(const Lattice &l, const std::vector<Elem> &gens) {
  return finite_index_extension(l, discriminant_data(l), gens);
}

Complement orthogonal_complement(const Lattice &ambient, const IntMatrix &sub) {
  IntMatrix f = sub * ambient.gram;
  IntMatrix k = kernel_basis(f);
  IntMatrix g = k * ambient.gram * k.transpose();
  return Complement{Lattice(g), k};
}

// ------------------------------------------------------------ binary forms

std::string BinaryForm::to_string() const {
  return "[" + a.get_str() + "," + b.get_str() + "," + c.get_str() + "]";
}

std::vector<BinaryForm> transcendental_candidates(const DiscriminantForm &d) {
  const long det = d.order();
  std::vector<BinaryForm> out;
  const DiscriminantForm target = d.negated();
  for (long a = 2; 3 * a * a <= 4 * det; a += 2)
    for (long b = 0; 2 * b <= a; ++b) {
      long num = det + b * b;
      if (num % a != 0) continue;
      long c = num / a;
      if (c < a || c % 2 != 0) continue;
      Lattice t(IntMatrix{{a, b}, {b, c}});
      if (forms_isomorphic(discriminant_form(t), target)) out.push_back(BinaryForm{a, b, c});
    }
  return out;
}

std::vector<BinaryForm> transcendental_candidates(const PolarizedLattice &s) {
  if (s.rank() != 20) throw lattice_error("transcendental candidates need rank 20");
  Signature sg = signature(s.base.gram);
  if (sg.pos != 1 || sg.zero != 0) throw lattice_error("transcendental candidates need a hyperbolic lattice");
  return transcendental_candidates(discriminant_form(s.base));
}

// ------------------------------------------------------------ extension search

ExtensionSearchResult search_extensions(const Lattice &base,
                                        const std::function<Visit(const Extension &, const std::vector<Elem> &)> &visit,
                                        const std::function<bool(const DiscriminantForm &, const Elem &)> &allow_step,
                                        const std::function<bool(const std::vector<Elem> &)> &admit) {
  ExtensionSearchResult res;
  const DiscriminantData dd = discriminant_data(base);
  const DiscriminantForm &d = dd.form;
  Extension trivial{base, to_rational(IntMatrix::identity(base.rank()))};
  ++res.visited;
  Visit v0 = visit(trivial, {});
  if (v0 == Visit::Accept) {
    res.accepted = true;
    return res;
  }
  if (v0 == Visit::Prune || d.order() == 1) return res;

  // isotropic elements of prime power order
  std::vector<Elem> iso;
  for (auto &x : d.elements()) {
    if (d.is_zero(x) || d.q(x) != 0) continue;
    if (prime_factors(d.elem_order(x)).size() != 1) continue;
    if (allow_step && !allow_step(d, x)) continue;
    iso.push_back(x);
  }

  std::set<std::vector<Elem>> seen;
  struct Node {
    std::vector<Elem> gens;
    std::set<Elem> members;
  };
  auto closure = [&](const std::set<Elem> &members, const Elem &x) {
    std::set<Elem> out = members;
    Elem m = x;
    long o = d.elem_order(x);
    std::vector<Elem> mult;
    for (long k = 0; k < o; ++k) {
      mult.push_back(m);
      m = d.add(m, x);
    }
    for (const auto &a : members)
      for (const auto &b : mult) out.insert(d.add(a, b));
    return out;
  };

  std::function<bool(const Node &)> dfs = [&](const Node &node) -> bool {
    for (const auto &x : iso) {
      if (node.members.count(x)) continue;
      // prime step: p x already in the pivot
      long o = d.elem_order(x);
      long p = prime_factors(o)[0];
      if (!node.members.count(d.scale(x, p))) continue;
      bool orth = true;
      for (const auto &g : node.gens)
        if (d.b(x, g) != 0) {
          orth = false;
          break;
        }
      if (!orth) continue;
      Node child{node.gens, closure(node.members, x)};
      child.gens.push_back(x);
      std::vector<Elem> key(child.members.begin(), child.members.end());
      if (!seen.insert(key).second) continue;
      if (admit && !admit(key)) continue;
      Extension ext = finite_index_extension(base, dd, child.gens);
      ++res.visited;
      Visit v = visit(ext, child.gens);
      if (v == Visit::Accept) {
        res.accepted = true;
        res.pivot = child.gens;
        return true;
      }
      if (v == Visit::Continue && dfs(child)) return true;
    }
    return false;
  };
  Node root{{}, {Elem(d.ngens(), 0)}};
  dfs(root);
  return res;
}

bool totally_reflexive_test(const Lattice &s) {
  const Integer dets = abs(s.det());
  for (const Lattice &w : {rank_one(2), hyperbolic_plane(2)}) {
    Lattice m0 = direct_sum(s, w);
    const std::size_t n = s.rank(), k = w.rank();
    auto visit = [&](const Extension &ext, const std::vector<Elem> &) {
      // S stays primitive iff the complement of W in the extension is S itself.
      RatMatrix binv = inverse(ext.basis);
      IntMatrix wrows(k, ext.lattice.rank());
      for (std::size_t i = 0; i < k; ++i) {
        RatVector e(n + k);
        e[n + i] = 1;
        RatVector c(ext.lattice.rank());
        for (std::size_t a = 0; a < e.size(); ++a)
          if (e[a] != 0)
            for (std::size_t b = 0; b < c.size(); ++b) c[b] += e[a] * binv(a, b);
        wrows.set_row(i, to_integer(c));
      }
      Complement comp = orthogonal_complement(ext.lattice, wrows);
      if (abs(comp.lattice.det()) != dets) return Visit::Prune;
      return nikulin_embeds(ext.lattice) ? Visit::Accept : Visit::Continue;
    };
    if (search_extensions(m0, visit).accepted) return true;
  }
  return false;
}

} // namespace k3
