#include "k3/pencilenum.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <numeric>
#include <sstream>
#include <thread>

namespace k3 {

// ---------------------------------------------------------------------------
// Coordinates

std::string CoordinateVector::to_string() const {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < eps.size(); ++i) out << (i ? "," : "") << eps[i];
  out << ';';
  for (std::size_t k = 0; k < rho.size(); ++k) out << (k ? "," : "") << rho[k];
  out << ']';
  return out.str();
}

CoordinateVector parse_coordinates(const std::string &s) {
  auto open = s.find('['), semi = s.find(';'), close = s.find(']');
  if (open == std::string::npos || semi == std::string::npos || close == std::string::npos || semi > close)
    throw pencil_error("coordinate vector must look like [e1,...;r1,...]: " + s);
  auto parse_list = [&](const std::string &part, int modulus) {
    std::vector<int> out;
    std::stringstream ss(part);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok.find_first_not_of(" \t") == std::string::npos) continue;
      int v;
      try {
        v = std::stoi(tok);
      } catch (const std::logic_error &) {
        throw pencil_error("bad coordinate entry in " + s);
      }
      // -1 is accepted for the 3-coordinates
      if (v < (modulus == 3 ? -1 : 0) || v >= modulus) throw pencil_error("coordinate out of range in " + s);
      out.push_back((v + modulus) % modulus);
    }
    return out;
  };
  CoordinateVector c;
  c.eps = parse_list(s.substr(open + 1, semi - open - 1), 3);
  c.rho = parse_list(s.substr(semi + 1, close - semi - 1), 2);
  return c;
}

namespace {

void check_shapes(const CoordinateVector &a, const CoordinateVector &b) {
  if (a.p() != b.p() || a.q() != b.q()) throw pencil_error("coordinate vectors of different types");
}

} // namespace

CoordinateVector coord_add(const CoordinateVector &a, const CoordinateVector &b) {
  check_shapes(a, b);
  CoordinateVector c = a;
  for (int i = 0; i < a.p(); ++i) c.eps[i] = (a.eps[i] + b.eps[i]) % 3;
  for (int k = 0; k < a.q(); ++k) c.rho[k] = a.rho[k] ^ b.rho[k];
  return c;
}

CoordinateVector coord_sub(const CoordinateVector &a, const CoordinateVector &b) {
  check_shapes(a, b);
  CoordinateVector c = a;
  for (int i = 0; i < a.p(); ++i) c.eps[i] = (a.eps[i] + 3 - b.eps[i]) % 3;
  for (int k = 0; k < a.q(); ++k) c.rho[k] = a.rho[k] ^ b.rho[k];
  return c;
}

CoordinateVector unit_coordinate(int p, int q) {
  return CoordinateVector{std::vector<int>(p, 0), std::vector<int>(q, 1)};
}

CoordinateVector completing_coordinate(const CoordinateVector &a, const CoordinateVector &b) {
  return coord_sub(coord_sub(unit_coordinate(a.p(), a.q()), a), b);
}

CoordinateStats coordinate_stats(const CoordinateVector &a, const CoordinateVector &b) {
  check_shapes(a, b);
  CoordinateStats st;
  for (int i = 0; i < a.p(); ++i) {
    if (a.eps[i] == b.eps[i]) ++st.com3;
    else ++st.dif3;
    st.num3[0] += a.eps[i] != 0;
    st.num3[1] += b.eps[i] != 0;
  }
  for (int k = 0; k < a.q(); ++k) {
    if (a.rho[k] && b.rho[k]) ++st.com1;
    if (a.rho[k] != b.rho[k]) ++st.dif1;
    st.num1[0] += a.rho[k];
    st.num1[1] += b.rho[k];
  }
  st.com = st.com3 + st.com1;
  return st;
}

int common_fibers(const std::vector<CoordinateVector> &v) {
  if (v.empty()) return 0;
  for (const auto &c : v) check_shapes(v[0], c);
  int n = 0;
  for (int i = 0; i < v[0].p(); ++i)
    n += std::all_of(v.begin(), v.end(), [&](const CoordinateVector &c) { return c.eps[i] == v[0].eps[i]; });
  for (int k = 0; k < v[0].q(); ++k)
    n += std::all_of(v.begin(), v.end(), [&](const CoordinateVector &c) { return c.rho[k] == 1; });
  return n;
}

// ---------------------------------------------------------------------------
// P_{p,q}

PencilLattice::PencilLattice(int p, int q) : p_(p), q_(q) {
  if (p < 0 || q < 0) throw pencil_error("pencil type must be nonnegative");
  const std::size_t n = dim();
  IntMatrix g(n, n);
  g(0, 0) = 4;
  for (std::size_t j = 1; j < n; ++j) g(0, j) = g(j, 0) = 1;
  for (std::size_t j = 1; j < n; ++j) g(j, j) = -2;
  for (std::size_t j = 2; j < n; ++j) g(1, j) = g(j, 1) = 1;
  for (int i = 0; i < p; ++i) g(m_index(i, 1), m_index(i, -1)) = g(m_index(i, -1), m_index(i, 1)) = 1;
  std::vector<std::string> names{"h", "l"};
  for (int i = 0; i < p; ++i) {
    names.push_back("m" + std::to_string(i + 1) + "+");
    names.push_back("m" + std::to_string(i + 1) + "-");
  }
  for (int k = 0; k < q; ++k) names.push_back("n" + std::to_string(k + 1));
  lattice_ = Lattice(g, names);
}

PolarizedLattice PencilLattice::polarized() const {
  IntVector h(dim());
  h[h_index] = 1;
  return PolarizedLattice(lattice_, h);
}

IntVector PencilLattice::fiber_line(int i, int j) const {
  if (i < 0 || i >= p_) throw pencil_error("no such 3-fiber");
  IntVector v(dim());
  j = ((j % 3) + 3) % 3;
  if (j == 1) v[m_index(i, 1)] = 1;
  else if (j == 2) v[m_index(i, -1)] = 1;
  else {
    v[h_index] = 1;
    v[l_index] = -1;
    v[m_index(i, 1)] = -1;
    v[m_index(i, -1)] = -1;
  }
  return v;
}

IntVector PencilLattice::one_fiber_line(int k) const {
  if (k < 0 || k >= q_) throw pencil_error("no such 1-fiber");
  IntVector v(dim());
  v[n_index(k)] = 1;
  return v;
}

std::vector<IntVector> PencilLattice::pencil_lines() const {
  std::vector<IntVector> out;
  for (int i = 0; i < p_; ++i)
    for (int j = 0; j < 3; ++j) out.push_back(fiber_line(i, j));
  for (int k = 0; k < q_; ++k) out.push_back(one_fiber_line(k));
  return out;
}

RatVector PencilLattice::lambda() const {
  RatVector v(dim());
  v[l_index] = Rational(1, 3);
  v[h_index] = Rational(-1, 3);
  return v;
}

RatVector PencilLattice::mu(int i) const {
  if (i < 0 || i >= p_) throw pencil_error("no such 3-fiber");
  RatVector v(dim());
  v[m_index(i, 1)] = Rational(1, 3);
  v[m_index(i, -1)] = Rational(-1, 3);
  return v;
}

RatVector PencilLattice::varpi() const {
  const int r = p_ + q_ - 1;
  RatVector v(dim()), lam = lambda();
  for (std::size_t j = 0; j < dim(); ++j) v[j] = -r * lam[j];
  v[l_index] += 1;
  for (int k = 0; k < q_; ++k) v[n_index(k)] -= 1;
  for (auto &x : v) x /= 3;
  return v;
}

RatVector PencilLattice::omega() const {
  RatVector v(dim());
  v[l_index] = 1;
  for (int i = 0; i < p_; ++i) v[m_index(i, 1)] = v[m_index(i, -1)] = 1;
  for (int k = 0; k < q_; ++k) v[n_index(k)] = -1;
  for (auto &x : v) x /= 3;
  return v;
}

RatVector PencilLattice::nu(int k) const {
  if (k < 0 || k >= q_) throw pencil_error("no such 1-fiber");
  RatVector v = lambda();
  v[n_index(k)] += 1;
  for (auto &x : v) x /= -2;
  return v;
}

RatVector PencilLattice::beta() const {
  RatVector v(dim());
  for (int i = 0; i < p_; ++i) {
    RatVector m = mu(i);
    for (std::size_t j = 0; j < dim(); ++j) v[j] += m[j];
  }
  return v;
}

RatVector PencilLattice::lstar() const {
  RatVector v = omega(), lam = lambda();
  for (std::size_t j = 0; j < dim(); ++j) v[j] += (p_ - 4) * lam[j];
  return v;
}

RatVector PencilLattice::octet(const std::vector<int> &support) const {
  RatVector v(dim());
  for (int k : support) {
    RatVector n = nu(k);
    for (std::size_t j = 0; j < dim(); ++j) v[j] += 3 * n[j];
  }
  return v;
}

Rational PencilLattice::dot(const RatVector &a, const RatVector &b) const {
  return bilinear(to_rational(lattice_.gram), a, b);
}

RatVector PencilLattice::named_class(const std::string &name) const {
  auto index_after = [&](std::size_t pos) {
    int i = std::stoi(name.substr(pos)) - 1;
    return i;
  };
  if (name == "beta") return beta();
  if (name == "omega") return omega();
  if (name == "lstar") return lstar();
  if (name == "lambda") return lambda();
  if (name == "varpi") return varpi();
  if (name.rfind("octet:", 0) == 0) {
    std::vector<int> support;
    std::stringstream ss(name.substr(6));
    std::string tok;
    while (std::getline(ss, tok, ',')) support.push_back(std::stoi(tok) - 1);
    return octet(support);
  }
  if (name.rfind("mu", 0) == 0 && name.size() > 2) return mu(index_after(2));
  if (name.rfind("nu", 0) == 0 && name.size() > 2) return nu(index_after(2));
  throw pencil_error("unknown pivot class: " + name);
}

IntVector PencilLattice::section_products(const CoordinateVector &s) const {
  if (s.p() != p_ || s.q() != q_) throw pencil_error("coordinate vector of a different type");
  IntVector v(dim());
  v[h_index] = 1;
  v[l_index] = 0;
  for (int i = 0; i < p_; ++i) {
    v[m_index(i, 1)] = s.eps[i] == 1 ? 1 : 0;
    v[m_index(i, -1)] = s.eps[i] == 2 ? 1 : 0;
  }
  for (int k = 0; k < q_; ++k) v[n_index(k)] = s.rho[k];
  return v;
}

CoordinateVector PencilLattice::coordinates_of(const IntVector &products) const {
  CoordinateVector c{std::vector<int>(p_, 0), std::vector<int>(q_, 0)};
  for (int i = 0; i < p_; ++i) {
    const Integer &a = products[m_index(i, 1)], &b = products[m_index(i, -1)];
    if (a == 1 && b == 0) c.eps[i] = 1;
    else if (a == 0 && b == 1) c.eps[i] = 2;
    else if (a == 0 && b == 0) c.eps[i] = 0;
    else throw pencil_error("not a section: meets a 3-fiber twice");
  }
  for (int k = 0; k < q_; ++k) {
    Integer r = products[n_index(k)] % 2;
    c.rho[k] = r == 0 ? 0 : 1;
  }
  return c;
}

std::vector<IntMatrix> PencilLattice::symmetry_generators() const {
  const std::size_t n = dim();
  std::vector<IntMatrix> gens;
  auto permutation = [&](const std::vector<std::size_t> &img) {
    IntMatrix m(n, n);
    for (std::size_t j = 0; j < n; ++j) m(img[j], j) = 1;
    return m;
  };
  std::vector<std::size_t> id(n);
  std::iota(id.begin(), id.end(), 0);
  for (int i = 0; i + 1 < p_; ++i) {
    auto img = id;
    std::swap(img[m_index(i, 1)], img[m_index(i + 1, 1)]);
    std::swap(img[m_index(i, -1)], img[m_index(i + 1, -1)]);
    gens.push_back(permutation(img));
  }
  if (p_ > 0) {
    auto img = id;
    std::swap(img[m_index(0, 1)], img[m_index(0, -1)]);
    gens.push_back(permutation(img));
    // m_0 -> m_+ -> m_- -> m_0
    IntMatrix m = IntMatrix::identity(n);
    const std::size_t a = m_index(0, 1), b = m_index(0, -1);
    m(a, a) = 0;
    m(b, a) = 1;
    IntVector m0 = fiber_line(0, 0);
    for (std::size_t r = 0; r < n; ++r) m(r, b) = m0[r];
    gens.push_back(m);
  }
  for (int k = 0; k + 1 < q_; ++k) {
    auto img = id;
    std::swap(img[n_index(k)], img[n_index(k + 1)]);
    gens.push_back(permutation(img));
  }
  return gens;
}

// ---------------------------------------------------------------------------
// Extensions

RatVector in_extension(const PencilExtension &e, const RatVector &v) { return solve_left(e.ext.basis, v); }

PencilExtension build_pencil_lattice(int p, int q, const std::vector<std::string> &pivot) {
  if (p < 0 || q < 0 || 3 * p + q > 20) throw pencil_error("pencil type out of range");
  PencilLattice pl(p, q);
  const std::size_t n = pl.dim();
  const RatMatrix g = to_rational(pl.lattice().gram);
  RatMatrix vecs = to_rational(IntMatrix::identity(n));
  std::vector<RatVector> classes;
  for (const auto &name : pivot) {
    RatVector v = pl.named_class(name);
    RatVector gv = g * v;
    for (const auto &x : gv)
      if (x.get_den() != 1) throw pencil_error("pivot class is not in the dual lattice: " + name);
    Rational vv = bilinear(g, v, v);
    if (vv.get_den() != 1 || vv.get_num() % 2 != 0) throw pencil_error("pivot class is not isotropic: " + name);
    for (const auto &w : classes) {
      Rational vw = bilinear(g, v, w);
      if (vw.get_den() != 1) throw pencil_error("pivot classes are not orthogonal: " + name);
    }
    classes.push_back(v);
    vecs.append_row(v);
  }
  SpannedLattice sp = span_of(g, vecs);
  PencilExtension e{pl, Extension{sp.lattice, sp.basis}, {}, {}, pivot};
  RatVector h(n), l(n);
  h[PencilLattice::h_index] = 1;
  l[PencilLattice::l_index] = 1;
  e.polarized = PolarizedLattice(sp.lattice, to_integer(in_extension(e, h)));
  e.l = to_integer(in_extension(e, l));
  ValidityReport rep = validate_configuration(e.polarized);
  if (!rep.ok()) {
    std::string msg = "pivot gives an invalid configuration:";
    for (const auto &f : rep.failures) msg += " " + f + ";";
    throw pencil_error(msg);
  }
  return e;
}

// ---------------------------------------------------------------------------
// Admissible types

bool within_euler_bound(int p, int q) { return p >= 0 && q >= 0 && 3 * p + 2 * q <= 24 && 3 * p + q <= 20; }

namespace {

// Memoized test: does the coset of a discriminant class contain a root in
// h-perp or a vector e with e^2 = 0, e.h = 2?
class ForbiddenClasses {
public:
  explicit ForbiddenClasses(const PolarizedLattice &s) : frame_(s), dd_(discriminant_data(s.base)) {}

  const DiscriminantData &data() const { return dd_; }

  bool operator()(const Elem &x) {
    auto it = memo_.find(x);
    if (it != memo_.end()) return it->second;
    const RatVector c = dd_.lift(x);
    bool bad = !frame_.coset_vectors(c, 0, -2).empty() || !frame_.coset_vectors(c, 2, 0).empty();
    memo_.emplace(x, bad);
    return bad;
  }

private:
  PolarizedFrame frame_;
  DiscriminantData dd_;
  std::map<Elem, bool> memo_;
};

std::string vector_string(const RatVector &v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + k3::to_string(v[i]);
  return s + ")";
}

// Images of discriminant classes under the generators of G_{p,q}.
class SymmetryAction {
public:
  SymmetryAction(const PencilLattice &pl, const DiscriminantData &dd) : dd_(dd) {
    for (const auto &g : pl.symmetry_generators()) gens_.push_back(to_rational(g));
  }
  std::size_t size() const { return gens_.size(); }
  const Elem &image(std::size_t g, const Elem &x) {
    auto key = std::make_pair(g, x);
    auto it = memo_.find(key);
    if (it == memo_.end()) it = memo_.emplace(key, dd_.reduce(gens_[g] * dd_.lift(x))).first;
    return it->second;
  }
  std::vector<Elem> image(std::size_t g, const std::vector<Elem> &members) {
    std::vector<Elem> out;
    out.reserve(members.size());
    for (const auto &m : members) out.push_back(image(g, m));
    std::sort(out.begin(), out.end());
    return out;
  }

private:
  const DiscriminantData &dd_;
  std::vector<RatMatrix> gens_;
  std::map<std::pair<std::size_t, Elem>, Elem> memo_;
};

// Runs the isotropic extension search on P_{p,q}, visiting one subgroup per
// G_{p,q}-orbit; `on_valid` sees every valid extension.
ExtensionSearchResult search_geometric(const PencilLattice &pl, ForbiddenClasses &forbidden,
                                       const std::function<Visit(const Extension &, const std::vector<Elem> &)> &on_valid,
                                       std::map<std::vector<Elem>, std::size_t> *orbit_size = nullptr) {
  const Lattice &base = pl.lattice();
  SymmetryAction act(pl, forbidden.data());
  std::set<std::vector<Elem>> covered;
  return search_extensions(
      base,
      [&](const Extension &ext, const std::vector<Elem> &gens) {
        if (gens.empty() && forbidden(Elem(forbidden.data().form.ngens(), 0))) return Visit::Prune;
        return on_valid(ext, gens);
      },
      [&](const DiscriminantForm &, const Elem &x) { return !forbidden(x); },
      [&](const std::vector<Elem> &members) {
        if (covered.count(members)) return false;
        for (const auto &m : members)
          if (forbidden(m)) return false;
        std::vector<std::vector<Elem>> stack{members};
        covered.insert(members);
        std::size_t size = 0;
        while (!stack.empty()) {
          auto cur = std::move(stack.back());
          stack.pop_back();
          ++size;
          for (std::size_t g = 0; g < act.size(); ++g) {
            auto img = act.image(g, cur);
            if (covered.insert(img).second) stack.push_back(std::move(img));
          }
        }
        if (orbit_size) (*orbit_size)[members] = size;
        return true;
      });
}

} // namespace

TypeVerdict search_pencil_type(int p, int q) {
  if (p < 0 || q < 0) throw pencil_error("pencil type must be nonnegative");
  PencilLattice pl(p, q);
  ForbiddenClasses forbidden(pl.polarized());
  TypeVerdict v;
  v.p = p;
  v.q = q;
  v.within_bound = within_euler_bound(p, q);
  v.searched = true;
  ExtensionSearchResult res = search_geometric(pl, forbidden, [&](const Extension &ext, const std::vector<Elem> &) {
    return nikulin_embeds(ext.lattice) ? Visit::Accept : Visit::Continue;
  });
  v.realizable = res.accepted;
  v.subgroups = res.visited;
  for (const auto &g : res.pivot) v.pivot.push_back(vector_string(forbidden.data().lift(g)));
  return v;
}

std::vector<TypeVerdict> admissible_pencil_types(bool search_inside) {
  const std::vector<std::pair<int, int>> border = {{7, 0}, {5, 4}, {3, 8}, {1, 11}, {0, 13}};
  std::vector<TypeVerdict> rejected;
  for (auto [p, q] : border) {
    TypeVerdict v = search_pencil_type(p, q);
    if (!v.realizable) rejected.push_back(v);
  }
  // A pencil of type (p,q) contains one of type (p',q') when p >= p' and
  // p + q >= p' + q': drop lines from 3-fibers.
  auto contains = [](int p, int q, int p2, int q2) { return p >= p2 && p + q >= p2 + q2; };
  std::vector<TypeVerdict> out;
  for (int p = 0; p <= 7; ++p)
    for (int q = 0; 3 * p + q <= 21 && 3 * p + 2 * q <= 26; ++q) {
      auto it = std::find_if(border.begin(), border.end(), [&](auto b) { return b.first == p && b.second == q; });
      if (it != border.end() || (search_inside && within_euler_bound(p, q))) {
        out.push_back(search_pencil_type(p, q));
        continue;
      }
      TypeVerdict v;
      v.p = p;
      v.q = q;
      v.within_bound = within_euler_bound(p, q);
      bool blocked = std::any_of(rejected.begin(), rejected.end(),
                                 [&](const TypeVerdict &r) { return contains(p, q, r.p, r.q); });
      v.realizable = !blocked && v.within_bound;
      out.push_back(v);
    }
  return out;
}

namespace {

std::string group_structure(const DiscriminantForm &d, const std::vector<Elem> &members) {
  std::map<long, std::vector<long>> by_prime; // prime -> orders of its elements
  for (const auto &m : members) {
    long o = d.elem_order(m);
    if (o == 1) continue;
    long p = 2;
    while (o % p) ++p;
    by_prime[p].push_back(o);
  }
  if (by_prime.empty()) return "0";
  std::string s;
  for (const auto &[p, orders] : by_prime) {
    // c_k = #{x : p^k x = 0} = p^{sum min(k, a_i)}
    long maxo = *std::max_element(orders.begin(), orders.end());
    std::vector<long> logs{0};
    for (long pk = p; pk <= maxo; pk *= p) {
      long c = 1 + std::count_if(orders.begin(), orders.end(), [&](long o) { return pk % o == 0; });
      long lg = 0;
      while (c > 1) {
        c /= p;
        ++lg;
      }
      logs.push_back(lg);
    }
    std::vector<long> parts; // parts[k-1] = #{i : a_i >= k}
    for (std::size_t k = 1; k < logs.size(); ++k) parts.push_back(logs[k] - logs[k - 1]);
    std::vector<long> factors;
    for (std::size_t k = 0; k < parts.size(); ++k) {
      long exactly = parts[k] - (k + 1 < parts.size() ? parts[k + 1] : 0);
      long order = 1;
      for (std::size_t t = 0; t <= k; ++t) order *= p;
      for (long t = 0; t < exactly; ++t) factors.push_back(order);
    }
    for (long f : factors) s += (s.empty() ? "Z" : "+Z") + std::to_string(f);
  }
  return s;
}

} // namespace

std::vector<PivotClass> geometric_pivots(int p, int q) {
  PencilLattice pl(p, q);
  ForbiddenClasses forbidden(pl.polarized());
  const DiscriminantData &dd = forbidden.data();
  std::map<std::vector<Elem>, std::size_t> orbit_size;
  std::vector<PivotClass> out;
  RatVector h(pl.dim());
  h[PencilLattice::h_index] = 1;
  search_geometric(
      pl, forbidden,
      [&](const Extension &ext, const std::vector<Elem> &gens) {
        if (!nikulin_embeds(ext.lattice)) return Visit::Continue;
        std::set<Elem> members{Elem(dd.form.ngens(), 0)};
        for (const auto &g : gens) {
          std::set<Elem> next = members;
          for (const auto &m : members) {
            Elem x = m;
            for (long k = 1; k < dd.form.elem_order(g); ++k) {
              x = dd.form.add(x, g);
              next.insert(x);
            }
          }
          members = next;
        }
        std::vector<Elem> key(members.begin(), members.end());
        PivotClass pc;
        pc.structure = group_structure(dd.form, key);
        pc.subgroups = gens.empty() ? 1 : orbit_size.at(key);
        for (const auto &g : gens) pc.generators.push_back(dd.lift(g));
        pc.det = ext.lattice.det();
        pc.lines = lines_of_polarized(PolarizedLattice(ext.lattice, to_integer(solve_left(ext.basis, h)))).size();
        out.push_back(pc);
        return Visit::Continue;
      },
      &orbit_size);
  std::sort(out.begin(), out.end(), [](const PivotClass &a, const PivotClass &b) {
    return a.structure != b.structure ? a.structure < b.structure : a.subgroups < b.subgroups;
  });
  return out;
}

} // namespace k3

namespace k3 {

// ---------------------------------------------------------------------------
// Section lattices

SectionLattice::SectionLattice(const PencilLattice &pl, const std::vector<RatVector> &pivot,
                               const SectionData &sections)
    : pencil_(pl) {
  const std::size_t n0 = pl.dim(), k = pivot.size(), m = sections.coords.size();
  if (sections.products.size() != m) throw pencil_error("section products have the wrong size");
  const IntMatrix &g = pl.lattice().gram;
  const RatMatrix gq = to_rational(g);
  std::vector<IntVector> prods;
  for (const auto &c : sections.coords) prods.push_back(pl.section_products(c));
  auto integral = [](const Rational &x, const char *what) {
    if (x.get_den() != 1) throw pencil_error(std::string("non-integral product: ") + what);
    return x.get_num();
  };
  const std::size_t n = n0 + k + m;
  IntMatrix gram(n, n);
  for (std::size_t i = 0; i < n0; ++i)
    for (std::size_t j = 0; j < n0; ++j) gram(i, j) = g(i, j);
  for (std::size_t a = 0; a < k; ++a) {
    RatVector gv = gq * pivot[a];
    for (std::size_t j = 0; j < n0; ++j) gram(n0 + a, j) = gram(j, n0 + a) = integral(gv[j], "pivot and pencil");
    for (std::size_t b = 0; b < k; ++b)
      gram(n0 + a, n0 + b) = integral(bilinear(gq, pivot[a], pivot[b]), "pivot classes");
    for (std::size_t i = 0; i < m; ++i) {
      Rational x = 0;
      for (std::size_t j = 0; j < n0; ++j) x += pivot[a][j] * prods[i][j];
      gram(n0 + k + i, n0 + a) = gram(n0 + a, n0 + k + i) = integral(x, "pivot and section");
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (sections.products[i].size() != m) throw pencil_error("section products have the wrong size");
    for (std::size_t j = 0; j < n0; ++j) gram(n0 + k + i, j) = gram(j, n0 + k + i) = prods[i][j];
    for (std::size_t j = 0; j < m; ++j) {
      if (sections.products[i][j] != sections.products[j][i]) throw pencil_error("section products are not symmetric");
      gram(n0 + k + i, n0 + k + j) = sections.products[i][j];
    }
  }
  GeneratedLattice gl = lattice_from_generators(gram);
  for (std::size_t i = 0; i < n0; ++i) basis_.push_back(gl.coords.row(i));
  for (std::size_t a = 0; a < k; ++a) pivot_.push_back(gl.coords.row(n0 + a));
  for (std::size_t i = 0; i < m; ++i) sections_.push_back(gl.coords.row(n0 + k + i));
  s_ = PolarizedLattice(gl.lattice, basis_[PencilLattice::h_index]);
}

IntVector SectionLattice::pencil_products(const IntVector &v) const {
  IntVector gv = s_.base.gram * v;
  IntVector out(basis_.size());
  for (std::size_t j = 0; j < basis_.size(); ++j)
    for (std::size_t i = 0; i < gv.size(); ++i) out[j] += gv[i] * basis_[j][i];
  return out;
}

SectionLattice::Analysis SectionLattice::analyze() const {
  Analysis a;
  Signature sg = signature(s_.base.gram);
  a.hyperbolic = sg.pos == 1 && sg.zero == 0 && s_.base.is_even();
  if (!a.hyperbolic) return a;
  PolarizedFrame frame(s_);
  a.root_in_perp = !frame.vectors(0, -2).empty();
  if (a.root_in_perp) return a;
  a.elliptic_pencil = !frame.vectors(2, 0).empty();
  if (a.elliptic_pencil) return a;
  a.lines = frame.vectors(1, -2);
  const IntVector gl = s_.base.gram * axis();
  for (const auto &v : a.lines) {
    Integer x = 0;
    for (std::size_t i = 0; i < v.size(); ++i) x += gl[i] * v[i];
    if (x == 1) a.pencil.push_back(v);
    else if (x == 0) {
      a.sections.push_back(v);
      a.section_coords.push_back(pencil_.coordinates_of(pencil_products(v)));
    } else if (v != axis()) throw pencil_error("line with product outside {0,1} with the axis");
  }
  return a;
}

namespace {

// Cosets of discriminant classes: roots in h-perp, elliptic pencils and lines.
class CosetTable {
public:
  explicit CosetTable(const PolarizedLattice &s) : frame_(s), dd_(discriminant_data(s.base)) {}
  const DiscriminantData &data() const { return dd_; }
  bool forbidden(const Elem &x) {
    auto it = bad_.find(x);
    if (it != bad_.end()) return it->second;
    const RatVector c = dd_.lift(x);
    bool b = !frame_.coset_vectors(c, 0, -2).empty() || !frame_.coset_vectors(c, 2, 0).empty();
    return bad_.emplace(x, b).first->second;
  }
  bool adds_lines(const Elem &x) {
    auto it = lines_.find(x);
    if (it != lines_.end()) return it->second;
    bool b = !dd_.form.is_zero(x) && !frame_.coset_vectors(dd_.lift(x), 1, -2).empty();
    return lines_.emplace(x, b).first->second;
  }

private:
  PolarizedFrame frame_;
  DiscriminantData dd_;
  std::map<Elem, bool> bad_, lines_;
};

} // namespace

RealizationResult step4_realizable(const PolarizedLattice &s, bool keep_lines) {
  CosetTable table(s);
  RealizationResult r;
  if (table.forbidden(Elem(table.data().form.ngens(), 0))) return r;
  auto ok = [&](const Elem &x) { return !table.forbidden(x) && !(keep_lines && table.adds_lines(x)); };
  ExtensionSearchResult res = search_extensions(
      s.base,
      [&](const Extension &ext, const std::vector<Elem> &) {
        return nikulin_embeds(ext.lattice) ? Visit::Accept : Visit::Continue;
      },
      [&](const DiscriminantForm &, const Elem &x) { return ok(x); },
      [&](const std::vector<Elem> &members) { return std::all_of(members.begin(), members.end(), ok); });
  r.realizable = res.accepted;
  r.subgroups = res.visited;
  for (const auto &g : res.pivot) r.pivot.push_back(table.data().lift(g));
  return r;
}

// ---------------------------------------------------------------------------
// Triplets

namespace {

std::array<int, 6> full_coordinates(int point) {
  std::array<int, 6> e{};
  int x = point, sum = 0;
  for (int i = 0; i < 4; ++i) {
    e[i] = x % 3;
    x /= 3;
    sum += e[i];
  }
  e[4] = (3 - sum % 3) % 3;
  e[5] = 0;
  return e;
}

int index_of_full(std::array<int, 6> e) {
  const int shift = e[5];
  int idx = 0, mult = 1;
  for (int i = 0; i < 4; ++i) {
    idx += ((e[i] - shift + 3) % 3) * mult;
    mult *= 3;
  }
  return idx;
}

using Mask = unsigned __int128;

PointSet from_mask(Mask m) {
  PointSet s;
  for (int i = 0; i < kTripletPoints; ++i)
    if ((m >> i) & 1) s.set(i);
  return s;
}

} // namespace

TripletSpace::TripletSpace() {
  for (int x = 0; x < kTripletPoints; ++x) {
    full_.push_back(full_coordinates(x));
    reps_.push_back(CoordinateVector{std::vector<int>(full_[x].begin(), full_[x].end()), {}});
  }
  neg_sum_.assign(kTripletPoints, std::vector<int>(kTripletPoints));
  diff_.assign(kTripletPoints, std::vector<int>(kTripletPoints));
  for (int a = 0; a < kTripletPoints; ++a)
    for (int b = 0; b < kTripletPoints; ++b) {
      std::array<int, 6> ns{}, df{};
      for (int i = 0; i < 6; ++i) {
        ns[i] = (6 - full_[a][i] - full_[b][i]) % 3;
        df[i] = (3 + full_[a][i] - full_[b][i]) % 3;
      }
      neg_sum_[a][b] = index_of_full(ns);
      diff_[a][b] = index_of_full(df);
    }

  // census of lines and planes through the origin
  for (int d = 1; d < kTripletPoints; ++d) {
    switch (kind_of_direction(d)) {
    case 0: ++census_.isotropic_lines; break;
    case 1: ++census_.positive_lines; break;
    default: ++census_.negative_lines; break;
    }
    if (kind_of_direction(d) == 1) positive_dirs_.push_back(d);
  }
  census_.isotropic_lines /= 2;
  census_.positive_lines /= 2;
  census_.negative_lines /= 2;
  std::set<Mask> planes;
  for (int u = 1; u < kTripletPoints; ++u)
    for (int v = u + 1; v < kTripletPoints; ++v) {
      if (v == add(u, u)) continue;
      Mask m = 0;
      for (int x = 0; x < 3; ++x)
        for (int y = 0; y < 3; ++y) {
          int pt = 0;
          for (int t = 0; t < x; ++t) pt = add(pt, u);
          for (int t = 0; t < y; ++t) pt = add(pt, v);
          m |= Mask(1) << pt;
        }
      planes.insert(m);
    }
  for (Mask m : planes) {
    int kinds[3] = {0, 0, 0};
    for (int d = 1; d < kTripletPoints; ++d)
      if ((m >> d) & 1) ++kinds[kind_of_direction(d)];
    const int iso = kinds[0] / 2, pos = kinds[1] / 2, neg = kinds[2] / 2;
    if (iso == 1 && pos == 3) ++census_.positive_planes;
    else if (iso == 1 && neg == 3) {
      ++census_.negative_planes;
      std::set<Mask> translates;
      for (int t = 0; t < kTripletPoints; ++t) {
        Mask tm = 0;
        for (int d = 0; d < kTripletPoints; ++d)
          if ((m >> d) & 1) tm |= Mask(1) << add(d, t);
        translates.insert(tm);
      }
      for (Mask tm : translates) negative_planes_.push_back(from_mask(tm));
    } else if (iso == 2) ++census_.hyperbolic_planes;
    else if (pos == 2 && neg == 2) ++census_.definite_planes;
    else throw pencil_error("unexpected plane type in the triplet space");
  }
  std::set<std::array<int, 3>> iso_lines;
  for (int a = 0; a < kTripletPoints; ++a)
    for (int b = a + 1; b < kTripletPoints; ++b)
      if (kind_of_direction(diff_[b][a]) == 0) {
        std::array<int, 3> l{a, b, neg_sum_[a][b]};
        std::sort(l.begin(), l.end());
        iso_lines.insert(l);
      }
  isotropic_lines_.assign(iso_lines.begin(), iso_lines.end());

  // linear parts: permutations of the six fibers and a global sign
  std::array<int, 6> perm{0, 1, 2, 3, 4, 5};
  do {
    for (int sign : {1, 2}) {
      std::array<int, kTripletPoints> img{};
      for (int x = 0; x < kTripletPoints; ++x) {
        std::array<int, 6> e{};
        for (int i = 0; i < 6; ++i) e[perm[i]] = (sign * full_[x][i]) % 3;
        img[x] = index_of_full(e);
      }
      linear_.push_back(img);
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
}

int TripletSpace::add(int a, int b) const {
  std::array<int, 6> e{};
  for (int i = 0; i < 6; ++i) e[i] = (full_[a][i] + full_[b][i]) % 3;
  return index_of_full(e);
}

int TripletSpace::kind_of_direction(int d) const {
  int nz = 0;
  for (int i = 0; i < 6; ++i) nz += full_[d][i] != 0;
  return nz % 3;
}

int TripletSpace::point_of(const CoordinateVector &c) const {
  if (c.p() != 6 || c.q() != 0) throw pencil_error("triplet coordinates need type (6,0)");
  int sum = 0;
  std::array<int, 6> e{};
  for (int i = 0; i < 6; ++i) {
    e[i] = c.eps[i];
    sum += e[i];
  }
  if (sum % 3) throw pencil_error("coordinates violate the triplet condition: " + c.to_string());
  return index_of_full(e);
}

std::array<CoordinateVector, 3> TripletSpace::triplet(int point) const {
  std::array<CoordinateVector, 3> out;
  for (int c = 0; c < 3; ++c) {
    out[c] = reps_[point];
    for (auto &e : out[c].eps) e = (e + c) % 3;
  }
  return out;
}

TripletSpace::Kind TripletSpace::line_kind(int a, int b) const {
  if (a == b) throw pencil_error("a line needs two distinct points");
  switch (kind_of_direction(diff_[a][b])) {
  case 0: return Kind::Isotropic;
  case 1: return Kind::Positive;
  default: return Kind::Negative;
  }
}

int TripletSpace::section_product(const CoordinateVector &a, const CoordinateVector &b) {
  if (a == b) return -2;
  CoordinateStats st = coordinate_stats(a, b);
  bool same_triplet = true;
  const int d0 = (a.eps[0] - b.eps[0] + 3) % 3;
  for (int i = 1; i < a.p(); ++i)
    if ((a.eps[i] - b.eps[i] + 3) % 3 != d0) same_triplet = false;
  return st.com <= 1 && !same_triplet ? 1 : 0;
}

PointSet TripletSpace::convex_hull(PointSet s) const {
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<int> pts;
    for (int i = 0; i < kTripletPoints; ++i)
      if (s[i]) pts.push_back(i);
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j)
        if (kind_of_direction(diff_[pts[i]][pts[j]]) == 2) {
          int c = neg_sum_[pts[i]][pts[j]];
          if (!s[c]) {
            s.set(c);
            changed = true;
          }
        }
  }
  return s;
}

bool TripletSpace::contains_negative_plane(const PointSet &s) const {
  for (const auto &pl : negative_planes_)
    if ((pl & s) == pl) return true;
  return false;
}

std::vector<std::array<int, 3>> TripletSpace::two_lines_defects(const PointSet &s) const {
  std::set<std::array<int, 3>> out;
  for (const auto &l1 : isotropic_lines_) {
    if (!s[l1[0]] || !s[l1[1]] || !s[l1[2]]) continue;
    const int d0 = diff_[l1[1]][l1[0]];
    for (int e : positive_dirs_) {
      // the plane spanned by d0 and e is positive iff e, e + d0, e - d0 are
      if (kind_of_direction(add(e, d0)) != 1 || kind_of_direction(diff_[e][d0]) != 1) continue;
      std::array<int, 3> l2{add(l1[0], e), add(l1[1], e), add(l1[2], e)};
      int inside = s[l2[0]] + s[l2[1]] + s[l2[2]];
      if (inside == 2) {
        std::sort(l2.begin(), l2.end());
        out.insert(l2);
      }
    }
  }
  return {out.begin(), out.end()};
}

int TripletSpace::apply(std::size_t g, int point) const {
  return add(linear_[g / kTripletPoints][point], static_cast<int>(g % kTripletPoints));
}

PointSet TripletSpace::apply(std::size_t g, const PointSet &s) const {
  PointSet out;
  for (int i = 0; i < kTripletPoints; ++i)
    if (s[i]) out.set(apply(g, i));
  return out;
}

PointSet TripletSpace::canonical(const PointSet &s) const {
  std::vector<int> pts;
  for (int i = 0; i < kTripletPoints; ++i)
    if (s[i]) pts.push_back(i);
  if (pts.empty()) return s;
  // translation tables: add(x, t) for all x, t
  static thread_local std::vector<std::array<int, kTripletPoints>> plus;
  if (plus.empty()) {
    plus.resize(kTripletPoints);
    for (int x = 0; x < kTripletPoints; ++x)
      for (int t = 0; t < kTripletPoints; ++t) plus[x][t] = add(x, t);
  }
  Mask best = ~Mask(0);
  std::vector<int> img(pts.size());
  for (const auto &lin : linear_) {
    for (std::size_t i = 0; i < pts.size(); ++i) img[i] = lin[pts[i]];
    for (int t = 0; t < kTripletPoints; ++t) {
      Mask m = 0;
      for (int x : img) m |= Mask(1) << plus[x][t];
      if (m < best) best = m;
    }
  }
  return from_mask(best);
}

std::vector<CoordinateVector> TripletSpace::sections_of(const PointSet &s) const {
  std::vector<CoordinateVector> out;
  for (int i = 0; i < kTripletPoints; ++i)
    if (s[i])
      for (const auto &c : triplet(i)) out.push_back(c);
  std::sort(out.begin(), out.end());
  return out;
}

SectionLattice triplet_lattice(const TripletSpace &t, const PointSet &s) {
  PencilLattice pl(6, 0);
  SectionData data;
  for (int i = 0; i < kTripletPoints; ++i)
    if (s[i]) data.coords.push_back(t.representative(i));
  const std::size_t m = data.coords.size();
  data.products.assign(m, std::vector<int>(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) data.products[i][j] = TripletSpace::section_product(data.coords[i], data.coords[j]);
  return SectionLattice(pl, {pl.beta()}, data);
}

} // namespace k3

namespace k3 {

namespace {

struct Candidate {
  PointSet hull;
  int parent = -1, added = -1;
};

struct Outcome {
  enum class Kind { Pending, NegativePlane, Invalid, Unrealizable, Record } kind = Kind::Pending;
  TripletRecord record;
  PointSet actual;
};

Outcome examine(const TripletSpace &t, const PointSet &y) {
  Outcome o;
  SectionLattice sl = triplet_lattice(t, y);
  SectionLattice::Analysis a = sl.analyze();
  if (!a.valid()) {
    o.kind = Outcome::Kind::Invalid;
    return o;
  }
  for (const auto &c : a.section_coords) o.actual.set(t.point_of(c));
  TripletRecord &r = o.record;
  r.rank = sl.rank();
  r.det = sl.polarized().base.det();
  r.lines = a.lines.size();
  r.pencil = a.pencil.size();
  r.sections = a.sections.size();
  r.maximal = r.pencil == 18;
  r.weak = step4_realizable(sl.polarized(), false).realizable;
  if (!r.weak) {
    o.kind = Outcome::Kind::Unrealizable;
    return o;
  }
  r.strong = step4_realizable(sl.polarized(), true).realizable;
  Configuration cfg(sl.polarized(), a.lines);
  r.pencil_structure = format_structure(pencil_structure(cfg), true);
  r.linking_structure = format_structure(linking_structure(cfg), false);
  o.kind = Outcome::Kind::Record;
  return o;
}

} // namespace

TripletSurvey run_triplet_survey(const SurveyBudget &budget) {
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
  TripletSpace t;
  TripletSurvey out;
  std::map<std::string, int> record_of;        // canonical actual set -> record
  std::map<std::string, int> candidate_result; // canonical hull -> record or -1
  auto key = [](const PointSet &s) { return s.to_string(); };

  // the bare pencil
  {
    Outcome o = examine(t, PointSet());
    if (o.kind != Outcome::Kind::Record) throw pencil_error("the bare (6,0) pencil is not geometric");
    o.record.points = t.canonical(o.actual);
    record_of[key(o.record.points)] = 0;
    out.records.push_back(o.record);
  }
  const unsigned threads = std::max(1u, budget.threads);
  std::vector<int> level{0};
  while (!level.empty()) {
    // candidates of this level, deduplicated up to symmetry
    std::vector<Candidate> todo;
    std::vector<std::pair<int, std::string>> links; // (parent, hull key) for extremality
    for (int ri : level) {
      const PointSet base = out.records[ri].points;
      std::set<std::string> local;
      for (int x = 0; x < kTripletPoints; ++x) {
        if (base[x]) continue;
        PointSet y = base;
        y.set(x);
        y = t.convex_hull(y);
        if (!local.insert(key(y)).second) continue;
        ++out.nodes;
        if (t.contains_negative_plane(y)) {
          ++out.negative_plane;
          continue;
        }
        const std::string k = key(t.canonical(y));
        links.emplace_back(ri, k);
        if (candidate_result.count(k)) {
          ++out.duplicate;
          continue;
        }
        candidate_result[k] = -1;
        todo.push_back({y, ri, x});
      }
    }
    // examine candidates in parallel
    std::vector<Outcome> results(todo.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    auto worker = [&] {
      for (std::size_t i; !stop && (i = next++) < todo.size();) {
        if (budget.max_seconds > 0 && elapsed() > budget.max_seconds) {
          stop = true;
          break;
        }
        results[i] = examine(t, todo[i].hull);
      }
    };
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto &th : pool) th.join();
    if (stop) {
      out.stop_reason = "time budget exhausted";
      break;
    }

    std::vector<int> next_level;
    for (std::size_t i = 0; i < todo.size(); ++i) {
      Outcome &o = results[i];
      const std::string hk = key(t.canonical(todo[i].hull));
      if (o.kind == Outcome::Kind::Invalid) {
        ++out.invalid;
        continue;
      }
      if (o.kind == Outcome::Kind::Unrealizable) {
        ++out.unrealizable;
        continue;
      }
      o.record.points = t.canonical(o.actual);
      const std::string ak = key(o.record.points);
      auto it = record_of.find(ak);
      if (it != record_of.end()) {
        candidate_result[hk] = it->second;
        continue;
      }
      o.record.parent = todo[i].parent;
      o.record.added = todo[i].added;
      const int idx = static_cast<int>(out.records.size());
      record_of[ak] = idx;
      candidate_result[hk] = idx;
      out.records.push_back(o.record);
      next_level.push_back(idx);
    }
    for (const auto &[parent, hk] : links) {
      const int child = candidate_result[hk];
      if (child >= 0 && out.records[child].sections > out.records[parent].sections) out.records[parent].extremal = false;
    }
    if (budget.max_nodes > 0 && out.nodes >= budget.max_nodes && !next_level.empty()) {
      out.stop_reason = "node budget exhausted";
      break;
    }
    level = std::move(next_level);
  }
  out.complete = out.stop_reason.empty();
  out.seconds = elapsed();
  return out;
}

} // namespace k3
