#include "k3/config.hpp"

#include <algorithm>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>

namespace k3 {

ValidityReport validate_configuration(const PolarizedLattice &s) {
  ValidityReport r;
  r.even = s.base.is_even();
  if (!r.even) r.failures.push_back("lattice is not even");
  r.nondegenerate = s.base.det() != 0;
  if (!r.nondegenerate) r.failures.push_back("lattice is degenerate");
  Signature sg = signature(s.base.gram);
  r.hyperbolic = sg.pos == 1 && bilinear(s.base.gram, s.h, s.h) > 0;
  if (!r.hyperbolic) r.failures.push_back("lattice is not hyperbolic with h^2 > 0");
  if (!r.ok()) return r;

  PolarizedFrame frame(s);
  auto lines = frame.vectors(1, -2);
  r.line_count = lines.size();
  RatMatrix span(0, s.rank());
  span.append_row(to_rational(s.h));
  for (auto &a : lines) span.append_row(to_rational(a));
  r.spanned_by_lines = rank_of(span) == s.rank();
  if (!r.spanned_by_lines) r.failures.push_back("h and the lines do not span the lattice over Q");
  r.no_roots_in_perp = frame.vectors(0, -2).empty();
  if (!r.no_roots_in_perp) r.failures.push_back("h-perp contains a (-2)-vector");
  r.no_elliptic_pencil = frame.vectors(2, 0).empty();
  if (!r.no_elliptic_pencil) r.failures.push_back("an isotropic vector e has e.h = 2");
  return r;
}

// ------------------------------------------------------------ Configuration

Configuration::Configuration(PolarizedLattice s) : s_(std::move(s)) {
  lines_ = lines_of_polarized(s_);
  build();
}

Configuration::Configuration(PolarizedLattice s, std::vector<IntVector> lines) : s_(std::move(s)), lines_(std::move(lines)) {
  for (const auto &a : lines_) {
    if (a.size() != s_.rank()) throw config_error("line has wrong length");
    if (s_.base.dot(a, a) != -2 || s_.base.dot(a, s_.h) != 1) throw config_error("vector is not a line");
  }
  std::sort(lines_.begin(), lines_.end());
  if (std::adjacent_find(lines_.begin(), lines_.end()) != lines_.end()) throw config_error("repeated line");
  build();
}

void Configuration::build() {
  const std::size_t n = lines_.size();
  if (n > kMaxLines) throw config_error("too many lines");
  products_.assign(n, std::vector<int>(n, -2));
  adj_.assign(n, LineSet());
  std::vector<IntVector> ga(n);
  for (std::size_t i = 0; i < n; ++i) ga[i] = s_.base.gram * lines_[i];
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      Integer x = 0;
      for (std::size_t k = 0; k < lines_[j].size(); ++k) x += ga[i][k] * lines_[j][k];
      products_[i][j] = products_[j][i] = static_cast<int>(x.get_si());
      if (x == 1) adj_[i].set(j), adj_[j].set(i);
    }
}

int Configuration::find(const IntVector &a) const {
  auto it = std::lower_bound(lines_.begin(), lines_.end(), a);
  return it != lines_.end() && *it == a ? static_cast<int>(it - lines_.begin()) : -1;
}

// ------------------------------------------------------------ planes and pencils

std::vector<Plane> planes_of(const Configuration &c) {
  std::vector<Plane> out;
  const int n = static_cast<int>(c.size());
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      if (!c.meets(a, b)) continue;
      LineSet common = c.neighbours(a) & c.neighbours(b);
      for (int x = b + 1; x < n; ++x) {
        if (!common[x]) continue;
        LineSet rest = common & c.neighbours(x);
        for (int y = x + 1; y < n; ++y)
          if (rest[y]) out.push_back({a, b, x, y});
      }
    }
  for (const auto &pl : out) {
    IntVector sum(c.lattice().rank());
    for (int i : pl)
      for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += c.line(i)[k];
    if (sum != c.lattice().h) throw config_error("plane does not sum to h");
  }
  return out;
}

PencilData pencil_of(const Configuration &c, int axis) {
  PencilData pd;
  pd.axis = axis;
  LineSet members = c.neighbours(axis);
  LineSet done;
  for (std::size_t a = 0; a < c.size(); ++a) {
    if (!members[a] || done[a]) continue;
    std::vector<int> fiber;
    std::vector<int> stack{static_cast<int>(a)};
    done.set(a);
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      fiber.push_back(x);
      LineSet next = c.neighbours(x) & members & ~done;
      for (std::size_t y = 0; y < c.size(); ++y)
        if (next[y]) done.set(y), stack.push_back(static_cast<int>(y));
    }
    std::sort(fiber.begin(), fiber.end());
    if (fiber.size() == 3) {
      ++pd.p;
    } else if (fiber.size() == 1) {
      ++pd.q;
    } else {
      throw config_error("pencil fiber of size " + std::to_string(fiber.size()));
    }
    pd.fibers.push_back(fiber);
  }
  std::stable_sort(pd.fibers.begin(), pd.fibers.end(),
                   [](const auto &x, const auto &y) { return x.size() > y.size(); });
  return pd;
}

TypeCount pencil_structure(const Configuration &c) {
  TypeCount t;
  for (std::size_t i = 0; i < c.size(); ++i) {
    PencilData pd = pencil_of(c, static_cast<int>(i));
    ++t[{pd.p, pd.q}];
  }
  return t;
}

namespace {

std::vector<LineSet> triple_members(const Configuration &c) {
  std::vector<LineSet> out(c.size());
  for (std::size_t i = 0; i < c.size(); ++i)
    for (const auto &f : pencil_of(c, static_cast<int>(i)).fibers)
      if (f.size() == 3)
        for (int x : f) out[i].set(x);
  return out;
}

} // namespace

TypeCount linking_structure(const Configuration &c) {
  TypeCount t;
  auto trip = triple_members(c);
  for (std::size_t a = 0; a < c.size(); ++a)
    for (std::size_t b = a + 1; b < c.size(); ++b) {
      if (c.product(a, b) != 0) continue;
      LineSet common = c.neighbours(a) & c.neighbours(b);
      int mu1 = static_cast<int>(common.count());
      int mu3 = static_cast<int>((common & trip[a] & trip[b]).count());
      ++t[{mu1, mu3}];
    }
  return t;
}

std::string format_structure(const TypeCount &t, bool descending) {
  std::vector<std::pair<std::pair<int, int>, int>> items(t.begin(), t.end());
  if (descending) std::reverse(items.begin(), items.end());
  std::ostringstream out;
  bool first = true;
  for (const auto &[k, n] : items) {
    out << (first ? "" : " ") << '(' << k.first << ',' << k.second << ")^" << n;
    first = false;
  }
  return out.str();
}

SegreReport segre_count_check(const Configuration &c, const Plane &plane) {
  SegreReport r;
  r.lines = static_cast<long>(c.size());
  for (int i : plane) r.valency_sum_minus_8 += static_cast<long>(c.valency(i));
  r.valency_sum_minus_8 -= 8;
  return r;
}

// ------------------------------------------------------------ audit

namespace {

std::string names(std::initializer_list<std::size_t> idx) {
  std::string s;
  for (auto i : idx) s += (s.empty() ? "" : ",") + std::to_string(i);
  return s;
}

void audit_skew_sets(const Configuration &c, std::vector<std::string> &out) {
  const std::size_t n = c.size();
  LineSet all;
  for (std::size_t i = 0; i < n; ++i) all.set(i);
  std::vector<LineSet> skew(n);
  for (std::size_t i = 0; i < n; ++i) skew[i] = all & ~c.neighbours(i) & ~LineSet().set(i);

  // Pairwise disjoint lines a_1 < ... < a_m, with their common neighbours.
  std::vector<std::size_t> chosen;
  std::function<void(std::size_t, const LineSet &, const LineSet &)> grow = [&](std::size_t from, const LineSet &cand,
                                                                                 const LineSet &common) {
    const std::size_t m = chosen.size();
    const std::size_t k = common.count();
    if (m == 2) {
      for (std::size_t x = 0; x < n; ++x) {
        if (!common[x]) continue;
        if ((common & c.neighbours(x)).any()) {
          out.push_back("lines meeting two skew lines intersect each other");
          break;
        }
      }
    }
    if (m == 2 && (k > 10 || k == 9))
      out.push_back("skew pair " + names({chosen[0], chosen[1]}) + " has " + std::to_string(k) + " common neighbours");
    if (m >= 3 && k > 4) out.push_back(std::to_string(m) + " skew lines with " + std::to_string(k) + " common neighbours");
    if (m == 4 && k == 3) out.push_back("four skew lines with exactly three common neighbours");
    if (m >= 5 && k > 2) out.push_back(std::to_string(m) + " skew lines with " + std::to_string(k) + " common neighbours");
    if (m == 4 && k == 4) {
      LineSet eight = common;
      for (auto a : chosen) eight.set(a);
      for (std::size_t x = 0; x < n; ++x)
        if (!eight[x] && (c.neighbours(x) & eight).count() != 2)
          out.push_back("line " + std::to_string(x) + " does not meet exactly two lines of a quadric pattern");
    }
    if (k <= 2 && m >= 2) return; // no further bound can fail
    for (std::size_t a = from; a < n; ++a) {
      if (!cand[a]) continue;
      chosen.push_back(a);
      grow(a + 1, cand & skew[a], common & c.neighbours(a));
      chosen.pop_back();
    }
  };
  for (std::size_t a = 0; a < n; ++a) {
    chosen = {a};
    grow(a + 1, skew[a], c.neighbours(a));
  }
}

void audit_double_sextuples(const Configuration &c, std::vector<std::string> &out) {
  const std::size_t n = c.size();
  const IntVector &h = c.lattice().h;
  LineSet all;
  for (std::size_t i = 0; i < n; ++i) all.set(i);
  std::vector<std::size_t> a;
  // b_j (j <= |a|) candidates: meet every chosen a_i with i != j, and not a_j.
  auto candidates = [&](std::size_t j) {
    LineSet s = all & ~c.neighbours(a[j]);
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (i == j) continue;
      s &= c.neighbours(a[i]);
    }
    for (auto x : a) s.reset(x);
    return s;
  };
  std::function<void(std::size_t)> grow = [&](std::size_t from) {
    int empty = 0;
    std::vector<LineSet> cand(a.size());
    for (std::size_t j = 0; j < a.size(); ++j)
      if ((cand[j] = candidates(j)).none()) ++empty;
    if (empty > 1) return;
    if (a.size() == 6) {
      for (std::size_t miss = 0; miss < 6; ++miss) {
        bool others = true;
        for (std::size_t j = 0; j < 6; ++j)
          if (j != miss && cand[j].none()) others = false;
        if (!others) continue;
        // one choice of b_j per j is enough: the completion is forced
        IntVector sum(h.size());
        for (std::size_t k = 0; k < h.size(); ++k) sum[k] = 3 * h[k];
        for (auto x : a)
          for (std::size_t k = 0; k < h.size(); ++k) sum[k] -= c.line(x)[k];
        for (std::size_t j = 0; j < 6; ++j) {
          if (j == miss) continue;
          std::size_t b = 0;
          while (!cand[j][b]) ++b;
          for (std::size_t k = 0; k < h.size(); ++k) sum[k] -= c.line(b)[k];
        }
        int idx = c.find(sum);
        if (idx < 0 || !cand[miss][idx]) out.push_back("partial double sextuple without completion");
      }
      return;
    }
    for (std::size_t x = from; x < n; ++x) {
      bool skew = true;
      for (auto y : a)
        if (c.product(x, y) != 0) skew = false;
      if (!skew) continue;
      a.push_back(x);
      grow(x + 1);
      a.pop_back();
    }
  };
  grow(0);
}

} // namespace

std::vector<std::string> skew_lemma_audit(const Configuration &c) {
  std::vector<std::string> out;
  const std::size_t n = c.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (c.product(i, j) != 0 && c.product(i, j) != 1)
        out.push_back("lines " + names({i, j}) + " have product " + std::to_string(c.product(i, j)));
  if (!out.empty()) return out;

  std::vector<Plane> planes;
  try {
    planes = planes_of(c);
  } catch (const config_error &e) {
    out.push_back(e.what());
    return out;
  }
  for (const auto &pl : planes) {
    LineSet in;
    for (int i : pl) in.set(i);
    for (std::size_t x = 0; x < n; ++x) {
      if (in[x]) continue;
      std::size_t k = 0;
      for (int i : pl) k += c.meets(x, i);
      if (k != 1) out.push_back("line " + std::to_string(x) + " meets " + std::to_string(k) + " lines of a plane");
    }
    if (!segre_count_check(c, pl).ok()) out.push_back("Segre identity fails on a plane");
  }

  static const int bound[] = {12, 13, 15, 16, 18, 18, 20};
  for (std::size_t i = 0; i < n; ++i) {
    PencilData pd;
    try {
      pd = pencil_of(c, static_cast<int>(i));
    } catch (const config_error &e) {
      out.push_back(e.what());
      continue;
    }
    if (pd.p > 6) {
      out.push_back("line " + std::to_string(i) + " has multiplicity " + std::to_string(pd.p));
      continue;
    }
    if (pd.valency() > bound[pd.p])
      out.push_back("line " + std::to_string(i) + " of type (" + std::to_string(pd.p) + "," + std::to_string(pd.q) +
                    ") exceeds the valency bound");
  }
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b) {
      std::size_t common = (c.neighbours(a) & c.neighbours(b)).count();
      if (c.meets(a, b) && common > 2) out.push_back("adjacent pencils share more than two lines");
    }
  audit_skew_sets(c, out);
  audit_double_sextuples(c, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ------------------------------------------------------------ Dynkin diagrams

std::string DynkinComponent::name() const {
  if (kind == Kind::Other) return "?";
  return std::string(kind == Kind::Parabolic ? "~" : "") + family + std::to_string(index);
}

namespace {

DynkinComponent classify(const Configuration &c, std::vector<int> verts) {
  DynkinComponent d;
  std::sort(verts.begin(), verts.end());
  d.vertices = verts;
  const std::size_t n = verts.size();
  IntMatrix g(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g(i, j) = i == j ? -2 : c.product(verts[i], verts[j]);
  Signature s = signature(g);
  if (s.pos != 0 || s.zero > 1) return d;
  d.kind = s.zero == 0 ? DynkinComponent::Kind::Elliptic : DynkinComponent::Kind::Parabolic;
  d.milnor = static_cast<int>(s.neg);

  std::vector<int> deg(n, 0);
  std::size_t edges = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && g(i, j) != 0) ++deg[i], edges += (i < j);
  auto arms = [&](std::size_t center) {
    std::vector<int> lengths;
    for (std::size_t nb = 0; nb < n; ++nb) {
      if (nb == center || g(center, nb) == 0) continue;
      int len = 1;
      std::size_t prev = center, cur = nb;
      while (deg[cur] == 2) {
        std::size_t next = n;
        for (std::size_t y = 0; y < n; ++y)
          if (y != cur && y != prev && g(cur, y) != 0) next = y;
        prev = cur;
        cur = next;
        ++len;
      }
      lengths.push_back(len);
    }
    std::sort(lengths.begin(), lengths.end());
    return lengths;
  };
  std::vector<std::size_t> branch;
  for (std::size_t i = 0; i < n; ++i)
    if (deg[i] >= 3) branch.push_back(i);
  const int ni = static_cast<int>(n);

  if (d.kind == DynkinComponent::Kind::Elliptic) {
    if (branch.empty()) {
      d.family = 'A', d.index = ni, d.kappa = ni + 1;
    } else {
      auto l = arms(branch[0]);
      if (l[0] == 1 && l[1] == 1)
        d.family = 'D', d.index = ni, d.kappa = 2 * ni - 2;
      else
        d.family = 'E', d.index = ni, d.kappa = ni == 6 ? 12 : ni == 7 ? 18 : 30;
    }
  } else {
    if (edges == n) {
      d.family = 'A', d.index = ni - 1, d.kappa = ni;
    } else if (branch.size() == 2 || deg[branch[0]] == 4) {
      d.family = 'D', d.index = ni - 1, d.kappa = 2 * (ni - 1) - 2;
    } else {
      d.family = 'E', d.index = ni - 1, d.kappa = ni == 7 ? 12 : ni == 8 ? 18 : 30;
    }
    IntMatrix k = kernel_basis(g);
    Integer sign = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (sign == 0 && k(0, i) != 0) sign = k(0, i) > 0 ? 1 : -1;
      d.kernel.push_back(k(0, i).get_si() * sign.get_si());
    }
    long total = 0;
    for (long x : d.kernel) total += x;
    if (total != d.kappa) throw config_error("kernel coefficients disagree with the affine type");
  }
  return d;
}

} // namespace

GraphAnalysis parabolic_components(const Configuration &c, const std::vector<int> &subset) {
  GraphAnalysis ga;
  LineSet in;
  for (int x : subset) in.set(x);
  LineSet done;
  for (int x : subset) {
    if (done[x]) continue;
    std::vector<int> comp, stack{x};
    done.set(x);
    while (!stack.empty()) {
      int y = stack.back();
      stack.pop_back();
      comp.push_back(y);
      LineSet next = c.neighbours(y) & in & ~done;
      for (std::size_t z = 0; z < c.size(); ++z)
        if (next[z]) done.set(z), stack.push_back(static_cast<int>(z));
    }
    DynkinComponent d = classify(c, comp);
    if (d.kind != DynkinComponent::Kind::Elliptic) ga.elliptic = false;
    if (d.kind == DynkinComponent::Kind::Other) ga.parabolic = false;
    ga.milnor += d.milnor;
    ga.components.push_back(d);
  }
  std::sort(ga.components.begin(), ga.components.end(),
            [](const auto &a, const auto &b) { return a.vertices < b.vertices; });
  return ga;
}

IntVector kernel_class(const Configuration &c, const DynkinComponent &affine) {
  if (affine.kind != DynkinComponent::Kind::Parabolic) throw config_error("kernel class needs an affine diagram");
  IntVector v(c.lattice().rank());
  for (std::size_t i = 0; i < affine.vertices.size(); ++i)
    for (std::size_t k = 0; k < v.size(); ++k) v[k] += affine.kernel[i] * c.line(affine.vertices[i])[k];
  return v;
}

PseudoPencil pseudo_pencil(const Configuration &c, const IntVector &v) {
  PseudoPencil pp;
  pp.v = v;
  const Lattice &l = c.lattice().base;
  if (l.dot(v, v) != 0) throw config_error("pseudo-pencil needs an isotropic vector");
  Integer g = 0;
  for (const auto &x : v) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
  if (g != 1) throw config_error("pseudo-pencil needs a primitive vector");
  Integer deg = l.dot(v, c.lattice().h);
  if (deg <= 0) throw config_error("pseudo-pencil needs v.h > 0");
  if (deg == 2) throw config_error("isotropic vector of degree 2");
  pp.degree = deg.get_si();
  for (std::size_t i = 0; i < c.size(); ++i) {
    Integer x = l.dot(c.line(i), v);
    if (x == 0) pp.members.push_back(static_cast<int>(i));
    if (x == 1) pp.sections.push_back(static_cast<int>(i));
  }
  pp.fibers = parabolic_components(c, pp.members);
  if (pp.degree == 1 && c.size() != 1) pp.violations.push_back("degree 1 with more than one line");
  if (!pp.fibers.parabolic) pp.violations.push_back("pseudo-pencil is not parabolic");
  if (pp.fibers.milnor > 18) pp.violations.push_back("Milnor number exceeds 18");
  int min_mu = 0;
  for (const auto &d : pp.fibers.components) {
    if (d.kind == DynkinComponent::Kind::Elliptic && d.kappa % pp.degree == 0)
      pp.violations.push_back("elliptic fiber " + d.name() + " should extend to its affine diagram");
    if (d.kind != DynkinComponent::Kind::Parabolic) continue;
    if (min_mu == 0 || d.milnor < min_mu) min_mu = d.milnor;
    for (int s : pp.sections) {
      long sum = 0;
      for (std::size_t i = 0; i < d.vertices.size(); ++i) sum += d.kernel[i] * c.product(s, d.vertices[i]);
      if (sum != pp.degree) pp.violations.push_back("section meets fiber " + d.name() + " with the wrong weight");
    }
  }
  const long size = static_cast<long>(pp.members.size());
  if (size > 24) pp.violations.push_back("more than 24 members");
  if (min_mu > 0 && size * min_mu > 18 * (min_mu + 1)) pp.violations.push_back("member count exceeds 18(1+1/mu)");
  return pp;
}

// ------------------------------------------------------------ files

namespace {

std::string strip_comments(std::istream &in) {
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    auto pos = line.find('#');
    if (pos != std::string::npos) line.erase(pos);
    out << line << '\n';
  }
  return out.str();
}

IntVector read_row(std::istream &in, std::size_t n) {
  IntVector v(n);
  for (auto &x : v) {
    std::string tok;
    if (!(in >> tok) || x.set_str(tok, 10) != 0) throw std::invalid_argument("bad vector entry");
  }
  return v;
}

PolarizedLattice read_lattice_body(std::istream &in, std::string &next) {
  IntMatrix g = parse_int_matrix(in);
  if (!g.is_square() || !g.is_symmetric()) throw std::invalid_argument("Gram matrix must be square and symmetric");
  next.clear();
  in >> next;
  IntVector h(g.rows());
  if (next == "h") {
    h = read_row(in, g.rows());
    next.clear();
    in >> next;
  } else if (g.rows() > 0) {
    h[0] = 1;
  }
  return PolarizedLattice(Lattice(g), h);
}

void write_row(std::ostream &out, const IntVector &v) {
  for (std::size_t i = 0; i < v.size(); ++i) out << (i ? " " : "") << v[i].get_str();
  out << '\n';
}

} // namespace

PolarizedLattice read_polarized_lattice(std::istream &in) {
  std::istringstream body(strip_comments(in));
  std::string next;
  PolarizedLattice s = read_lattice_body(body, next);
  if (!next.empty()) throw std::invalid_argument("unexpected token '" + next + "'");
  return s;
}

void write_polarized_lattice(std::ostream &out, const PolarizedLattice &s) {
  out << format_int_matrix(s.base.gram) << "h ";
  write_row(out, s.h);
}

Configuration read_configuration(std::istream &in) {
  std::istringstream body(strip_comments(in));
  std::string next;
  PolarizedLattice s = read_lattice_body(body, next);
  if (next.empty()) return Configuration(s);
  if (next != "lines") throw std::invalid_argument("expected 'lines'");
  long count = -1;
  if (!(body >> count) || count < 0) throw std::invalid_argument("bad line count");
  std::vector<IntVector> lines;
  for (long i = 0; i < count; ++i) lines.push_back(read_row(body, s.rank()));
  std::string extra;
  if (body >> extra) throw std::invalid_argument("unexpected token '" + extra + "'");
  try {
    return Configuration(s, lines);
  } catch (const config_error &e) {
    throw std::invalid_argument(e.what());
  }
}

void write_configuration(std::ostream &out, const Configuration &c) {
  write_polarized_lattice(out, c.lattice());
  out << "lines " << c.size() << '\n';
  for (const auto &a : c.lines()) write_row(out, a);
}

} // namespace k3
