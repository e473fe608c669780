#include "k3/enumeration.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <functional>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

namespace k3 {

// ---------------------------------------------------------------------------
// Symmetries of the coordinate space

CoordinateVector CoordinateSymmetry::apply(const CoordinateVector &c) const {
  CoordinateVector out{std::vector<int>(c.eps.size()), std::vector<int>(c.rho.size())};
  for (std::size_t i = 0; i < c.eps.size(); ++i) out.eps[fiber3[i]] = relabel[i][c.eps[i]];
  for (std::size_t k = 0; k < c.rho.size(); ++k) out.rho[fiber1[k]] = c.rho[k];
  return out;
}

RatVector CoordinateSymmetry::apply(const RatVector &v) const {
  const std::size_t p = fiber3.size(), q = fiber1.size();
  RatVector out(2 + 2 * p + q);
  out[0] = v[0];
  out[1] = v[1];
  for (std::size_t i = 0; i < p; ++i)
    for (int label : {1, 2}) {
      const Rational &c = v[2 + 2 * i + (label == 1 ? 0 : 1)];
      if (c == 0) continue;
      const int target = relabel[i][label];
      const std::size_t f = 2 + 2 * fiber3[i];
      if (target == 0) { // h - l - m_+ - m_-
        out[0] += c;
        out[1] -= c;
        out[f] -= c;
        out[f + 1] -= c;
      } else {
        out[f + (target == 1 ? 0 : 1)] += c;
      }
    }
  for (std::size_t k = 0; k < q; ++k) out[2 + 2 * p + fiber1[k]] += v[2 + 2 * p + k];
  return out;
}

namespace {

const std::array<std::array<int, 3>, 6> kS3 = {
    {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};

Integer factorial(int n) {
  Integer f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// P (x) Q vectors modulo P_{p,q} = Z^n, as strings of fractional parts.
std::string fractional_key(const RatVector &v) {
  std::string out;
  for (const auto &x : v) out += to_string(mod_rational(x, 1)) + ",";
  return out;
}

std::set<std::string> pivot_group(const std::vector<RatVector> &pivot, std::size_t n) {
  std::set<std::string> group{fractional_key(RatVector(n))};
  std::vector<RatVector> frontier{RatVector(n)};
  while (!frontier.empty()) {
    std::vector<RatVector> next;
    for (const auto &v : frontier)
      for (const auto &g : pivot) {
        RatVector w(n);
        for (std::size_t i = 0; i < n; ++i) w[i] = mod_rational(v[i] + g[i], 1);
        if (group.insert(fractional_key(w)).second) next.push_back(w);
      }
    frontier = std::move(next);
  }
  return group;
}

} // namespace

Integer SymmetryGroup::full_order(int p, int q) {
  Integer six = 1;
  for (int i = 0; i < p; ++i) six *= 6;
  return six * factorial(p) * factorial(q);
}

SymmetryGroup SymmetryGroup::stabilizer(int p, int q, const std::vector<RatVector> &pivot,
                                        const std::optional<CoordinateVector> &fixed, std::size_t max_order) {
  if (fixed && (fixed->p() != p || fixed->q() != q)) throw pencil_error("fixed coordinates of a different type");
  // size of the enumeration before the pivot filter
  Integer bound;
  if (fixed) {
    int ones = 0;
    for (int r : fixed->rho) ones += r;
    Integer two = 1;
    for (int i = 0; i < p; ++i) two *= 2;
    bound = two * factorial(p) * factorial(ones) * factorial(q - ones);
  } else {
    bound = full_order(p, q);
  }
  if (bound > Integer(static_cast<unsigned long>(max_order)))
    throw pencil_error("symmetry group of order " + bound.get_str() + " exceeds the limit");

  const std::size_t n = 2 + 2 * p + q;
  const std::set<std::string> pgroup = pivot_group(pivot, n);
  SymmetryGroup g;
  std::vector<int> perm3(p);
  std::iota(perm3.begin(), perm3.end(), 0);
  // 1-fiber permutations preserving the fixed vector
  std::vector<std::vector<int>> perms1;
  {
    std::vector<int> on, off;
    for (int k = 0; k < q; ++k) ((fixed && fixed->rho[k]) ? on : off).push_back(k);
    std::vector<int> a = on, b = off;
    do {
      do {
        std::vector<int> img(q);
        for (std::size_t i = 0; i < on.size(); ++i) img[on[i]] = a[i];
        for (std::size_t i = 0; i < off.size(); ++i) img[off[i]] = b[i];
        perms1.push_back(img);
      } while (std::next_permutation(b.begin(), b.end()));
    } while (std::next_permutation(a.begin(), a.end()));
  }
  CoordinateSymmetry e;
  e.relabel.assign(p, kS3[0]);
  std::function<void(int)> relabels = [&](int i) {
    if (i == p) {
      for (const auto &f1 : perms1) {
        e.fiber1 = f1;
        bool keeps = true;
        for (const auto &v : pivot)
          if (!pgroup.count(fractional_key(e.apply(v)))) {
            keeps = false;
            break;
          }
        if (keeps) g.elems_.push_back(e);
      }
      return;
    }
    for (const auto &t : kS3) {
      if (fixed && t[fixed->eps[i]] != fixed->eps[perm3[i]]) continue;
      e.relabel[i] = t;
      relabels(i + 1);
    }
  };
  do {
    e.fiber3 = perm3;
    relabels(0);
  } while (std::next_permutation(perm3.begin(), perm3.end()));
  return g;
}

SymmetryGroup SymmetryGroup::set_stabilizer(const std::vector<CoordinateVector> &set) const {
  std::vector<CoordinateVector> sorted = set;
  std::sort(sorted.begin(), sorted.end());
  SymmetryGroup out;
  std::vector<CoordinateVector> img(sorted.size());
  for (const auto &g : elems_) {
    for (std::size_t i = 0; i < sorted.size(); ++i) img[i] = g.apply(sorted[i]);
    std::sort(img.begin(), img.end());
    if (img == sorted) out.elems_.push_back(g);
  }
  return out;
}

std::vector<CoordinateVector> SymmetryGroup::canonical(std::vector<CoordinateVector> set) const {
  std::sort(set.begin(), set.end());
  std::vector<CoordinateVector> best = set, img(set.size());
  for (const auto &g : elems_) {
    for (std::size_t i = 0; i < set.size(); ++i) img[i] = g.apply(set[i]);
    std::sort(img.begin(), img.end());
    if (img < best) best = img;
  }
  return best;
}

CoordinateVector SymmetryGroup::orbit_min(const CoordinateVector &c) const {
  CoordinateVector best = c;
  for (const auto &g : elems_) {
    CoordinateVector x = g.apply(c);
    if (x < best) best = x;
  }
  return best;
}

// ---------------------------------------------------------------------------
// Section Gram test

namespace {

int num1(const CoordinateVector &c) { return std::accumulate(c.rho.begin(), c.rho.end(), 0); }

Signature rational_signature(const RatMatrix &m) {
  Integer den = 1;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), m(i, j).get_den_mpz_t());
  IntMatrix a(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) a(i, j) = Rational(m(i, j) * den).get_num();
  return signature(a);
}

} // namespace

SectionGramVerdict section_gram_test(const PencilLattice &pl, const SectionData &sections) {
  const std::size_t k = sections.coords.size();
  if (sections.products.size() != k) throw pencil_error("section products have the wrong size");
  const RatMatrix ginv = inverse(to_rational(pl.lattice().gram));
  std::vector<RatVector> prods;
  for (const auto &c : sections.coords) prods.push_back(to_rational(pl.section_products(c)));
  SectionGramVerdict v;
  v.projection = RatMatrix(k, k);
  v.closed_form = RatMatrix(k, k);
  const Rational dd = Rational(2 * pl.p()) + make_rational(pl.q(), 2) - 2;
  v.closed_form_agrees = true;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      const Rational sij = sections.products[i][j];
      v.projection(i, j) = sij - bilinear(ginv, prods[i], prods[j]);
      CoordinateStats st = coordinate_stats(sections.coords[i], sections.coords[j]);
      v.closed_form(i, j) = sij + dd / 9 + make_rational(st.com1, 2) -
                            make_rational(num1(sections.coords[i]) + num1(sections.coords[j]), 6) - make_rational(st.dif3, 3);
      if (v.closed_form(i, j) != v.projection(i, j)) v.closed_form_agrees = false;
    }
  if (k == 0) {
    v.semidefinite = true;
    v.rank_room = 2 * pl.p() + pl.q() <= 18;
    return v;
  }
  const Signature sg = rational_signature(v.projection);
  v.semidefinite = sg.pos == 0;
  v.rank = sg.neg + sg.pos;
  v.rank_room = static_cast<int>(v.rank) + 2 * pl.p() + pl.q() <= 18;
  return v;
}

// ---------------------------------------------------------------------------
// Descriptors

namespace {

std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// whitespace separated; octet supports keep their commas
std::vector<std::string> split_list(const std::string &s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

bool parse_bool(const std::string &s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw pencil_error("expected a boolean: " + s);
}

} // namespace

SurveyDescriptor read_survey_descriptor(std::istream &in) {
  SurveyDescriptor d;
  std::string line, s0;
  bool have_s0 = false;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw pencil_error("descriptor line without '=': " + line);
    const std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
    try {
      if (key == "p") d.p = std::stoi(val);
      else if (key == "q") d.q = std::stoi(val);
      else if (key == "pivot") d.pivot = split_list(val);
      else if (key == "s0") s0 = val, have_s0 = true;
      else if (key == "pmin") d.pmin = std::stoi(val);
      else if (key == "pmax") d.pmax = std::stoi(val);
      else if (key == "vmin") d.vmin = std::stoi(val);
      else if (key == "vmax") d.vmax = std::stoi(val);
      else if (key == "predicates") d.predicates = split_list(val);
      else if (key == "rigid") d.rigid = parse_bool(val);
      else if (key == "approach") {
        if (val != "partial" && val != "full") throw pencil_error("approach must be partial or full");
        d.full_orbits = val == "full";
      } else if (key == "extend_rank") d.extend_rank = parse_bool(val);
      else if (key == "max_nodes") d.max_nodes = std::stoul(val);
      else if (key == "max_seconds") d.max_seconds = std::stod(val);
      else if (key == "threads") d.threads = static_cast<unsigned>(std::stoul(val));
      else if (key == "max_group") d.max_group = std::stoul(val);
      else throw pencil_error("unknown descriptor key: " + key);
    } catch (const std::logic_error &) {
      throw pencil_error("bad value for " + key + ": " + val);
    }
  }
  if (!have_s0) throw pencil_error("descriptor needs s0");
  d.s0 = parse_coordinates(s0);
  if (d.s0.p() != d.p || d.s0.q() != d.q) throw pencil_error("s0 does not match p and q");
  return d;
}

void write_survey_descriptor(std::ostream &out, const SurveyDescriptor &d) {
  auto join = [](const std::vector<std::string> &v) {
    std::string s;
    for (const auto &x : v) s += (s.empty() ? "" : " ") + x;
    return s;
  };
  out << "p = " << d.p << "\nq = " << d.q << "\npivot = " << join(d.pivot) << "\ns0 = " << d.s0.to_string()
      << "\npmin = " << d.pmin << "\n";
  if (d.pmax != INT_MAX) out << "pmax = " << d.pmax << "\n";
  out << "vmin = " << d.vmin << "\n";
  if (d.vmax != INT_MAX) out << "vmax = " << d.vmax << "\n";
  out << "predicates = " << join(d.predicates) << "\nrigid = " << (d.rigid ? "true" : "false")
      << "\napproach = " << (d.full_orbits ? "full" : "partial") << "\nextend_rank = " << (d.extend_rank ? "true" : "false")
      << "\nmax_nodes = " << d.max_nodes << "\nmax_seconds = " << d.max_seconds << "\nthreads = " << d.threads
      << "\nmax_group = " << d.max_group << "\n";
}

std::vector<std::string> known_predicates() { return {"sstar<=4", "num1<=4", "num1!=6"}; }

// ---------------------------------------------------------------------------
// The enumerator

SectionEnumerator::SectionEnumerator(SurveyDescriptor d) : d_(std::move(d)), pl_(d_.p, d_.q) {
  if (d_.p < 0 || d_.q < 0 || 3 * d_.p + d_.q > 20) throw pencil_error("pencil type out of range");
  if (d_.s0.p() != d_.p || d_.s0.q() != d_.q) throw pencil_error("s0 does not match p and q");
  if (d_.full_orbits && !d_.rigid) throw pencil_error("comparing all sections needs the rigidity flag");
  if (d_.extend_rank && !d_.rigid) throw pencil_error("extending the rank needs the rigidity flag");
  const auto known = known_predicates();
  for (const auto &pr : d_.predicates)
    if (std::find(known.begin(), known.end(), pr) == known.end()) throw pencil_error("unknown predicate: " + pr);
  for (const auto &name : d_.pivot) pivot_.push_back(pl_.named_class(name));
  // validates the pivot
  build_pencil_lattice(d_.p, d_.q, d_.pivot);
  group_ = SymmetryGroup::stabilizer(d_.p, d_.q, pivot_, d_.s0, d_.max_group);
  if (std::find(d_.predicates.begin(), d_.predicates.end(), "sstar<=4") != d_.predicates.end()) {
    RatVector prod = to_rational(pl_.lattice().gram) * pl_.lstar();
    IntVector ip(prod.size());
    for (std::size_t i = 0; i < prod.size(); ++i) {
      if (prod[i].get_den() != 1) throw pencil_error("l* is not in the extension");
      ip[i] = prod[i].get_num();
    }
    lstar_ = pl_.coordinates_of(ip);
  }
}

std::variant<EnumState, std::string> SectionEnumerator::build(std::vector<CoordinateVector> adjoined,
                                                              std::vector<std::vector<int>> products) const {
  EnumState s;
  SectionData data{adjoined, products};
  std::shared_ptr<SectionLattice> lat;
  try {
    lat = std::make_shared<SectionLattice>(pl_, pivot_, data);
  } catch (const pencil_error &e) {
    return std::string("inconsistent products: ") + e.what();
  }
  SectionLattice::Analysis a = lat->analyze();
  if (!a.hyperbolic) return std::string("not hyperbolic");
  if (a.root_in_perp) return std::string("root in h-perp");
  if (a.elliptic_pencil) return std::string("elliptic pencil");
  s.adjoined = std::move(adjoined);
  s.products = std::move(products);
  s.lines = a.lines;
  s.sections = a.section_coords;
  std::sort(s.sections.begin(), s.sections.end());
  s.pencil_lines = a.pencil.size();
  const PolarizedLattice &pol = lat->polarized();
  const IntVector &s0 = lat->section(0);
  std::vector<IntVector> meeting;
  for (std::size_t i = 0; i < a.sections.size(); ++i)
    if (pol.base.dot(a.sections[i], s0) == 1) s.obverse.push_back(a.section_coords[i]);
  for (const auto &v : a.lines)
    if (pol.base.dot(v, s0) == 1) meeting.push_back(v);
  std::sort(s.obverse.begin(), s.obverse.end());
  s.val = static_cast<int>(meeting.size());
  // fibers of the pencil of s0: lines meeting s0 and each other
  std::vector<int> comp(meeting.size(), -1);
  int ncomp = 0;
  for (std::size_t i = 0; i < meeting.size(); ++i) {
    if (comp[i] >= 0) continue;
    std::vector<std::size_t> stack{i};
    comp[i] = ncomp;
    int size = 0;
    while (!stack.empty()) {
      std::size_t x = stack.back();
      stack.pop_back();
      ++size;
      for (std::size_t y = 0; y < meeting.size(); ++y)
        if (comp[y] < 0 && pol.base.dot(meeting[x], meeting[y]) == 1) {
          comp[y] = ncomp;
          stack.push_back(y);
        }
    }
    if (size == 3) ++s.mult;
    ++ncomp;
  }
  s.lattice = std::move(lat);
  return s;
}

EnumState SectionEnumerator::seed() const {
  auto r = build({d_.s0}, {{-2}});
  if (auto *err = std::get_if<std::string>(&r)) throw pencil_error("seed is not valid: " + *err);
  EnumState s = std::get<EnumState>(std::move(r));
  s.trace.push_back("seed " + d_.s0.to_string());
  return s;
}

bool SectionEnumerator::candidate_conditions(const std::vector<CoordinateVector> &sections,
                                             const CoordinateVector &c) const {
  for (const auto &s : sections)
    if (common_fibers({c, s}) > 4) return false;
  for (std::size_t i = 0; i < sections.size(); ++i)
    for (std::size_t j = i + 1; j < sections.size(); ++j)
      if (common_fibers({c, sections[i], sections[j]}) > 3) return false;
  return true;
}

std::vector<CoordinateVector> SectionEnumerator::step1_candidates(const EnumState &s) const {
  const CoordinateVector &s0 = d_.s0;
  const CoordinateVector unit = unit_coordinate(d_.p, d_.q);
  const std::vector<CoordinateVector> &known = s.sections;
  const SymmetryGroup stab = group_.set_stabilizer(d_.full_orbits ? s.sections : s.obverse);

  bool only_one_fibers = s.mult >= d_.pmax;
  for (std::size_t i = 1; i < s.adjoined.size(); ++i)
    if (common_fibers({s.adjoined[i], s0}) == 0) only_one_fibers = true; // 3-fibers come first
  const bool only_three_fibers = s.mult < d_.pmin;

  // every coordinate vector, 3-fiber candidates (com = 1) first
  std::vector<CoordinateVector> all;
  {
    CoordinateVector c{std::vector<int>(d_.p, 0), std::vector<int>(d_.q, 0)};
    std::function<void(int)> rec = [&](int i) {
      if (i == d_.p + d_.q) {
        all.push_back(c);
        return;
      }
      const int base = i < d_.p ? 3 : 2;
      for (int v = 0; v < base; ++v) {
        (i < d_.p ? c.eps[i] : c.rho[i - d_.p]) = v;
        rec(i + 1);
      }
    };
    rec(0);
  }
  std::vector<std::pair<int, CoordinateVector>> reps;
  std::set<CoordinateVector> seen;
  for (const auto &c : all) {
    const int com = common_fibers({c, s0});
    if (com > 1) continue;
    if (com == 1 && only_one_fibers) continue;
    if (com == 0 && only_three_fibers) continue;
    if (std::binary_search(known.begin(), known.end(), c)) continue;
    CoordinateVector r = stab.orbit_min(c);
    if (seen.insert(r).second) reps.emplace_back(com == 1 ? 0 : 1, r);
  }
  std::stable_sort(reps.begin(), reps.end(),
                   [](const auto &a, const auto &b) { return a.first != b.first ? a.first < b.first : a.second < b.second; });

  std::set<CoordinateVector> excluded;
  std::vector<CoordinateVector> out;
  for (const auto &[kind, c] : reps) {
    if (excluded.count(c)) continue;
    // sections pair integrally with the pivot classes
    bool ok = true;
    const RatVector cp = to_rational(pl_.section_products(c));
    for (const auto &v : pivot_) {
      Rational x = 0;
      for (std::size_t i = 0; i < v.size(); ++i) x += v[i] * cp[i];
      if (x.get_den() != 1) ok = false;
    }
    if (!ok) continue;
    // (2) the 3-fibers of the pencil of s0 map injectively to the pencil
    for (const auto &x : s.obverse)
      if (common_fibers({x, s0}) == 1 && common_fibers({s0, c, x}) != 0) ok = false;
    if (!ok) continue;
    // (3), (4) Gram of the projections
    SectionData data{s.adjoined, s.products};
    data.coords.push_back(c);
    for (std::size_t i = 0; i < s.adjoined.size(); ++i) data.products[i].push_back(i == 0 ? 1 : 0);
    std::vector<int> last(s.adjoined.size() + 1, 0);
    last[0] = 1;
    last.back() = -2;
    data.products.push_back(last);
    if (!section_gram_test(pl_, data).ok()) continue;
    // (5), (6)
    if (!candidate_conditions(known, c)) continue;
    // (7) com = 4 forces the completing section
    std::vector<CoordinateVector> implied;
    for (const auto &x : known)
      if (common_fibers({c, x}) == 4) implied.push_back(completing_coordinate(x, c));
    // (8) a 3-fiber of the pencil of s0 is completed
    if (kind == 0) implied.push_back(completing_coordinate(s0, c));
    for (const auto &y : implied) {
      if (!candidate_conditions(known, y)) ok = false;
      for (const auto &x : known)
        if (common_fibers({y, x}) == 4 && !candidate_conditions(known, completing_coordinate(x, y))) ok = false;
    }
    if (!ok) continue;
    out.push_back(c);
    for (const auto &y : implied)
      if (!std::binary_search(known.begin(), known.end(), y)) excluded.insert(stab.orbit_min(y));
  }
  return out;
}

std::variant<EnumState, std::string> SectionEnumerator::step2_validate(const EnumState &s,
                                                                       const CoordinateVector &candidate) const {
  auto adjoined = s.adjoined;
  auto products = s.products;
  adjoined.push_back(candidate);
  for (std::size_t i = 0; i < products.size(); ++i) products[i].push_back(i == 0 ? 1 : 0);
  std::vector<int> last(adjoined.size(), 0);
  last[0] = 1;
  last.back() = -2;
  products.push_back(last);
  auto r = build(std::move(adjoined), std::move(products));
  if (std::holds_alternative<std::string>(r)) return r;
  EnumState n = std::get<EnumState>(std::move(r));
  if (n.mult > d_.pmax) return std::string("too many 3-fibers through s0");
  if (n.val > d_.vmax) return std::string("valency of s0 too large");
  // obverse fibers: meeting sections share a fiber with s0
  const PolarizedLattice &pol = n.lattice->polarized();
  const IntVector &s0v = n.lattice->section(0);
  std::vector<IntVector> obv;
  std::vector<CoordinateVector> obv_coords;
  for (const auto &v : n.lines) {
    if (pol.base.dot(v, n.lattice->axis()) != 0 || v == n.lattice->axis()) continue;
    if (pol.base.dot(v, s0v) == 1) {
      obv.push_back(v);
      obv_coords.push_back(pl_.coordinates_of(n.lattice->pencil_products(v)));
    }
  }
  for (std::size_t i = 0; i < obv.size(); ++i)
    for (std::size_t j = i + 1; j < obv.size(); ++j)
      if (pol.base.dot(obv[i], obv[j]) == 1 && common_fibers({d_.s0, obv_coords[i], obv_coords[j]}) == 0)
        return std::string("incoherent obverse fibers");
  for (const auto &pr : d_.predicates) {
    if (pr == "sstar<=4") {
      int count = 0;
      for (const auto &x : n.sections) count += common_fibers({x, *lstar_}) == 1;
      if (count > 4) return std::string("predicate sstar<=4");
    } else if (pr == "num1<=4") {
      for (const auto &x : n.sections)
        if (num1(x) > 4) return std::string("predicate num1<=4");
    } else if (pr == "num1!=6") {
      for (const auto &x : n.sections)
        if (num1(x) == 6) return std::string("predicate num1!=6");
    }
  }
  n.trace = s.trace;
  n.trace.push_back("add " + candidate.to_string());
  return n;
}

std::string SectionEnumerator::canonical_key(const EnumState &s) const {
  std::string key = s.rank_extended ? "x" : "";
  for (const auto &c : group_.canonical(d_.full_orbits || s.rank_extended ? s.sections : s.obverse))
    key += c.to_string();
  return key;
}

std::vector<EnumState> SectionEnumerator::step3_canonicalize(std::vector<EnumState> states) const {
  std::set<std::string> seen;
  std::vector<EnumState> out;
  for (auto &s : states)
    if (seen.insert(canonical_key(s)).second) out.push_back(std::move(s));
  return out;
}

RealizationResult SectionEnumerator::step4_realizable(const EnumState &s) const {
  return k3::step4_realizable(s.lattice->polarized(), false);
}

std::vector<EnumState> SectionEnumerator::extend_rank(const EnumState &s) const {
  if (!d_.rigid) throw pencil_error("extending the rank needs the rigidity flag");
  std::vector<EnumState> out;
  if (s.rank() >= 20) return out;
  const std::size_t k = s.adjoined.size();
  std::vector<CoordinateVector> all;
  {
    CoordinateVector c{std::vector<int>(d_.p, 0), std::vector<int>(d_.q, 0)};
    std::function<void(int)> rec = [&](int i) {
      if (i == d_.p + d_.q) {
        all.push_back(c);
        return;
      }
      const int base = i < d_.p ? 3 : 2;
      for (int v = 0; v < base; ++v) {
        (i < d_.p ? c.eps[i] : c.rho[i - d_.p]) = v;
        rec(i + 1);
      }
    };
    rec(0);
  }
  const SymmetryGroup stab = group_.set_stabilizer(s.sections);
  std::set<CoordinateVector> reps;
  for (const auto &c : all)
    if (!std::binary_search(s.sections.begin(), s.sections.end(), c)) reps.insert(stab.orbit_min(c));
  for (const auto &c : reps) {
    if (!candidate_conditions(s.sections, c)) continue;
    // products with s_1, ..., s_{k-1}; s0 is disjoint from the new section
    std::vector<int> iota(k, 0);
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
      SectionData data{std::vector<CoordinateVector>(s.adjoined.begin(), s.adjoined.begin() + i), {}};
      data.coords.push_back(c);
      for (std::size_t a = 0; a < i; ++a) {
        std::vector<int> row(s.products[a].begin(), s.products[a].begin() + i);
        row.push_back(iota[a]);
        data.products.push_back(row);
      }
      std::vector<int> last(iota.begin(), iota.begin() + i);
      last.push_back(-2);
      data.products.push_back(last);
      if (!section_gram_test(pl_, data).ok()) return;
      if (i < k) {
        for (int v : {0, 1}) {
          if (i == 0 && v == 1) continue;
          iota[i] = v;
          rec(i + 1);
        }
        iota[i] = 0;
        return;
      }
      auto r = build(data.coords, data.products);
      if (auto *st = std::get_if<EnumState>(&r)) {
        if (st->rank() <= s.rank() || st->val != s.val || st->mult > d_.pmax) return;
        st->rank_extended = true;
        st->trace = s.trace;
        std::string prof;
        for (int v : iota) prof += std::to_string(v);
        st->trace.push_back("extend " + c.to_string() + " products " + prof);
        out.push_back(std::move(*st));
      }
    };
    rec(0);
  }
  return step3_canonicalize(std::move(out));
}

std::size_t SectionEnumerator::count_lines(const EnumState &s) const {
  const std::size_t pencil = 3 * d_.p + d_.q;
  if (s.pencil_lines == pencil) return s.sections.size() + pencil + 1;
  return s.lines.size(); // the pencil is not maximal: full recount
}

// ---------------------------------------------------------------------------
// Surveys

SurveyDatabase run_survey(const SurveyDescriptor &d) {
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
  SectionEnumerator en(d);
  SurveyDatabase db;
  db.descriptor = d;
  std::set<std::string> seen;
  auto over_budget = [&] {
    if (d.max_nodes && db.nodes >= d.max_nodes) return std::string("node budget exhausted");
    if (d.max_seconds > 0 && elapsed() > d.max_seconds) return std::string("time budget exhausted");
    return std::string();
  };
  auto record = [&](const EnumState &s, const RealizationResult &real) {
    if (s.val < d.vmin || s.mult < d.pmin) return;
    SurveyRecord r;
    r.id = db.records.size();
    r.state = s;
    r.lines = en.count_lines(s);
    r.recount = lines_of_polarized(s.lattice->polarized()).size();
    Configuration cfg(s.lattice->polarized(), s.lines);
    r.pencil_structure = format_structure(pencil_structure(cfg), true);
    r.linking_structure = format_structure(linking_structure(cfg), false);
    r.det = s.lattice->polarized().base.det();
    r.realization = real.pivot;
    db.records.push_back(std::move(r));
  };

  EnumState seed = en.seed();
  seen.insert(en.canonical_key(seed));
  std::vector<EnumState> frontier;
  {
    RealizationResult real = en.step4_realizable(seed);
    if (real.realizable) {
      record(seed, real);
      frontier.push_back(seed);
    } else {
      ++db.unrealizable;
    }
  }
  std::vector<EnumState> extendable;
  const unsigned threads = std::max(1u, d.threads);
  while (!frontier.empty() && db.stop_reason.empty()) {
    std::vector<EnumState> next;
    for (const auto &st : frontier) {
      if (!(db.stop_reason = over_budget()).empty()) break;
      if (d.extend_rank && st.rank() < 20) extendable.push_back(st);
      const auto cands = en.step1_candidates(st);
      std::vector<std::variant<EnumState, std::string>> res(cands.size());
      std::atomic<std::size_t> idx{0};
      auto worker = [&] {
        for (std::size_t i; (i = idx++) < cands.size();) res[i] = en.step2_validate(st, cands[i]);
      };
      std::vector<std::thread> pool;
      for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
      worker();
      for (auto &t : pool) t.join();
      db.nodes += cands.size();
      std::vector<EnumState> valid;
      for (auto &r : res) {
        if (std::holds_alternative<std::string>(r)) ++db.invalid;
        else valid.push_back(std::get<EnumState>(std::move(r)));
      }
      for (auto &child : en.step3_canonicalize(std::move(valid))) {
        if (!seen.insert(en.canonical_key(child)).second) {
          ++db.duplicates;
          continue;
        }
        RealizationResult real = en.step4_realizable(child);
        if (!real.realizable) {
          ++db.unrealizable;
          continue;
        }
        record(child, real);
        next.push_back(std::move(child));
      }
    }
    frontier = std::move(next);
  }
  // sections disjoint from s0, for lattices of rank below 20
  while (!extendable.empty() && db.stop_reason.empty()) {
    std::vector<EnumState> next;
    for (const auto &st : extendable) {
      if (!(db.stop_reason = over_budget()).empty()) break;
      for (auto &child : en.extend_rank(st)) {
        ++db.nodes;
        if (!seen.insert(en.canonical_key(child)).second) {
          ++db.duplicates;
          continue;
        }
        RealizationResult real = en.step4_realizable(child);
        if (!real.realizable) {
          ++db.unrealizable;
          continue;
        }
        record(child, real);
        if (child.rank() < 20) next.push_back(std::move(child));
      }
    }
    extendable = std::move(next);
  }
  db.complete = db.stop_reason.empty();
  db.seconds = elapsed();
  return db;
}

namespace {

std::string vector_text(const RatVector &v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + to_string(v[i]);
  return s + ")";
}

} // namespace

void write_survey_database(std::ostream &out, const SurveyDatabase &db) {
  out << "# survey p=" << db.descriptor.p << " q=" << db.descriptor.q << " s0=" << db.descriptor.s0.to_string() << "\n";
  out << "records " << db.records.size() << "\nnodes " << db.nodes << "\ninvalid " << db.invalid << "\nduplicates "
      << db.duplicates << "\nunrealizable " << db.unrealizable << "\ncomplete " << (db.complete ? "yes" : "no") << "\n";
  if (!db.stop_reason.empty()) out << "stop " << db.stop_reason << "\n";
  for (const auto &r : db.records) {
    out << "\nrecord " << r.id << "\n";
    for (const auto &t : r.state.trace) out << "step " << t << "\n";
    out << "rank " << r.state.rank() << "\ndet " << r.det << "\nlines " << r.lines << "\nrecount " << r.recount
        << "\nmult " << r.state.mult << "\nval " << r.state.val << "\npencil " << r.pencil_structure << "\nlinking "
        << r.linking_structure << "\n";
    out << "realization " << (r.realization.empty() ? "primitive" : "");
    for (const auto &v : r.realization) out << vector_text(v) << " ";
    out << "\n";
    write_configuration(out, Configuration(r.state.lattice->polarized(), r.state.lines));
    out << "end\n";
  }
}

void write_triplet_survey(std::ostream &out, const TripletSurvey &s) {
  TripletSpace t;
  out << "# survey p=6 q=0 pivot=beta triplets\n";
  out << "records " << s.records.size() << "\nnodes " << s.nodes << "\nnegative_plane " << s.negative_plane
      << "\nduplicates " << s.duplicate << "\ninvalid " << s.invalid << "\nunrealizable " << s.unrealizable
      << "\ncomplete " << (s.complete ? "yes" : "no") << "\n";
  if (!s.stop_reason.empty()) out << "stop " << s.stop_reason << "\n";
  for (std::size_t i = 0; i < s.records.size(); ++i) {
    const TripletRecord &r = s.records[i];
    out << "\nrecord " << i << "\nparent " << r.parent << "\n";
    if (r.added >= 0) out << "added " << t.representative(r.added).to_string() << "\n";
    out << "triplets";
    for (int x = 0; x < kTripletPoints; ++x)
      if (r.points[x]) out << " " << t.representative(x).to_string();
    out << "\nrank " << r.rank << "\ndet " << r.det << "\nlines " << r.lines << "\nsections " << r.sections
        << "\nmaximal " << (r.maximal ? "yes" : "no") << "\nextremal " << (r.extremal ? "yes" : "no")
        << "\nrealizable " << (r.strong ? "strong" : r.weak ? "weak" : "no") << "\npencil " << r.pencil_structure
        << "\nlinking " << r.linking_structure << "\nend\n";
  }
}

} // namespace k3
