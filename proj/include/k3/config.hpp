#pragma once

#include "k3/shortvec.hpp"

#include <array>
#include <bitset>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace k3 {

class config_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct ValidityReport {
  bool even = false;
  bool nondegenerate = false;
  bool hyperbolic = false;         // sigma_+ = 1 and h^2 > 0
  bool spanned_by_lines = false;   // h and the lines generate S over Q
  bool no_roots_in_perp = false;   // no e with e^2 = -2, e.h = 0
  bool no_elliptic_pencil = false; // no e with e^2 = 0, e.h = 2
  std::size_t line_count = 0;
  std::vector<std::string> failures;
  bool ok() const { return failures.empty(); }
};

// Validity of (S, h) as a configuration. The last two checks need the first three.
ValidityReport validate_configuration(const PolarizedLattice &s);

constexpr std::size_t kMaxLines = 128;
using LineSet = std::bitset<kMaxLines>;

// Lattice with its lines, sorted lexicographically by coordinates.
class Configuration {
public:
  explicit Configuration(PolarizedLattice s);
  Configuration(PolarizedLattice s, std::vector<IntVector> lines);

  const PolarizedLattice &lattice() const { return s_; }
  std::size_t size() const { return lines_.size(); }
  const std::vector<IntVector> &lines() const { return lines_; }
  const IntVector &line(std::size_t i) const { return lines_[i]; }
  int product(std::size_t i, std::size_t j) const { return products_[i][j]; }
  bool meets(std::size_t i, std::size_t j) const { return adj_[i][j]; }
  const LineSet &neighbours(std::size_t i) const { return adj_[i]; }
  std::size_t valency(std::size_t i) const { return adj_[i].count(); }
  // index of a line given by coordinates, or -1
  int find(const IntVector &a) const;

private:
  void build();
  PolarizedLattice s_;
  std::vector<IntVector> lines_;
  std::vector<std::vector<int>> products_;
  std::vector<LineSet> adj_;
};

using Plane = std::array<int, 4>;
// All 4-cliques; throws config_error when one does not sum to h.
std::vector<Plane> planes_of(const Configuration &c);

struct PencilData {
  int axis = -1;
  std::vector<std::vector<int>> fibers; // sorted, 3-fibers first
  int p = 0, q = 0;
  int valency() const { return 3 * p + q; }
};
PencilData pencil_of(const Configuration &c, int axis);

using TypeCount = std::map<std::pair<int, int>, int>;
TypeCount pencil_structure(const Configuration &c);
// (mu1, mu3) over unordered pairs of skew lines.
TypeCount linking_structure(const Configuration &c);
// `(6,0)^16 (4,6)^48`; descending order for pencil structures, ascending for linking.
std::string format_structure(const TypeCount &t, bool descending);

struct SegreReport {
  long lines = 0, valency_sum_minus_8 = 0;
  bool ok() const { return lines == valency_sum_minus_8; }
};
SegreReport segre_count_check(const Configuration &c, const Plane &plane);

// Products in {0,1}, plane sums, the line-off-plane rule, the Segre identity,
// the skew-line bounds and double sextuple completion, and the valency table.
// Returns human-readable violations; empty for a geometric configuration.
std::vector<std::string> skew_lemma_audit(const Configuration &c);

struct DynkinComponent {
  enum class Kind { Elliptic, Parabolic, Other } kind = Kind::Other;
  char family = '?'; // 'A', 'D', 'E'
  int index = 0;
  std::vector<int> vertices;
  int milnor = 0;
  int kappa = 0;
  std::vector<long> kernel; // coefficients of the kernel generator (parabolic)
  std::string name() const; // e.g. "A3", "~D4"
};

struct GraphAnalysis {
  std::vector<DynkinComponent> components;
  bool elliptic = true, parabolic = true; // parabolic includes elliptic
  int milnor = 0;
};
// Connected components of the induced subgraph on `subset`.
GraphAnalysis parabolic_components(const Configuration &c, const std::vector<int> &subset);

struct PseudoPencil {
  IntVector v;
  long degree = 0;
  std::vector<int> members;
  GraphAnalysis fibers;
  std::vector<int> sections;
  std::vector<std::string> violations;
};
// v isotropic and primitive with v.h > 0.
PseudoPencil pseudo_pencil(const Configuration &c, const IntVector &v);
// Sum of kappa(e) e over an affine component, in lattice coordinates.
IntVector kernel_class(const Configuration &c, const DynkinComponent &affine);

// Lattice file: "R C", R rows, optional "h v_1 ... v_n".
PolarizedLattice read_polarized_lattice(std::istream &in);
void write_polarized_lattice(std::ostream &out, const PolarizedLattice &s);
// Lattice file followed by "lines N" and N coordinate rows.
Configuration read_configuration(std::istream &in);
void write_configuration(std::ostream &out, const Configuration &c);

} // namespace k3
