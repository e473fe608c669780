#pragma once

#include "k3/config.hpp"

#include <array>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace k3 {

class pencil_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Section coordinates: C_{p,q} = (Z/3)^p x (Z/2)^q.

struct CoordinateVector {
  std::vector<int> eps; // 0, 1, 2 (2 stands for -1)
  std::vector<int> rho; // 0, 1

  int p() const { return static_cast<int>(eps.size()); }
  int q() const { return static_cast<int>(rho.size()); }
  bool operator==(const CoordinateVector &o) const { return eps == o.eps && rho == o.rho; }
  bool operator!=(const CoordinateVector &o) const { return !(*this == o); }
  bool operator<(const CoordinateVector &o) const {
    return eps != o.eps ? eps < o.eps : rho < o.rho;
  }
  std::string to_string() const; // "[1,0,2;1,0]"
};

CoordinateVector parse_coordinates(const std::string &s);
CoordinateVector coord_add(const CoordinateVector &a, const CoordinateVector &b);
CoordinateVector coord_sub(const CoordinateVector &a, const CoordinateVector &b);
// [0,...,0;1,...,1]
CoordinateVector unit_coordinate(int p, int q);
// I - a - b, the third section of a plane or of a com = 4 pair
CoordinateVector completing_coordinate(const CoordinateVector &a, const CoordinateVector &b);

struct CoordinateStats {
  int com3 = 0, com1 = 0, com = 0;
  int dif3 = 0, dif1 = 0;
  std::array<int, 2> num1{}, num3{};
};
CoordinateStats coordinate_stats(const CoordinateVector &a, const CoordinateVector &b);
// common fibers of several sections: equal 3-coordinates, shared nonzero 1-coordinates
int common_fibers(const std::vector<CoordinateVector> &v);

// ---------------------------------------------------------------------------
// The lattice P_{p,q} spanned by h, the axis l and the pencil.
// Basis order: h, l, m_{1,+}, m_{1,-}, ..., m_{p,+}, m_{p,-}, n_1, ..., n_q.

class PencilLattice {
public:
  PencilLattice(int p, int q);

  int p() const { return p_; }
  int q() const { return q_; }
  std::size_t dim() const { return 2 + 2 * p_ + q_; }
  const Lattice &lattice() const { return lattice_; }
  PolarizedLattice polarized() const;
  static constexpr std::size_t h_index = 0, l_index = 1;
  std::size_t m_index(int i, int sign) const { return 2 + 2 * i + (sign > 0 ? 0 : 1); }
  std::size_t n_index(int k) const { return 2 + 2 * p_ + k; }

  // line m_{i,j} of the i-th 3-fiber, j in Z/3
  IntVector fiber_line(int i, int j) const;
  IntVector one_fiber_line(int k) const;
  std::vector<IntVector> pencil_lines() const;

  // Classes of P (x) Q used to describe discriminants and pivots.
  RatVector lambda() const;         // (l - h)/3
  RatVector mu(int i) const;        // (m_{i,+} - m_{i,-})/3
  RatVector varpi() const;          // (l - r lambda - sum n_k)/3, r = p + q - 1
  RatVector omega() const;          // (l + sum (m_{i,+} + m_{i,-}) - sum n_k)/3
  RatVector nu(int k) const;        // -(lambda + n_k)/2
  RatVector beta() const;           // sum mu_i
  RatVector lstar() const;          // omega + (p - 4) lambda
  RatVector octet(const std::vector<int> &support) const; // sum 3 nu_k
  Rational dot(const RatVector &a, const RatVector &b) const;

  // Named class: "beta", "omega", "lstar", "lambda", "varpi", "mu<i>",
  // "nu<k>" or "octet:k1,k2,..." (1-based indices).
  RatVector named_class(const std::string &name) const;

  // Products of a section with the basis vectors.
  IntVector section_products(const CoordinateVector &s) const;
  // Coordinates of a line s with s.l = 0 given its products with the basis.
  CoordinateVector coordinates_of(const IntVector &products) const;

  // Generators of G_{p,q} = (S3^p x| S_p) x S_q as integral matrices acting on
  // column vectors of basis coordinates.
  std::vector<IntMatrix> symmetry_generators() const;

private:
  int p_, q_;
  Lattice lattice_;
};

// P_{p,q} or its finite index extension by named pivot classes.
struct PencilExtension {
  PencilLattice pencil;
  Extension ext; // basis rows in P_{p,q} coordinates
  PolarizedLattice polarized;
  IntVector l; // the axis in extension coordinates
  std::vector<std::string> pivot;
};
// Throws pencil_error for p, q out of range, a non-integral or non-isotropic
// pivot, or a pivot producing a root in h-perp or an elliptic pencil.
PencilExtension build_pencil_lattice(int p, int q, const std::vector<std::string> &pivot = {});

// Coordinates of a P (x) Q vector in the extension basis.
RatVector in_extension(const PencilExtension &e, const RatVector &v);

// ---------------------------------------------------------------------------
// Admissible types.

// 3p + 2q <= 24 and 3p + q <= 20
bool within_euler_bound(int p, int q);

struct TypeVerdict {
  int p = 0, q = 0;
  bool within_bound = false;
  bool searched = false;
  bool realizable = false; // some geometric extension embeds primitively
  std::size_t subgroups = 0;
  std::vector<std::string> pivot; // pivot of the realization found, as P (x) Q vectors
};

// Exhaustive search over the isotropic extensions of P_{p,q} without roots in
// h-perp and without elliptic pencils.
TypeVerdict search_pencil_type(int p, int q);

// Rows for every p, q >= 0 with 3p + q <= 21 and 3p + 2q <= 26: the minimal
// types outside the bound and the type (5,4) are searched, the others are
// admissible unless they contain a rejected type.
std::vector<TypeVerdict> admissible_pencil_types(bool search_inside = false);

struct PivotClass {
  std::string structure;    // "0", "Z3", "Z2", "Z2+Z2", ...
  std::size_t subgroups = 0; // orbit size under G_{p,q}
  std::vector<RatVector> generators; // P (x) Q vectors
  Integer det;
  std::size_t lines = 0;
};
// Geometric pivots up to G_{p,q}: orbits of the isotropic subgroups whose
// extension is valid and embeds primitively.
std::vector<PivotClass> geometric_pivots(int p, int q);

// ---------------------------------------------------------------------------
// Lattices generated by a pencil, pivot classes and sections.

// Sections with declared coordinates and mutual products; the products with
// h, l and the pencil follow from the coordinates.
struct SectionData {
  std::vector<CoordinateVector> coords;
  std::vector<std::vector<int>> products; // symmetric, diagonal -2
};

class SectionLattice {
public:
  SectionLattice(const PencilLattice &pl, const std::vector<RatVector> &pivot, const SectionData &sections);

  const PencilLattice &pencil() const { return pencil_; }
  const PolarizedLattice &polarized() const { return s_; }
  std::size_t rank() const { return s_.rank(); }
  // basis vector j of P_{p,q}, pivot class k, section i in lattice coordinates
  const IntVector &pencil_basis(std::size_t j) const { return basis_[j]; }
  const IntVector &pivot(std::size_t k) const { return pivot_[k]; }
  const IntVector &section(std::size_t i) const { return sections_[i]; }
  const IntVector &axis() const { return basis_[PencilLattice::l_index]; }

  // Products of a lattice vector with the basis of P_{p,q}.
  IntVector pencil_products(const IntVector &v) const;

  struct Analysis {
    bool hyperbolic = false;
    bool root_in_perp = false;     // e^2 = -2, e.h = 0
    bool elliptic_pencil = false;  // e^2 = 0, e.h = 2
    std::vector<IntVector> lines;  // every line, sorted
    std::vector<IntVector> pencil; // lines meeting the axis
    std::vector<IntVector> sections;
    std::vector<CoordinateVector> section_coords;
    bool valid() const { return hyperbolic && !root_in_perp && !elliptic_pencil; }
  };
  // Lines are listed only for a valid lattice.
  Analysis analyze() const;

private:
  PencilLattice pencil_;
  PolarizedLattice s_;
  std::vector<IntVector> basis_, pivot_, sections_;
};

// Whether a valid configuration admits a geometric realization: some isotropic
// extension without roots in h-perp or elliptic pencils embeds primitively.
// With `keep_lines`, extensions adding lines are not used.
struct RealizationResult {
  bool realizable = false;
  std::size_t subgroups = 0;
  std::vector<RatVector> pivot; // lattice coordinates
};
RealizationResult step4_realizable(const PolarizedLattice &s, bool keep_lines);

// ---------------------------------------------------------------------------
// (6,0) pencils with pivot beta: triplets of sections.

// Sections satisfy eps_1 + ... + eps_6 = 0 mod 3; shifting all coordinates by
// one (sigma) permutes each triplet. The 81 triplets form an affine space A
// over F_3 with the form q(a - b) = (dif mod 3)/3.
constexpr int kTripletPoints = 81;
using PointSet = std::bitset<kTripletPoints>;

class TripletSpace {
public:
  TripletSpace();

  // representative with eps_6 = 0
  const CoordinateVector &representative(int point) const { return reps_[point]; }
  int point_of(const CoordinateVector &c) const;
  std::array<CoordinateVector, 3> triplet(int point) const;
  // the third point on the line through a != b
  int third_point(int a, int b) const { return neg_sum_[a][b]; }

  enum class Kind { Isotropic, Positive, Negative };
  // kind of the line through a != b
  Kind line_kind(int a, int b) const;
  // product of two sections given by coordinates: 1 iff com <= 1 and not in one triplet
  static int section_product(const CoordinateVector &a, const CoordinateVector &b);

  struct Census {
    int positive_lines = 0, negative_lines = 0, isotropic_lines = 0;
    int positive_planes = 0, negative_planes = 0, hyperbolic_planes = 0, definite_planes = 0;
  };
  // lines and planes through a point
  const Census &census() const { return census_; }

  // Closure under negative lines meeting the set twice.
  PointSet convex_hull(PointSet s) const;
  // some affine negative plane lies in the set
  bool contains_negative_plane(const PointSet &s) const;
  // isotropic lines l'' with two points in the set, parallel to an isotropic
  // line l' inside the set in a positive plane, but not contained in it
  std::vector<std::array<int, 3>> two_lines_defects(const PointSet &s) const;

  // Group ((Z3)^5 x| Z2) x| S6 modulo sigma, acting on A; order 116640.
  std::size_t group_order() const { return linear_.size() * kTripletPoints; }
  // element g = linear part * 81 + translation
  int apply(std::size_t g, int point) const;
  PointSet apply(std::size_t g, const PointSet &s) const;
  PointSet canonical(const PointSet &s) const;

  // Coordinate vectors of all sections in the triplets of a set.
  std::vector<CoordinateVector> sections_of(const PointSet &s) const;

private:
  std::vector<CoordinateVector> reps_;
  std::vector<std::array<int, 6>> full_;
  std::vector<std::vector<int>> neg_sum_, diff_;
  std::vector<std::array<int, kTripletPoints>> linear_;
  std::vector<PointSet> negative_planes_;
  std::vector<std::array<int, 3>> isotropic_lines_;
  std::vector<int> positive_dirs_;
  Census census_;
  int add(int a, int b) const;
  int kind_of_direction(int d) const;
};

// The lattice generated by P_{6,0}, beta and one section from each triplet.
SectionLattice triplet_lattice(const TripletSpace &t, const PointSet &s);

// Breadth-first survey of the (6,0) configurations with pivot beta, starting
// from the bare pencil and adding one triplet at a time.
struct SurveyBudget {
  std::size_t max_nodes = 0; // 0: unlimited
  double max_seconds = 0;    // 0: unlimited
  unsigned threads = 1;
};

struct TripletRecord {
  PointSet points; // canonical
  int parent = -1;
  int added = -1; // point added to the parent, before canonicalization
  std::size_t rank = 0;
  Integer det;
  std::size_t lines = 0, pencil = 0, sections = 0;
  bool maximal = false;  // the axis meets exactly the 18 pencil lines
  bool weak = false;     // geometric realization exists
  bool strong = false;   // and needs no extension adding lines
  bool extremal = true;  // no strictly larger record extends it
  std::string pencil_structure, linking_structure;
};

struct TripletSurvey {
  std::vector<TripletRecord> records;
  std::size_t nodes = 0; // candidates examined
  std::size_t negative_plane = 0, duplicate = 0, invalid = 0, unrealizable = 0;
  bool complete = false;
  std::string stop_reason;
  double seconds = 0;
};

TripletSurvey run_triplet_survey(const SurveyBudget &budget = {});

} // namespace k3
