#pragma once

// Section-adding enumeration of configurations around a pencil P_{p,q}.

#include "k3/pencilenum.hpp"

#include <climits>
#include <iosfwd>
#include <memory>
#include <optional>
#include <variant>

namespace k3 {

// Element of G_{p,q}: 3-fiber i goes to fiber3[i] with its labels permuted by
// relabel[i]; 1-fiber k goes to fiber1[k].
struct CoordinateSymmetry {
  std::vector<int> fiber3;
  std::vector<std::array<int, 3>> relabel;
  std::vector<int> fiber1;

  CoordinateVector apply(const CoordinateVector &c) const;
  // action on P (x) Q in the basis of P_{p,q}
  RatVector apply(const RatVector &v) const;
};

class SymmetryGroup {
public:
  // Elements of G_{p,q} fixing `fixed` (when given) and preserving the subgroup
  // of P (x) Q / P spanned by `pivot`. Throws pencil_error when the group
  // would exceed `max_order` elements before filtering.
  static SymmetryGroup stabilizer(int p, int q, const std::vector<RatVector> &pivot,
                                  const std::optional<CoordinateVector> &fixed, std::size_t max_order = 4000000);
  // 6^p p! q!
  static Integer full_order(int p, int q);

  std::size_t order() const { return elems_.size(); }
  const std::vector<CoordinateSymmetry> &elements() const { return elems_; }
  // subgroup mapping the set onto itself
  SymmetryGroup set_stabilizer(const std::vector<CoordinateVector> &set) const;
  // lexicographically least sorted image of a multiset
  std::vector<CoordinateVector> canonical(std::vector<CoordinateVector> set) const;
  CoordinateVector orbit_min(const CoordinateVector &c) const;

private:
  std::vector<CoordinateSymmetry> elems_;
};

// Orthogonal projections of sections to the complement of P (x) Q.
struct SectionGramVerdict {
  RatMatrix projection;  // computed from the Gram matrix
  RatMatrix closed_form; // r_ij from the coordinates and products
  bool closed_form_agrees = false;
  bool semidefinite = false; // projection <= 0
  std::size_t rank = 0;
  bool rank_room = false; // rank + 2p + q <= 18
  bool ok() const { return semidefinite && rank_room; }
};
SectionGramVerdict section_gram_test(const PencilLattice &pl, const SectionData &sections);

struct SurveyDescriptor {
  int p = 6, q = 0;
  std::vector<std::string> pivot; // named classes, see PencilLattice::named_class
  CoordinateVector s0;
  int pmin = 0, pmax = INT_MAX; // number of 3-fibers of the pencil of s0
  int vmin = 0, vmax = INT_MAX; // valency of s0
  std::vector<std::string> predicates;
  bool rigid = false;       // configurations are known to be combinatorially rigid
  bool full_orbits = false; // compare all sections instead of those meeting s0
  bool extend_rank = false;
  std::size_t max_nodes = 0; // 0: unlimited
  double max_seconds = 0;
  unsigned threads = 1;
  std::size_t max_group = 4000000;
};
// key = value lines, lists separated by spaces; '#' starts a comment. Keys: p, q, pivot, s0, pmin, pmax,
// vmin, vmax, predicates, rigid, approach (partial|full), extend_rank,
// max_nodes, max_seconds, threads, max_group.
SurveyDescriptor read_survey_descriptor(std::istream &in);
void write_survey_descriptor(std::ostream &out, const SurveyDescriptor &d);

// Registered type-specific predicates, checked on every validated state.
std::vector<std::string> known_predicates();

struct EnumState {
  std::vector<CoordinateVector> adjoined; // s_0, s_1, ..., s_k
  std::vector<std::vector<int>> products; // among the adjoined sections
  std::shared_ptr<const SectionLattice> lattice;
  std::vector<IntVector> lines;
  std::vector<CoordinateVector> sections; // all sections, sorted multiset
  std::vector<CoordinateVector> obverse;  // sections meeting s_0
  int mult = 0;                          // 3-fibers of the pencil of s_0
  int val = 0;                           // valency of s_0
  std::size_t pencil_lines = 0;          // lines meeting the axis
  bool rank_extended = false;
  std::vector<std::string> trace;
  std::size_t rank() const { return lattice->rank(); }
};

class SectionEnumerator {
public:
  explicit SectionEnumerator(SurveyDescriptor d);

  const SurveyDescriptor &descriptor() const { return d_; }
  const PencilLattice &pencil() const { return pl_; }
  const SymmetryGroup &group() const { return group_; }

  // the state with s_0 only; throws pencil_error if it is not valid
  EnumState seed() const;
  std::vector<CoordinateVector> step1_candidates(const EnumState &s) const;
  // rejection reason on failure
  std::variant<EnumState, std::string> step2_validate(const EnumState &s, const CoordinateVector &candidate) const;
  std::vector<EnumState> step3_canonicalize(std::vector<EnumState> states) const;
  std::string canonical_key(const EnumState &s) const;
  RealizationResult step4_realizable(const EnumState &s) const;
  std::vector<EnumState> extend_rank(const EnumState &s) const;
  std::size_t count_lines(const EnumState &s) const;

private:
  std::variant<EnumState, std::string> build(std::vector<CoordinateVector> adjoined,
                                             std::vector<std::vector<int>> products) const;
  bool candidate_conditions(const std::vector<CoordinateVector> &sections, const CoordinateVector &c) const;
  SurveyDescriptor d_;
  PencilLattice pl_;
  std::vector<RatVector> pivot_;
  SymmetryGroup group_;
  std::optional<CoordinateVector> lstar_;
};

struct SurveyRecord {
  std::size_t id = 0;
  EnumState state;
  std::size_t lines = 0;  // |Fn| of the lattice itself
  std::size_t recount = 0; // independent recount of the lines
  std::string pencil_structure, linking_structure;
  Integer det;
  std::vector<RatVector> realization; // pivot of a geometric extension
};

struct SurveyDatabase {
  SurveyDescriptor descriptor;
  std::vector<SurveyRecord> records;
  std::size_t nodes = 0, invalid = 0, duplicates = 0, unrealizable = 0;
  bool complete = false;
  std::string stop_reason;
  double seconds = 0;
};

SurveyDatabase run_survey(const SurveyDescriptor &d);
void write_survey_database(std::ostream &out, const SurveyDatabase &db);
// database of the triplet survey in the same format
void write_triplet_survey(std::ostream &out, const TripletSurvey &s);

} // namespace k3
