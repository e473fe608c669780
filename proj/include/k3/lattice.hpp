#pragma once

#include "k3/exactmath.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace k3 {

struct Lattice {
  IntMatrix gram;
  std::vector<std::string> labels;

  Lattice() = default;
  explicit Lattice(IntMatrix g, std::vector<std::string> names = {});

  std::size_t rank() const { return gram.rows(); }
  bool is_even() const;
  Integer det() const { return exact_determinant(gram); }
  Integer dot(const IntVector &a, const IntVector &b) const { return bilinear(gram, a, b); }
};

struct PolarizedLattice {
  Lattice base;
  IntVector h;

  PolarizedLattice() = default;
  PolarizedLattice(Lattice l, IntVector pol);
  std::size_t rank() const { return base.rank(); }
};

Lattice direct_sum(const Lattice &a, const Lattice &b);
Lattice hyperbolic_plane(long scale = 1); // U(scale)
Lattice e8_negative();                    // E8(-1)
Lattice rank_one(long n);                 // [n]

struct Signature {
  std::size_t pos = 0, neg = 0, zero = 0;
  bool operator==(const Signature &o) const { return pos == o.pos && neg == o.neg && zero == o.zero; }
};
// Exact congruence diagonalization over Q.
Signature signature(const IntMatrix &gram);

// Element of a finite abelian group given by cyclic generator orders.
using Elem = std::vector<long>;

// Finite quadratic form on Z/d_1 + ... + Z/d_l (the generators are independent
// but the orders need not form a divisibility chain). b is kept mod 1, q mod 2.
class DiscriminantForm {
public:
  DiscriminantForm() = default;
  DiscriminantForm(std::vector<long> orders, RatMatrix b, std::vector<Rational> q);

  const std::vector<long> &orders() const { return orders_; }
  std::size_t ngens() const { return orders_.size(); }
  long order() const;
  const RatMatrix &b_matrix() const { return b_; }
  const std::vector<Rational> &q_values() const { return q_; }

  Rational b(const Elem &x, const Elem &y) const; // in [0,1)
  Rational q(const Elem &x) const;                // in [0,2)
  long elem_order(const Elem &x) const;
  Elem add(const Elem &x, const Elem &y) const;
  Elem scale(const Elem &x, long k) const;
  Elem normalize(Elem x) const;
  bool is_zero(const Elem &x) const;
  std::vector<Elem> elements() const;

  DiscriminantForm negated() const;
  // Restriction to the p-primary part; generators with trivial p-part are dropped.
  DiscriminantForm primary_part(long p) const;
  // Generators of the p-primary part expressed in this form's coordinates.
  std::vector<Elem> primary_generators(long p) const;
  std::vector<long> primes() const;

  // `d_1,...,d_l ; q_1,...,q_l ; b_12,b_13,...` with rationals in lowest terms.
  std::string to_string() const;

private:
  std::vector<long> orders_;
  RatMatrix b_;
  std::vector<Rational> q_;
};

DiscriminantForm form_direct_sum(const DiscriminantForm &a, const DiscriminantForm &b);
DiscriminantForm form_cyclic(long m, long n);  // <m/n> on Z/n
DiscriminantForm form_u(int k);                // U_{2^k}
DiscriminantForm form_v(int k);                // V_{2^k}
DiscriminantForm trivial_form();

// Discriminant form together with dual vectors (lattice coordinates) of the generators.
struct DiscriminantData {
  DiscriminantForm form;
  RatMatrix generators; // row i: dual vector representing generator i
  IntMatrix reduction;  // row i gives the i-th coordinate of a dual vector mod d_i
  RatVector lift(const Elem &x) const;
  // class of a vector of the dual lattice
  Elem reduce(const RatVector &v) const;
};

class lattice_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

DiscriminantData discriminant_data(const Lattice &l);
DiscriminantForm discriminant_form(const Lattice &l);

struct PrimeData {
  long ell = 0;
  // Unit part of the determinant of the epsilon-matrix times the order of the
  // p-part, as a square class: Legendre symbol (+1/-1) for odd p, residue mod 8
  // for p = 2. Absent for an odd 2-part.
  std::optional<int> det_class;
  bool even = true; // meaningful for p = 2
};

struct FqIsoClass {
  long order = 1;
  std::map<long, PrimeData> primes;
  long ell() const;
  long ell_p(long p) const;
};

FqIsoClass primary_invariants(const DiscriminantForm &d);

// Witness: images of the generators of each primary part of d1 (in the order of
// d1.primes()), in d2's coordinates.
struct FormIsomorphism {
  std::vector<long> primes;
  std::vector<std::vector<Elem>> source_gens, images;
};
std::optional<FormIsomorphism> forms_isomorphic(const DiscriminantForm &d1, const DiscriminantForm &d2);
std::optional<FormIsomorphism> forms_anti_isomorphic(const DiscriminantForm &d1, const DiscriminantForm &d2);

// Primitive embedding into the even unimodular lattice of signature (3,19).
bool nikulin_embeds(std::size_t sig_pos, std::size_t sig_neg, std::size_t rank, const DiscriminantForm &d);
bool nikulin_embeds(const Lattice &s);

// One generator per cyclic subgroup of order p on which q vanishes.
std::vector<Elem> isotropic_subgroup_candidates(const DiscriminantForm &d, long p);

// Rational vectors (in ambient coordinates with Gram `ambient`) spanning a lattice.
struct SpannedLattice {
  Lattice lattice;
  RatMatrix basis; // rows in ambient coordinates
};
SpannedLattice span_of(const RatMatrix &ambient, const RatMatrix &vectors);

// Lattice (Z^n)/ker for n generators with the given integral Gram matrix.
struct GeneratedLattice {
  Lattice lattice;
  IntMatrix coords;              // row g: generator g in the lattice basis
  std::vector<std::size_t> free; // generators chosen as a rational basis
};
GeneratedLattice lattice_from_generators(const IntMatrix &gen_gram);

struct Extension {
  Lattice lattice;
  RatMatrix basis; // rows: new basis in the coordinates of the original lattice
};
// M = L + span of the lifts of the given discriminant elements.
Extension finite_index_extension(const Lattice &l, const DiscriminantData &dd, const std::vector<Elem> &subgroup_gens);
Extension finite_index_extension(const Lattice &l, const std::vector<Elem> &subgroup_gens);

struct Complement {
  Lattice lattice;
  IntMatrix basis; // rows in ambient coordinates
};
Complement orthogonal_complement(const Lattice &ambient, const IntMatrix &sub);

struct BinaryForm {
  Integer a, b, c;
  Integer det() const { return a * c - b * b; }
  bool operator==(const BinaryForm &o) const { return a == o.a && b == o.b && c == o.c; }
  std::string to_string() const;
};

// Reduced even positive definite forms with det = |d| and discriminant form
// anti-isomorphic to d.
std::vector<BinaryForm> transcendental_candidates(const DiscriminantForm &d);
std::vector<BinaryForm> transcendental_candidates(const PolarizedLattice &s);

// Subgroups of discr(base) reachable by prime-order isotropic steps, each visited
// once. The callback sees the extension lattice and its pivot generators.
// `allow_step` filters single elements, `admit` whole subgroups (sorted member
// lists) before the extension is built; rejected subgroups are not expanded.
enum class Visit { Accept, Prune, Continue };
struct ExtensionSearchResult {
  bool accepted = false;
  std::vector<Elem> pivot;
  std::size_t visited = 0;
};
ExtensionSearchResult search_extensions(const Lattice &base,
                                        const std::function<Visit(const Extension &, const std::vector<Elem> &)> &visit,
                                        const std::function<bool(const DiscriminantForm &, const Elem &)> &allow_step = {},
                                        const std::function<bool(const std::vector<Elem> &)> &admit = {});

// S + [2] or S + U(2), possibly extended with S kept primitive, embeds primitively.
bool totally_reflexive_test(const Lattice &s);

} // namespace k3
