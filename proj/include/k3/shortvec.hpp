#pragma once

#include "k3/lattice.hpp"

#include <optional>
#include <vector>

namespace k3 {

class shortvec_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct Congruence {
  Integer modulus;
  IntVector residue;
};

// Vectors v (integral) with (v + shift)^T G (v + shift) = target, G negative definite.
struct NormQuery {
  IntMatrix gram;
  Rational target_norm;
  std::optional<RatVector> coset_shift;
  std::optional<Congruence> congruence; // restricts v to residue + modulus * Z^n
};

// Without a shift or congruence one vector per +- pair is returned (last nonzero
// coordinate positive). Output is sorted lexicographically.
std::vector<IntVector> vectors_of_norm(const NormQuery &q);

// Every integral v with -(v + shift)^2 <= bound, reported with its norm. Used by
// callers that need several norms from one traversal.
void enumerate_short(const IntMatrix &gram, const RatVector &shift, const Rational &bound,
                     const std::function<void(const IntVector &, const Rational &)> &visit);

bool is_negative_definite(const IntMatrix &gram);

// Coordinates of h-perp inside a polarized lattice, reused across queries.
class PolarizedFrame {
public:
  explicit PolarizedFrame(const PolarizedLattice &s);

  const PolarizedLattice &lattice() const { return s_; }
  const IntMatrix &perp_basis() const { return perp_; } // rows in S coordinates
  const IntMatrix &perp_gram() const { return perp_gram_; }
  Integer h_norm() const { return hh_; }
  // gcd of the values a.h, a in S
  Integer h_divisor() const { return div_; }

  // All a in S with a.h = degree and a^2 = norm. For degree 0 one vector per
  // +- pair is returned.
  std::vector<IntVector> vectors(long degree, long norm) const;
  // All w in S with (c + w).h = degree and (c + w)^2 = norm, for a rational
  // offset c in S (x) Q. Both signs are returned.
  std::vector<IntVector> coset_vectors(const RatVector &c, long degree, long norm) const;

private:
  std::vector<IntVector> search(const RatVector &offset, long degree, long norm, bool halve) const;
  PolarizedLattice s_;
  IntMatrix perp_, perp_gram_;
  RatMatrix perp_gram_inv_;
  IntVector unit_; // a vector with unit_.h = h_divisor()
  Integer hh_, div_;
};

// Lines: a^2 = -2, a.h = 1.
std::vector<IntVector> lines_of_polarized(const PolarizedLattice &s);
// Lines a of the lattice with a.l = 1.
std::vector<IntVector> pencil_members(const PolarizedLattice &s, const IntVector &line);

} // namespace k3
