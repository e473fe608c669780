#pragma once

// Explicit quartic surfaces in P^3 over small number fields, their lines, and
// the configurations those lines span.

#include "k3/config.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace k3 {

class quartic_error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

using Exponent = std::array<int, 4>;
using NFPoint = std::array<NFElement, 4>;
using NFMatrix4 = std::array<NFPoint, 4>;

NFPoint nf_point(const NumberField &f, const std::array<Rational, 4> &z);
NFMatrix4 nf_identity(const NumberField &f);
NFMatrix4 nf_multiply(const NFMatrix4 &a, const NFMatrix4 &b);
NFPoint nf_apply(const NFMatrix4 &g, const NFPoint &z);
NFElement nf_det(const NFMatrix4 &m);
// Scaled so that the first nonzero entry (row-major) is 1.
NFMatrix4 projective_normal_form(const NFMatrix4 &m);

// Square root inside the field when one exists (Rationals and Q(sqrt 2) only).
std::optional<NFElement> nf_sqrt(const NFElement &a);

// Homogeneous form of degree 4 in z_0..z_3.
class QuarticSurface {
public:
  QuarticSurface(NumberField f, std::map<Exponent, NFElement> terms);

  const NumberField &field() const { return f_; }
  const std::map<Exponent, NFElement> &terms() const { return terms_; }
  NFElement coefficient(const Exponent &e) const;
  NFElement evaluate(const NFPoint &z) const;
  // F(s a + t b) as the coefficients of s^4, s^3 t, ..., t^4
  std::vector<NFElement> restrict_to(const NFPoint &a, const NFPoint &b) const;
  // z -> F(g z)
  QuarticSurface pull_back(const NFMatrix4 &g) const;
  QuarticSurface conjugate() const;
  // c with other = c * this, if any
  std::optional<NFElement> ratio_to(const QuarticSurface &other) const;
  std::string to_string() const;

  bool operator==(const QuarticSurface &o) const { return f_ == o.f_ && terms_ == o.terms_; }

private:
  NumberField f_;
  std::map<Exponent, NFElement> terms_; // nonzero coefficients only
};

// Line in P^3 as the row span of a 2x4 matrix, stored in reduced row echelon form.
class ProjLine {
public:
  static ProjLine through(const NFPoint &a, const NFPoint &b);
  // common zeros of two independent linear forms
  static ProjLine cut_out_by(const NFPoint &f, const NFPoint &g);

  const NumberField &field() const { return rows_[0][0].field(); }
  const std::array<NFPoint, 2> &rows() const { return rows_; }
  bool contains(const NFPoint &z) const;
  std::string to_string() const;

  bool operator==(const ProjLine &o) const { return rows_ == o.rows_; }
  bool operator!=(const ProjLine &o) const { return !(*this == o); }
  bool operator<(const ProjLine &o) const { return rows_ < o.rows_; }

private:
  explicit ProjLine(std::array<NFPoint, 2> rows) : rows_(std::move(rows)) {}
  std::array<NFPoint, 2> rows_;
};

// z -> matrix * z, or z -> matrix * conj(z)
struct SemilinearMap {
  NFMatrix4 matrix;
  NFAuto automorphism = NFAuto::Identity;

  static SemilinearMap linear(NFMatrix4 m) { return {std::move(m), NFAuto::Identity}; }
  static SemilinearMap antilinear(NFMatrix4 m) { return {std::move(m), NFAuto::Conjugate}; }

  NFPoint apply(const NFPoint &z) const;
  ProjLine apply(const ProjLine &l) const;
  // composition this o other
  SemilinearMap then_after(const SemilinearMap &other) const;
  // the square is a scalar matrix
  bool is_involution() const;
  // sigma maps the zero set of x onto itself
  bool preserves(const QuarticSurface &x) const;
};

bool line_on_surface(const ProjLine &l, const QuarticSurface &x);
// Throws quartic_error for identical lines.
bool lines_meet(const ProjLine &a, const ProjLine &b);

// z_0(z_0^3 - z_1^3) = z_2(z_2^3 - z_3^3) over Q(zeta12)
QuarticSurface schur_quartic();
// z_0^4 + z_1^4 + z_2^4 + z_3^4 over Q(zeta8)
QuarticSurface fermat_quartic();
// The real quartic with 56 real lines over Q(sqrt 2)
QuarticSurface y56_quartic();
// z_1 z_3^3 phi_1(z_0/z_1, z_2/z_3) - z_1^3 z_3 phi_2(z_0/z_1, z_2/z_3)
QuarticSurface y56_quartic_from_phi();

// The 2x2 matrices preserving u(u^3 - v^3) literally.
std::vector<std::array<std::array<NFElement, 2>, 2>> schur_binary_group();
// Blockwise action of the binary generators on (z_0,z_1) and (z_2,z_3), and
// the swap (z_0,z_1) <-> (z_2,z_3).
std::vector<SemilinearMap> schur_automorphism_generators(bool with_swap = true);
// [z0:z1:z2:z3] -> conj of [z0:z1:z2:z3], [z0:z1:iz2:iz3], [z2:z3:z0:z1], [z2:z3:-z0:-z1]
std::vector<SemilinearMap> schur_real_structures();
SemilinearMap standard_conjugation(const NumberField &f);

struct SchurLines {
  std::vector<ProjLine> lines;       // the sixteen first, then the orbit of l0
  std::size_t sixteen = 16;
  std::size_t l0_orbit = 0;
};
SchurLines schur_construction();
std::vector<ProjLine> schur_lines();

std::vector<ProjLine> fermat_lines();

struct Y56Lines {
  struct PlaneResidual {
    std::string plane;    // equation of the plane
    int m = 0;            // 0 for m_1, 1 for m_2
    int l = 0;            // index into l_lines
    std::array<int, 2> r; // indices into `lines`
  };
  struct QuadricResidual {
    std::string chi;
    std::array<int, 4> quadruple; // indices into l_lines
    std::array<int, 2> n;         // indices into `lines`
  };
  std::vector<ProjLine> lines;        // m_1, m_2, the ten l, plane residuals, quadric residuals
  std::vector<std::string> l_names;   // P1..P4, A1, A2, C1, C2, B1, B2
  std::vector<int> l_lines;           // index of each l into `lines`
  std::vector<PlaneResidual> planes;
  std::vector<QuadricResidual> quadrics;
};
Y56Lines y56_construction();
std::vector<ProjLine> y56_lines();
// Incidence statements for m_i, l, r and n; human-readable violations, empty if all hold.
std::vector<std::string> y56_incidence_audit(const Y56Lines &y);
// z_i -> rho_i z_i (rho_0 rho_3 = rho_1 rho_2), z_1 <-> z_2, (z_0,z_3) -> (z_3,-z_0),
// (z_0,z_3) -> ((z_0+z_3)/sqrt2, (z_0-z_3)/sqrt2)
std::vector<SemilinearMap> y56_automorphism_generators();

struct FanoConfiguration {
  Configuration config;
  std::vector<int> index; // line i -> position in config.lines()
};
// Lattice generated by h and the lines with h^2 = 4, h.l = 1, l^2 = -2 and
// l.l' = 1 for meeting lines. With check_pairwise, every triangle of meeting
// lines must be coplanar. Throws quartic_error if the result is not a
// valid configuration or has line classes not coming from the given lines.
FanoConfiguration fano_configuration(const std::vector<ProjLine> &lines, bool check_pairwise = true);

// Lines fixed by sigma. Throws quartic_error if sigma is not an involution or
// does not permute the lines.
std::size_t real_line_count(const std::vector<ProjLine> &lines, const SemilinearMap &sigma);

// Projective group generated by linear maps, closed by multiplication.
class ProjectiveGroup {
public:
  // Throws quartic_error past max_order elements.
  static ProjectiveGroup generate(const std::vector<SemilinearMap> &gens, std::size_t max_order = 100000);
  std::size_t order() const { return elems_.size(); }
  const std::vector<NFMatrix4> &elements() const { return elems_; }
  std::vector<ProjLine> orbit(const ProjLine &l) const;

private:
  std::vector<NFMatrix4> elems_;
};

struct AutomorphismAudit {
  std::size_t order = 0;
  std::size_t kernel = 0; // elements fixing every line
  bool faithful = false;
  std::size_t line_orbits = 0;
};
// Throws quartic_error if a generator is not linear or does not preserve x,
// or if a group element does not permute the lines.
AutomorphismAudit automorphism_audit(const QuarticSurface &x, const std::vector<SemilinearMap> &gens,
                                     const std::vector<ProjLine> &lines);

} // namespace k3
