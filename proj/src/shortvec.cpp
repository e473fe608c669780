#include "k3/shortvec.hpp"

#include <algorithm>

namespace k3 {

namespace {

// Q = L D L^T for the positive definite Q = -G; throws unless all pivots are positive.
struct Decomposition {
  std::vector<Rational> d;
  RatMatrix l; // unit lower triangular
};

Decomposition decompose(const IntMatrix &gram) {
  const std::size_t n = gram.rows();
  RatMatrix q(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) q(i, j) = -gram(i, j);
  Decomposition dec{std::vector<Rational>(n), RatMatrix::identity(n)};
  for (std::size_t j = 0; j < n; ++j) {
    Rational dj = q(j, j);
    for (std::size_t k = 0; k < j; ++k) dj -= dec.l(j, k) * dec.l(j, k) * dec.d[k];
    if (dj <= 0) throw shortvec_error("Gram matrix is not negative definite");
    dec.d[j] = dj;
    for (std::size_t i = j + 1; i < n; ++i) {
      Rational s = q(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= dec.l(i, k) * dec.l(j, k) * dec.d[k];
      dec.l(i, j) = s / dj;
    }
  }
  return dec;
}

Integer isqrt_floor(const Rational &r) {
  Integer f = floor_of(r);
  if (f <= 0) return 0;
  Integer s;
  mpz_sqrt(s.get_mpz_t(), f.get_mpz_t());
  return s;
}

class Enumerator {
public:
  Enumerator(const IntMatrix &gram, const RatVector &shift, const Rational &bound, bool halve,
             const std::function<void(const IntVector &, const Rational &)> &visit)
      : dec_(decompose(gram)), shift_(shift), bound_(bound), halve_(halve), visit_(visit), n_(gram.rows()),
        v_(n_), x_(n_) {}

  void run() {
    if (n_ == 0) {
      if (bound_ >= 0 && !halve_) visit_(v_, Rational(0));
      return;
    }
    if (bound_ < 0) return;
    level(n_ - 1, bound_, true);
  }

private:
  void level(std::size_t i, const Rational &remaining, bool higher_zero) {
    Rational center = 0;
    for (std::size_t j = i + 1; j < n_; ++j) center -= dec_.l(j, i) * x_[j];
    const Rational z = center - shift_[i];
    const Rational r = remaining / dec_.d[i];
    const Integer s = isqrt_floor(r);
    Integer hi = floor_of(z) + s + 1, lo = ceil_of(z) - s - 1;
    while (hi >= lo && Rational(hi - z) * Rational(hi - z) > r) --hi;
    while (lo <= hi && Rational(lo - z) * Rational(lo - z) > r) ++lo;
    if (halve_ && higher_zero && lo < 0) lo = 0;
    for (Integer t = lo; t <= hi; ++t) {
      Rational dev = t - z;
      Rational left = remaining - dec_.d[i] * dev * dev;
      v_[i] = t;
      x_[i] = t + shift_[i];
      const bool zero_here = higher_zero && t == 0;
      if (i == 0) {
        if (halve_ && zero_here) continue;
        visit_(v_, -(bound_ - left));
      } else {
        level(i - 1, left, zero_here);
      }
    }
    v_[i] = 0;
    x_[i] = 0;
  }

  Decomposition dec_;
  RatVector shift_;
  Rational bound_;
  bool halve_;
  const std::function<void(const IntVector &, const Rational &)> &visit_;
  std::size_t n_;
  IntVector v_;
  RatVector x_;
};

} // namespace

bool is_negative_definite(const IntMatrix &gram) {
  try {
    decompose(gram);
    return true;
  } catch (const shortvec_error &) {
    return false;
  }
}

void enumerate_short(const IntMatrix &gram, const RatVector &shift, const Rational &bound,
                     const std::function<void(const IntVector &, const Rational &)> &visit) {
  if (shift.size() != gram.rows()) throw shortvec_error("shift has wrong length");
  Enumerator(gram, shift, bound, false, visit).run();
}

std::vector<IntVector> vectors_of_norm(const NormQuery &q) {
  if (!q.gram.is_symmetric()) throw shortvec_error("Gram matrix is not symmetric");
  const std::size_t n = q.gram.rows();
  std::vector<IntVector> out;
  RatVector shift = q.coset_shift ? *q.coset_shift : RatVector(n);
  if (shift.size() != n) throw shortvec_error("shift has wrong length");
  if (q.congruence) {
    const Integer &m = q.congruence->modulus;
    if (m <= 0 || q.congruence->residue.size() != n) throw shortvec_error("bad congruence");
    IntMatrix g = q.gram;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) g(i, j) *= m * m;
    RatVector c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = (q.congruence->residue[i] + shift[i]) / Rational(m);
    Rational target = q.target_norm;
    Enumerator(g, c, -target, false, [&](const IntVector &u, const Rational &norm) {
      if (norm != target) return;
      IntVector v(n);
      for (std::size_t i = 0; i < n; ++i) v[i] = q.congruence->residue[i] + m * u[i];
      out.push_back(v);
    }).run();
  } else {
    const bool halve = !q.coset_shift;
    Enumerator(q.gram, shift, -q.target_norm, halve, [&](const IntVector &v, const Rational &norm) {
      if (norm == q.target_norm) out.push_back(v);
    }).run();
  }
  std::sort(out.begin(), out.end());
  return out;
}

PolarizedFrame::PolarizedFrame(const PolarizedLattice &s) : s_(s) {
  const std::size_t n = s.rank();
  IntVector f = s.base.gram * s.h;
  hh_ = bilinear(s.base.gram, s.h, s.h);
  if (hh_ <= 0) throw shortvec_error("polarization must have positive square");
  IntMatrix fm(1, n);
  fm.set_row(0, f);
  SmithData sd = smith_normal_form(fm);
  div_ = abs(sd.D(0, 0));
  if (div_ == 0) throw shortvec_error("polarization is in the kernel");
  const Integer sign = sd.U(0, 0) * sd.D(0, 0) > 0 ? 1 : -1;
  unit_.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) unit_[i] = sign * sd.V(i, 0);
  perp_ = IntMatrix(n - 1, n);
  for (std::size_t j = 1; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) perp_(j - 1, i) = sd.V(i, j);
  perp_gram_ = perp_ * s.base.gram * perp_.transpose();
  if (!is_negative_definite(perp_gram_)) throw shortvec_error("lattice is not hyperbolic");
  perp_gram_inv_ = n > 1 ? inverse(to_rational(perp_gram_)) : RatMatrix(0, 0);
}

std::vector<IntVector> PolarizedFrame::search(const RatVector &offset, long degree, long norm, bool halve) const {
  const std::size_t n = s_.rank();
  std::vector<IntVector> out;
  if (offset.size() != n) throw shortvec_error("offset has wrong length");
  const Rational rest = Rational(degree) - bilinear(to_rational(s_.base.gram), offset, to_rational(s_.h));
  if (rest.get_den() != 1 || rest.get_num() % div_ != 0) return out;
  Rational target = Rational(norm) - make_rational(Integer(degree) * degree, hh_);
  if (target > 0) return out;
  NormQuery q{perp_gram_, target, std::nullopt, std::nullopt};
  IntVector base(n);
  const Integer k = rest.get_num() / div_;
  RatVector c(n);
  bool centred = true;
  for (std::size_t i = 0; i < n; ++i) {
    base[i] = k * unit_[i];
    c[i] = offset[i] + Rational(base[i]) - make_rational(Integer(degree) * s_.h[i], hh_);
    if (c[i] != 0) centred = false;
  }
  if (!centred || !halve) {
    RatVector cg = to_rational(s_.base.gram) * c;
    RatVector proj(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i)
      for (std::size_t j = 0; j < n; ++j) proj[i] += cg[j] * perp_(i, j);
    RatVector y(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i)
      for (std::size_t j = 0; j + 1 < n; ++j) y[i] += proj[j] * perp_gram_inv_(j, i);
    q.coset_shift = y;
  }
  for (const auto &w : vectors_of_norm(q)) {
    IntVector a = base;
    for (std::size_t i = 0; i + 1 < n; ++i)
      if (w[i] != 0)
        for (std::size_t j = 0; j < n; ++j) a[j] += w[i] * perp_(i, j);
    out.push_back(a);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<IntVector> PolarizedFrame::vectors(long degree, long norm) const {
  return search(RatVector(s_.rank()), degree, norm, degree == 0);
}

std::vector<IntVector> PolarizedFrame::coset_vectors(const RatVector &offset, long degree, long norm) const {
  return search(offset, degree, norm, false);
}

std::vector<IntVector> lines_of_polarized(const PolarizedLattice &s) { return PolarizedFrame(s).vectors(1, -2); }

std::vector<IntVector> pencil_members(const PolarizedLattice &s, const IntVector &line) {
  std::vector<IntVector> out;
  for (auto &a : lines_of_polarized(s))
    if (s.base.dot(a, line) == 1) out.push_back(a);
  return out;
}

} // namespace k3
