#pragma once

// Wada's twisted Alexander invariant: images of Fox derivatives under
// Phi(g) = t^{alpha(g)} rho(g), determinants over C[t, t^-1], and limits of
// the resulting rational functions at points of C^*.

#include <optional>
#include <span>
#include <vector>

#include "twv/group_words.hpp"
#include "twv/laurent_linalg.hpp"
#include "twv/representations.hpp"

namespace twv {

// Linear extension of g |-> t^{alpha(g)} rho(g) to Z[F].
template <class R>
LaurentMatrix<R> phi(const SymPowerRep<R>& rho, const AlphaMap& alpha, const GroupRingElement& e);

// Block (i, j) = phi(d r_i / d x_j), each block dim x dim.
template <class R>
class FoxMatrix {
 public:
  FoxMatrix(int relators, int generators, int dim, std::vector<LaurentMatrix<R>> blocks);

  int relator_count() const { return relators_; }
  int generator_count() const { return generators_; }
  int dim() const { return dim_; }
  const LaurentMatrix<R>& block(int relator, int generator) const {
    return blocks_.at(static_cast<std::size_t>(relator * generators_ + generator));
  }

  // The full matrix with column block `deleted` removed.
  LaurentMatrix<R> without_column(int deleted) const;

 private:
  int relators_;
  int generators_;
  int dim_;
  std::vector<LaurentMatrix<R>> blocks_;
};

// Throws MathError unless the presentation has deficiency 1.
template <class R>
FoxMatrix<R> build_fox_matrix(const Presentation& p, const SymPowerRep<R>& rho, const AlphaMap& alpha);

template <class R>
struct WadaInvariant {
  LaurentPoly<R> num;  // det of the Fox matrix without column block `deleted_index`
  LaurentPoly<R> den;  // det phi(x_j - 1)
  int deleted_index = 0;
  int dim = 0;
  SignAssignment signs;
  LaurentMatrix<R> num_matrix;
  LaurentMatrix<R> den_matrix;

  RationalFunction<R> rational() const { return {num, den}; }
};

// Uses the smallest generator index with a non-zero denominator unless
// `column` forces one.  Throws DegenerateDenominator when none qualifies.
template <class R>
WadaInvariant<R> wada_invariant(const Presentation& p, const SymPowerRep<R>& rho, const AlphaMap& alpha,
                                std::optional<int> column = std::nullopt);

// The same group presented with x_replaced swapped for y = x_source x_replaced
// (so x_replaced = x_source^-1 y).  For a parabolic meridian x_j,
// det phi(x_j - 1) = (t^a - eps)^n, whose n-fold root makes deflation at
// t = 1 hopeless in floating point; with y loxodromic, det phi(y - 1) has at
// most a simple zero on |t| = 1.  The invariant is unchanged up to +-t^p.
template <class R>
struct ConditionedProblem {
  Presentation presentation;
  AlphaMap alpha;
  SymPowerRep<R> rho;
  int source = -1;    // -1: no substitution was made
  int replaced = -1;  // index of y, also the column to delete
  double dominant_eigenvalue = 1;  // |mu| >= 1 of rho2(y)

  WadaInvariant<R> invariant() const {
    return wada_invariant(presentation, rho, alpha,
                          replaced >= 0 ? std::optional<int>(replaced) : std::nullopt);
  }
};

// Picks the ordered pair (i, j) maximizing |mu| for eps(i) eps(j) rho2(x_i)
// rho2(x_j).  Falls back to the unmodified presentation when no product is
// loxodromic (|mu| - 1 < 1e-6) or there is a single generator.
template <class R>
ConditionedProblem<R> loxodromic_substitution(int n, const Presentation& p, const AlphaMap& alpha,
                                              const Sl2Rep<R>& rho2, const SignAssignment& signs);

template <class R>
struct LimitValue {
  Complex<R> value;         // 0 when zero_order > 0
  int zero_order = 0;       // multiplicity(num) - multiplicity(den)
  int num_multiplicity = 0;
  int den_multiplicity = 0;
  R max_accepted_residual{0};
};

// Limit of f(t) as t -> c after cancelling the factors (t - c).  Throws
// PoleError for a pole and PrecisionEscalation when a deflation remainder
// lands within a factor 10 above `tol`.
template <class R>
LimitValue<R> limit_value(const RationalFunction<R>& f, const Complex<R>& c, R tol);

template <class R>
LimitValue<R> limit_value(const WadaInvariant<R>& w, const Complex<R>& c, R tol) {
  return limit_value(w.rational(), c, tol);
}

template <class R>
struct LadderResult {
  Complex<R> value;
  bool converged = false;
  std::vector<Complex<R>> samples;  // f(c e^{i eps}) / (c e^{i eps} - c)^zero_order
};

inline constexpr double kDefaultLadder[] = {1e-2, 1e-3, 1e-4};

// Polynomial extrapolation to eps = 0 (Neville) of g(eps) =
// f(c e^{i eps}) / (c e^{i eps} - c)^zero_order.  `converged` compares the
// extrapolants with and without the coarsest rung.
template <class R, class F>
LadderResult<R> epsilon_ladder(F&& f, const Complex<R>& c, int zero_order,
                               std::span<const double> ladder = kDefaultLadder) {
  using C = Complex<R>;
  LadderResult<R> out;
  std::vector<R> eps;
  for (double e : ladder) {
    const R er(e);
    const C t = c * polar(R(1), er);
    C g = f(t);
    const C step = t - c;
    for (int k = 0; k < zero_order; ++k) g /= step;
    for (int k = 0; k > zero_order; --k) g *= step;
    out.samples.push_back(g);
    eps.push_back(er);
  }
  auto neville = [&](std::size_t first) {
    std::vector<C> p(out.samples.begin() + static_cast<std::ptrdiff_t>(first), out.samples.end());
    const std::size_t m = p.size();
    for (std::size_t level = 1; level < m; ++level) {
      for (std::size_t i = 0; i + level < m; ++i) {
        const R xi = eps[first + i];
        const R xj = eps[first + i + level];
        // Value at 0 of the interpolant through points i..i+level; exact for equal samples.
        p[i] = p[i] + (p[i] - p[i + 1]) * C(xi / (xj - xi));
      }
    }
    return p[0];
  };
  if (out.samples.empty()) return out;
  out.value = neville(0);
  if (out.samples.size() >= 2) {
    const C coarse = neville(1);
    const R scale = std::max(abs(out.value), R(1e-300));
    out.converged = abs(out.value - coarse) <= R(1e-4) * scale;
  } else {
    out.converged = true;
  }
  return out;
}

// Ladder on the polynomial coefficients of f.
template <class R>
LadderResult<R> cross_check_epsilon(const RationalFunction<R>& f, const Complex<R>& c, int zero_order,
                                    std::span<const double> ladder = kDefaultLadder) {
  return epsilon_ladder<R>([&](const Complex<R>& t) { return f(t); }, c, zero_order, ladder);
}

// Ladder on determinants of the Fox matrices evaluated directly at each t,
// independent of the interpolated polynomials.
template <class R>
LadderResult<R> cross_check_epsilon(const WadaInvariant<R>& w, const Complex<R>& c, int zero_order,
                                    std::span<const double> ladder = kDefaultLadder) {
  return epsilon_ladder<R>(
      [&](const Complex<R>& t) {
        return lu_det(w.num_matrix.evaluate(t)).value / lu_det(w.den_matrix.evaluate(t)).value;
      },
      c, zero_order, ladder);
}

#define TWV_WADA_EXTERN(R)                                                                                  \
  extern template LaurentMatrix<R> phi<R>(const SymPowerRep<R>&, const AlphaMap&, const GroupRingElement&); \
  extern template class FoxMatrix<R>;                                                                       \
  extern template FoxMatrix<R> build_fox_matrix<R>(const Presentation&, const SymPowerRep<R>&,              \
                                                   const AlphaMap&);                                        \
  extern template WadaInvariant<R> wada_invariant<R>(const Presentation&, const SymPowerRep<R>&,            \
                                                     const AlphaMap&, std::optional<int>);                  \
  extern template LimitValue<R> limit_value<R>(const RationalFunction<R>&, const Complex<R>&, R);        \
  extern template ConditionedProblem<R> loxodromic_substitution<R>(int, const Presentation&, const AlphaMap&, \
                                                                   const Sl2Rep<R>&, const SignAssignment&);

TWV_WADA_EXTERN(double)
TWV_WADA_EXTERN(quad)
TWV_WADA_EXTERN(mp)
#undef TWV_WADA_EXTERN

}  // namespace twv
