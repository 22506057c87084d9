#pragma once

// SL(2,C) holonomy data, sign-of-holonomy lifts, and the n-dimensional
// irreducible representation sigma_n realized on homogeneous polynomials.

#include <array>
#include <string>
#include <vector>

#include "twv/group_words.hpp"
#include "twv/laurent_linalg.hpp"

namespace twv {

// One 2x2 unimodular matrix per generator, in generator order.
template <class R>
struct Sl2Rep {
  std::vector<CMatrix<R>> images;
  std::string branch;  // free text, e.g. which root of u^2+u+1=0
};

// Holonomy as decimal strings, kept verbatim so that each backend parses the
// entries at its own precision.
struct ComplexText {
  std::string re = "0";
  std::string im = "0";
  friend bool operator==(const ComplexText&, const ComplexText&) = default;
};

struct Holonomy {
  std::string branch;
  std::vector<std::array<ComplexText, 4>> matrices;  // per generator, row-major
  friend bool operator==(const Holonomy&, const Holonomy&) = default;
};

// Checks shape and |det - 1| <= tol; throws MathError otherwise.
template <class R>
Sl2Rep<R> make_sl2_rep(std::vector<CMatrix<R>> images, std::string branch, double tol = 1e-8);

// S rho S^-1 generator-wise.
template <class R>
Sl2Rep<R> conjugate(const Sl2Rep<R>& rep, const CMatrix<R>& s);

// Parses the strings with RealOps<R>::parse, then make_sl2_rep.
template <class R>
Sl2Rep<R> to_sl2(const Holonomy& h, double tol = 1e-8);

template <class To, class From>
Sl2Rep<To> rep_cast(const Sl2Rep<From>& rep) {
  Sl2Rep<To> out;
  out.branch = rep.branch;
  for (const auto& m : rep.images) out.images.push_back(matrix_cast<To>(m));
  return out;
}

// Per-component sign eps(l) in {+1,-1}; written as a string such as "+-".
class SignAssignment {
 public:
  SignAssignment() = default;
  explicit SignAssignment(std::vector<int> signs);

  static SignAssignment parse(const std::string& text);
  static SignAssignment all_plus(int components);
  // All 2^b assignments, "+...+" first, in lexicographic order with + < -.
  static std::vector<SignAssignment> enumerate(int components);

  int size() const { return static_cast<int>(signs_.size()); }
  int operator[](int component) const { return signs_.at(static_cast<std::size_t>(component)); }
  std::string to_string() const;

  friend bool operator==(const SignAssignment&, const SignAssignment&) = default;

 private:
  std::vector<int> signs_;
};

template <class R>
struct SymPowerRep {
  int dim = 0;
  std::vector<CMatrix<R>> images;
  std::vector<CMatrix<R>> inverses;
  Sl2Rep<R> base;
  SignAssignment signs;
};

// sigma_n(A) in the basis x^{n-1}, x^{n-2}y, ..., y^{n-1}; column j is the
// image of x^{n-1-j} y^j under p(x,y) -> p(A^{-1}(x,y)).
template <class R>
CMatrix<R> sym_power(int n, const CMatrix<R>& a, double tol = 1e-8);

// Generator g of component l maps to sym_power(n, eps(l) * rho2(g)).
template <class R>
SymPowerRep<R> lift_rep(int n, const Presentation& p, const Sl2Rep<R>& rho2, const SignAssignment& signs);

template <class R>
CMatrix<R> evaluate_word(const SymPowerRep<R>& rho, const Word& w);

struct GeneratorCheck {
  std::string generator;
  int component = 0;
  double det_defect = 0;    // |det - 1|
  double trace_re = 0;
  double trace_im = 0;
  double expected_trace = 0;  // eps(l)^{n-1} * n for a parabolic meridian
};

struct RepReport {
  int dim = 0;
  std::string signs;
  double max_relator_residual = 0;  // max_r max-entry |rho(r) - I|
  double max_det_defect = 0;
  double max_trace_defect = 0;
  std::vector<GeneratorCheck> generators;
  std::vector<std::string> failures;

  bool ok() const { return failures.empty(); }
};

template <class R>
RepReport verify_rep(const Presentation& p, const SymPowerRep<R>& rho, double tol);

// p(x, y, v) = xy - (x^2 + y^2 - 2) v + x y v^2 - v^3.
cdouble whitehead_cubic(cdouble x, cdouble y, cdouble v);

// Parabolic points x = y = 2 of the cubic with the excluded set removed,
// shifted to gamma = v - 2.  Ordered by decreasing imaginary part.
std::vector<cdouble> whitehead_gamma_candidates();

#define TWV_REP_EXTERN(R)                                                                              \
  extern template Sl2Rep<R> make_sl2_rep<R>(std::vector<CMatrix<R>>, std::string, double);            \
  extern template Sl2Rep<R> to_sl2<R>(const Holonomy&, double);                                      \
  extern template Sl2Rep<R> conjugate<R>(const Sl2Rep<R>&, const CMatrix<R>&);                        \
  extern template CMatrix<R> sym_power<R>(int, const CMatrix<R>&, double);                            \
  extern template SymPowerRep<R> lift_rep<R>(int, const Presentation&, const Sl2Rep<R>&,              \
                                             const SignAssignment&);                                  \
  extern template CMatrix<R> evaluate_word<R>(const SymPowerRep<R>&, const Word&);                    \
  extern template RepReport verify_rep<R>(const Presentation&, const SymPowerRep<R>&, double);

TWV_REP_EXTERN(double)
TWV_REP_EXTERN(quad)
TWV_REP_EXTERN(mp)
#undef TWV_REP_EXTERN

}  // namespace twv
