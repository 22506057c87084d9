#include "twv/representations.hpp"

#include <algorithm>
#include <cmath>

namespace twv {

namespace {

template <class R>
Complex<R> det2(const CMatrix<R>& a) {
  return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
}

template <class R>
CMatrix<R> adjugate2(const CMatrix<R>& a) {
  CMatrix<R> out(2, 2);
  out(0, 0) = a(1, 1);
  out(0, 1) = -a(0, 1);
  out(1, 0) = -a(1, 0);
  out(1, 1) = a(0, 0);
  return out;
}

template <class R>
void require_unimodular(const CMatrix<R>& a, double tol, const char* what) {
  if (a.rows() != 2 || a.cols() != 2) throw MathError(std::string(what) + ": expected a 2x2 matrix");
  const double defect = to_double(abs(det2(a) - Complex<R>(R(1))));
  if (!(defect <= tol)) {
    throw MathError(std::string(what) + ": |det - 1| = " + std::to_string(defect) + " exceeds tolerance");
  }
}

template <class R>
std::vector<Complex<R>> convolve(const std::vector<Complex<R>>& a, const std::vector<Complex<R>>& b) {
  std::vector<Complex<R>> out(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

}  // namespace

template <class R>
Sl2Rep<R> make_sl2_rep(std::vector<CMatrix<R>> images, std::string branch, double tol) {
  for (const auto& m : images) require_unimodular(m, tol, "holonomy image");
  return Sl2Rep<R>{std::move(images), std::move(branch)};
}

template <class R>
Sl2Rep<R> to_sl2(const Holonomy& h, double tol) {
  std::vector<CMatrix<R>> images;
  for (const auto& m : h.matrices) {
    CMatrix<R> a(2, 2);
    for (std::size_t k = 0; k < 4; ++k) {
      a(k / 2, k % 2) = Complex<R>(RealOps<R>::parse(m[k].re), RealOps<R>::parse(m[k].im));
    }
    images.push_back(std::move(a));
  }
  return make_sl2_rep<R>(std::move(images), h.branch, tol);
}

template <class R>
Sl2Rep<R> conjugate(const Sl2Rep<R>& rep, const CMatrix<R>& s) {
  const CMatrix<R> s_inv = adjugate2(s) * (Complex<R>(R(1)) / det2(s));
  Sl2Rep<R> out;
  out.branch = rep.branch;
  for (const auto& m : rep.images) out.images.push_back(s * m * s_inv);
  return out;
}

SignAssignment::SignAssignment(std::vector<int> signs) : signs_(std::move(signs)) {
  for (int s : signs_) {
    if (s != 1 && s != -1) throw InputError("sign entries must be +1 or -1");
  }
}

SignAssignment SignAssignment::parse(const std::string& text) {
  std::vector<int> signs;
  for (char ch : text) {
    if (ch == '+') {
      signs.push_back(1);
    } else if (ch == '-') {
      signs.push_back(-1);
    } else {
      throw InputError("sign assignment must consist of '+' and '-': '" + text + "'");
    }
  }
  if (signs.empty()) throw InputError("empty sign assignment");
  return SignAssignment(std::move(signs));
}

SignAssignment SignAssignment::all_plus(int components) {
  return SignAssignment(std::vector<int>(static_cast<std::size_t>(components), 1));
}

std::vector<SignAssignment> SignAssignment::enumerate(int components) {
  std::vector<SignAssignment> out;
  const unsigned count = 1U << components;
  for (unsigned mask = 0; mask < count; ++mask) {
    std::vector<int> s(static_cast<std::size_t>(components));
    for (int l = 0; l < components; ++l) s[static_cast<std::size_t>(l)] = (mask >> (components - 1 - l)) & 1U ? -1 : 1;
    out.emplace_back(std::move(s));
  }
  return out;
}

std::string SignAssignment::to_string() const {
  std::string out;
  for (int s : signs_) out += s > 0 ? '+' : '-';
  return out;
}

template <class R>
CMatrix<R> sym_power(int n, const CMatrix<R>& a, double tol) {
  using C = Complex<R>;
  if (n < 1) throw MathError("sym_power: dimension must be at least 1");
  require_unimodular(a, tol, "sym_power");
  // The substitution rule below gives A^{-T} = J A J^{-1} at n = 2; use A itself.
  if (n == 2) return a;
  // A^{-1} = [[d, -b], [-c, a]]; x' = d x - b y, y' = -c x + a y.
  // Polynomials in y with x implicit: index i holds the coefficient of x^{k-i} y^i.
  const std::vector<C> x_image{a(1, 1), -a(0, 1)};
  const std::vector<C> y_image{-a(1, 0), a(0, 0)};
  const auto size = static_cast<std::size_t>(n);
  std::vector<std::vector<C>> x_powers{{C(R(1))}};
  std::vector<std::vector<C>> y_powers{{C(R(1))}};
  for (std::size_t k = 1; k < size; ++k) {
    x_powers.push_back(convolve(x_powers.back(), x_image));
    y_powers.push_back(convolve(y_powers.back(), y_image));
  }
  CMatrix<R> out(size, size);
  for (std::size_t j = 0; j < size; ++j) {
    const auto column = convolve(x_powers[size - 1 - j], y_powers[j]);
    for (std::size_t i = 0; i < size; ++i) out(i, j) = column[i];
  }
  return out;
}

template <class R>
SymPowerRep<R> lift_rep(int n, const Presentation& p, const Sl2Rep<R>& rho2, const SignAssignment& signs) {
  if (static_cast<int>(rho2.images.size()) != p.generator_count()) {
    throw InputError("holonomy has " + std::to_string(rho2.images.size()) + " images for " +
                     std::to_string(p.generator_count()) + " generators");
  }
  if (signs.size() != p.component_count()) {
    throw InputError("sign assignment '" + signs.to_string() + "' has wrong length for " +
                     std::to_string(p.component_count()) + " components");
  }
  SymPowerRep<R> out;
  out.dim = n;
  out.base = rho2;
  out.signs = signs;
  for (int g = 0; g < p.generator_count(); ++g) {
    const Complex<R> eps(R(signs[p.generators()[static_cast<std::size_t>(g)].component]));
    const CMatrix<R> lifted = rho2.images[static_cast<std::size_t>(g)] * eps;
    out.images.push_back(sym_power(n, lifted));
    // adj(A) is A^{-1} exactly for det A = 1.
    out.inverses.push_back(sym_power(n, adjugate2(lifted)));
  }
  return out;
}

template <class R>
CMatrix<R> evaluate_word(const SymPowerRep<R>& rho, const Word& w) {
  auto out = CMatrix<R>::identity(static_cast<std::size_t>(rho.dim));
  for (const auto& l : w.letters()) {
    const auto& m = l.sign > 0 ? rho.images.at(static_cast<std::size_t>(l.generator))
                               : rho.inverses.at(static_cast<std::size_t>(l.generator));
    out = out * m;
  }
  return out;
}

template <class R>
RepReport verify_rep(const Presentation& p, const SymPowerRep<R>& rho, double tol) {
  RepReport report;
  report.dim = rho.dim;
  report.signs = rho.signs.to_string();
  const auto identity = CMatrix<R>::identity(static_cast<std::size_t>(rho.dim));
  for (std::size_t i = 0; i < p.relators().size(); ++i) {
    const double residual = to_double((evaluate_word(rho, p.relators()[i]) - identity).max_abs());
    report.max_relator_residual = std::max(report.max_relator_residual, residual);
    if (!(residual <= tol)) {
      report.failures.push_back("relator " + std::to_string(i) + " residual " + std::to_string(residual) +
                                " exceeds tolerance");
    }
  }
  for (int g = 0; g < p.generator_count(); ++g) {
    const auto& gen = p.generators()[static_cast<std::size_t>(g)];
    const auto& image = rho.images.at(static_cast<std::size_t>(g));
    GeneratorCheck check;
    check.generator = gen.name;
    check.component = gen.component;
    check.det_defect = to_double(abs(lu_det(image).value - Complex<R>(R(1))));
    const auto trace = image.trace();
    check.trace_re = to_double(trace.re);
    check.trace_im = to_double(trace.im);
    const int eps = rho.signs[gen.component];
    check.expected_trace = ((rho.dim - 1) % 2 == 0 ? 1 : eps) * rho.dim;
    const double trace_defect = std::hypot(check.trace_re - check.expected_trace, check.trace_im);
    report.max_det_defect = std::max(report.max_det_defect, check.det_defect);
    report.max_trace_defect = std::max(report.max_trace_defect, trace_defect);
    if (!(check.det_defect <= tol * rho.dim)) {
      report.failures.push_back("generator " + gen.name + " has |det - 1| = " + std::to_string(check.det_defect));
    }
    if (!(trace_defect <= tol * rho.dim)) {
      report.failures.push_back("generator " + gen.name + " has trace " + std::to_string(check.trace_re) +
                                (check.trace_im < 0 ? "" : "+") + std::to_string(check.trace_im) +
                                "i, expected " + std::to_string(check.expected_trace) + " for a parabolic meridian");
    }
    report.generators.push_back(check);
  }
  return report;
}

cdouble whitehead_cubic(cdouble x, cdouble y, cdouble v) {
  const cdouble two(2.0);
  return x * y - (x * x + y * y - two) * v + x * y * v * v - v * v * v;
}

std::vector<cdouble> whitehead_gamma_candidates() {
  // p(2, 2, v) = 4 - 6v + 4v^2 - v^3
  const std::vector<cdouble> coeffs{cdouble(4.0), cdouble(-6.0), cdouble(4.0), cdouble(-1.0)};
  const auto roots = polynomial_roots<double>(coeffs);
  std::vector<cdouble> out;
  for (const auto& v : roots) {
    // Excluded set at x = y = 2: v = +-2.
    if (abs(v - cdouble(2.0)) < 1e-6 || abs(v + cdouble(2.0)) < 1e-6) continue;
    out.push_back(v - cdouble(2.0));
  }
  std::sort(out.begin(), out.end(), [](const cdouble& a, const cdouble& b) { return a.im > b.im; });
  return out;
}

#define TWV_REP_INSTANTIATE(R)                                                                         \
  template Sl2Rep<R> make_sl2_rep<R>(std::vector<CMatrix<R>>, std::string, double);                   \
  template Sl2Rep<R> to_sl2<R>(const Holonomy&, double);                                               \
  template Sl2Rep<R> conjugate<R>(const Sl2Rep<R>&, const CMatrix<R>&);                               \
  template CMatrix<R> sym_power<R>(int, const CMatrix<R>&, double);                                   \
  template SymPowerRep<R> lift_rep<R>(int, const Presentation&, const Sl2Rep<R>&, const SignAssignment&); \
  template CMatrix<R> evaluate_word<R>(const SymPowerRep<R>&, const Word&);                           \
  template RepReport verify_rep<R>(const Presentation&, const SymPowerRep<R>&, double);

TWV_REP_INSTANTIATE(double)
TWV_REP_INSTANTIATE(quad)
TWV_REP_INSTANTIATE(mp)

}  // namespace twv
