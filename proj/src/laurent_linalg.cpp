#include "twv/laurent_linalg.hpp"

#include <cmath>
#include <limits>

namespace twv {

template <class R>
LuDeterminant<R> lu_det(CMatrix<R> m) {
  using C = Complex<R>;
  if (!m.square()) throw std::invalid_argument("lu_det: matrix is not square");
  const std::size_t n = m.rows();
  C product(R(1));
  C phase(R(1));
  R log_abs(0);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    R best_norm = norm(m(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      R a = norm(m(i, k));
      if (a > best_norm) {
        best_norm = std::move(a);
        pivot = i;
      }
    }
    if (best_norm == R(0)) {
      return {C(), C(R(1)), -RealOps<R>::infinity(), true};
    }
    if (pivot != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(pivot, j));
      product = -product;
      phase = -phase;
    }
    const C p = m(k, k);
    const R best = abs(p);
    product *= p;
    phase *= C(p.re / best, p.im / best);
    log_abs += RealOps<R>::log(best);
    for (std::size_t i = k + 1; i < n; ++i) {
      if (m(i, k).is_zero()) continue;
      const C factor = m(i, k) / p;
      for (std::size_t j = k + 1; j < n; ++j) sub_product(m(i, j), factor, m(k, j));
    }
  }
  return {product, phase, log_abs, false};
}

template <class R>
CMatrix<R> inverse(const CMatrix<R>& a) {
  using C = Complex<R>;
  if (!a.square()) throw std::invalid_argument("inverse: matrix is not square");
  const std::size_t n = a.rows();
  CMatrix<R> m = a;
  CMatrix<R> inv = CMatrix<R>::identity(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pivot = k;
    R best = abs(m(k, k));
    for (std::size_t i = k + 1; i < n; ++i) {
      if (abs(m(i, k)) > best) {
        best = abs(m(i, k));
        pivot = i;
      }
    }
    if (best == R(0)) throw MathError("inverse: matrix is singular");
    if (pivot != k) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(m(k, j), m(pivot, j));
        std::swap(inv(k, j), inv(pivot, j));
      }
    }
    const C p = m(k, k);
    for (std::size_t j = 0; j < n; ++j) {
      m(k, j) /= p;
      inv(k, j) /= p;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k || m(i, k).is_zero()) continue;
      const C factor = m(i, k);
      for (std::size_t j = 0; j < n; ++j) {
        sub_product(m(i, j), factor, m(k, j));
        sub_product(inv(i, j), factor, inv(k, j));
      }
    }
  }
  return inv;
}

template <class R>
Complex<R> poly_eval(const LaurentPoly<R>& p, const Complex<R>& z) {
  using C = Complex<R>;
  if (p.is_zero()) return C();
  if (z.is_zero()) {
    if (p.lo() < 0) throw DomainError("poly_eval: evaluation at 0 of a polynomial with negative exponents");
    return p.coeff(0);
  }
  const auto c = p.coefficients();
  C acc;
  for (std::size_t k = c.size(); k-- > 0;) horner_step(acc, z, c[k]);
  // t^lo by repeated squaring.
  int e = p.lo();
  C base = e < 0 ? C(R(1)) / z : z;
  unsigned long k = static_cast<unsigned long>(e < 0 ? -static_cast<long>(e) : e);
  C power(R(1));
  while (k) {
    if (k & 1UL) power *= base;
    base *= base;
    k >>= 1;
  }
  return acc * power;
}

template <class R>
R horner_scale(const LaurentPoly<R>& p, R z_abs) {
  R scale(0);
  R power(1);
  for (const auto& x : p.coefficients()) {
    scale += abs(x) * power;
    power *= z_abs;
  }
  return scale;
}

template <class R>
LaurentMatrix<R> LaurentMatrix<R>::from_terms(std::size_t rows, std::size_t cols,
                                              const std::vector<std::pair<int, CMatrix<R>>>& terms) {
  if (terms.empty()) return LaurentMatrix(rows, cols);
  int lo = terms.front().first;
  int hi = lo;
  for (const auto& [e, m] : terms) {
    if (m.rows() != rows || m.cols() != cols) throw std::invalid_argument("from_terms: shape mismatch");
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  const auto width = static_cast<std::size_t>(hi - lo + 1);
  std::vector<std::vector<Complex<R>>> dense(rows * cols, std::vector<Complex<R>>(width));
  for (const auto& [e, m] : terms) {
    for (std::size_t i = 0; i < rows; ++i) {
      for (std::size_t j = 0; j < cols; ++j) dense[i * cols + j][static_cast<std::size_t>(e - lo)] += m(i, j);
    }
  }
  LaurentMatrix out(rows, cols);
  for (std::size_t k = 0; k < rows * cols; ++k) out.entries_[k] = LaurentPoly<R>(lo, std::move(dense[k]));
  return out;
}

template <class R>
CMatrix<R> LaurentMatrix<R>::evaluate(const Complex<R>& z) const {
  using C = Complex<R>;
  CMatrix<R> out(rows_, cols_);
  const auto window = entry_window();
  if (!window) return out;
  if (z.is_zero() && window->first < 0) {
    throw DomainError("LaurentMatrix::evaluate: evaluation at 0 with negative exponents");
  }
  // z^e for every lowest exponent e, shared by all entries.
  const int lo = window->first;
  std::vector<C> powers(static_cast<std::size_t>(window->second - lo + 1));
  {
    const C step = lo < 0 ? C(R(1)) / z : z;
    C p(R(1));
    for (int e = 0; e < std::abs(lo); ++e) p *= step;
    powers[0] = p;
    for (std::size_t k = 1; k < powers.size(); ++k) powers[k] = powers[k - 1] * z;
  }
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) {
      const auto& e = (*this)(i, j);
      if (e.is_zero()) continue;
      const auto c = e.coefficients();
      C acc;
      for (std::size_t k = c.size(); k-- > 0;) horner_step(acc, z, c[k]);
      out(i, j) = acc * powers[static_cast<std::size_t>(e.lo() - lo)];
    }
  }
  return out;
}

template <class R>
std::optional<std::pair<int, int>> LaurentMatrix<R>::det_window() const {
  int lo = 0;
  int hi = 0;
  for (std::size_t i = 0; i < rows_; ++i) {
    bool any = false;
    int row_lo = 0;
    int row_hi = 0;
    for (std::size_t j = 0; j < cols_; ++j) {
      const auto& e = (*this)(i, j);
      if (e.is_zero()) continue;
      row_lo = any ? std::min(row_lo, e.lo()) : e.lo();
      row_hi = any ? std::max(row_hi, e.hi()) : e.hi();
      any = true;
    }
    if (!any) return std::nullopt;
    lo += row_lo;
    hi += row_hi;
  }
  return std::make_pair(lo, hi);
}

template <class R>
std::optional<std::pair<int, int>> LaurentMatrix<R>::entry_window() const {
  std::optional<std::pair<int, int>> w;
  for (const auto& e : entries_) {
    if (e.is_zero()) continue;
    if (!w) {
      w = std::make_pair(e.lo(), e.hi());
    } else {
      w->first = std::min(w->first, e.lo());
      w->second = std::max(w->second, e.hi());
    }
  }
  return w;
}

template <class R>
LaurentPoly<R> interpolate_unit_circle(int lo, std::span<const Complex<R>> samples, R clamp_threshold) {
  using C = Complex<R>;
  const long m = static_cast<long>(samples.size());
  if (m == 0) return {};
  std::vector<C> roots(static_cast<std::size_t>(m));
  for (long j = 0; j < m; ++j) roots[static_cast<std::size_t>(j)] = unit_root<R>(j, m);
  std::vector<C> coeffs(static_cast<std::size_t>(m));
  for (long idx = 0; idx < m; ++idx) {
    const long e = lo + idx;
    C acc;
    for (long k = 0; k < m; ++k) {
      long r = (-k * e) % m;
      if (r < 0) r += m;
      add_product(acc, samples[static_cast<std::size_t>(k)], roots[static_cast<std::size_t>(r)]);
    }
    acc = C(acc.re / R(m), acc.im / R(m));
    if (abs(acc) < clamp_threshold) acc = C();
    coeffs[static_cast<std::size_t>(idx)] = acc;
  }
  return LaurentPoly<R>(lo, std::move(coeffs));
}

template <class R>
LaurentPoly<R> laurent_det(const LaurentMatrix<R>& m, InterpolationOptions options) {
  if (m.rows() != m.cols()) throw std::invalid_argument("laurent_det: matrix is not square");
  if (m.rows() == 0) return LaurentPoly<R>::constant(Complex<R>(R(1)));
  const auto window = m.det_window();
  if (!window) return {};
  const long width = window->second - window->first + 1;
  std::vector<Complex<R>> samples(static_cast<std::size_t>(width));
  R max_sample(0);
  for (long k = 0; k < width; ++k) {
    const auto d = lu_det(m.evaluate(unit_root<R>(k, width)));
    samples[static_cast<std::size_t>(k)] = d.value;
    max_sample = std::max(max_sample, abs(d.value));
  }
  const R threshold = R(options.clamp_factor) * R(width) * RealOps<R>::epsilon() * max_sample;
  return interpolate_unit_circle<R>(window->first, samples, threshold);
}

template <class R>
Deflation<R> deflate_at(const LaurentPoly<R>& p, const Complex<R>& c, R tol) {
  using C = Complex<R>;
  Deflation<R> out;
  out.quotient = p;
  const R c_abs = abs(c);
  while (out.quotient.width() >= 2) {
    const auto coeffs = out.quotient.coefficients();
    const std::size_t d = coeffs.size() - 1;
    std::vector<C> q(d);
    C acc = coeffs[d];
    for (std::size_t k = d; k-- > 0;) {
      q[k] = acc;
      acc = coeffs[k] + c * acc;
    }
    const R scale = horner_scale(out.quotient, c_abs);
    const R residual = scale > R(0) ? abs(acc) / scale : R(0);
    if (residual > tol) {
      out.rejected_residual = residual;
      return out;
    }
    out.accepted_residual = std::max(out.accepted_residual, residual);
    out.quotient = LaurentPoly<R>(out.quotient.lo(), std::move(q));
    ++out.multiplicity;
  }
  return out;
}

template <class R>
bool compare_up_to_unit(const LaurentPoly<R>& f, const LaurentPoly<R>& g, R tol) {
  if (f.is_zero() || g.is_zero()) return f.is_zero() && g.is_zero();
  const auto ft = f.trimmed(tol);
  const auto gt = g.trimmed(tol);
  if (ft.width() != gt.width()) return false;
  const R scale = std::max(ft.max_abs(), gt.max_abs());
  const auto fc = ft.coefficients();
  const auto gc = gt.coefficients();
  for (R sign : {R(1), R(-1)}) {
    bool match = true;
    for (std::size_t k = 0; k < fc.size() && match; ++k) {
      if (abs(fc[k] - Complex<R>(sign) * gc[k]) > tol * scale) match = false;
    }
    if (match) return true;
  }
  return false;
}

template <class R>
std::vector<Complex<R>> polynomial_roots(std::span<const Complex<R>> coefficients) {
  using C = Complex<R>;
  std::size_t d = coefficients.size();
  while (d > 0 && coefficients[d - 1].is_zero()) --d;
  if (d <= 1) return {};
  --d;  // degree
  std::vector<C> a(coefficients.begin(), coefficients.begin() + static_cast<std::ptrdiff_t>(d + 1));
  const C lead = a[d];
  for (auto& x : a) x /= lead;

  R radius(0);
  for (std::size_t k = 0; k < d; ++k) radius = std::max(radius, abs(a[k]));
  radius = R(1) + radius;  // Cauchy bound
  std::vector<C> z(d);
  for (std::size_t k = 0; k < d; ++k) {
    const R angle = R(2) * RealOps<R>::pi() * R(static_cast<double>(k)) / R(static_cast<double>(d)) + R(0.4);
    z[k] = polar(radius * R(0.5), angle);
  }

  auto eval = [&](const C& x, C& value, C& deriv) {
    value = a[d];
    deriv = C();
    for (std::size_t k = d; k-- > 0;) {
      deriv = deriv * x + value;
      value = value * x + a[k];
    }
  };

  const R eps = RealOps<R>::epsilon();
  for (int iter = 0; iter < 500; ++iter) {
    R max_step(0);
    for (std::size_t k = 0; k < d; ++k) {
      C value;
      C deriv;
      eval(z[k], value, deriv);
      if (value.is_zero()) continue;
      const C ratio = value / deriv;
      C sum;
      for (std::size_t j = 0; j < d; ++j) {
        if (j != k) sum += C(R(1)) / (z[k] - z[j]);
      }
      const C step = ratio / (C(R(1)) - ratio * sum);
      z[k] -= step;
      max_step = std::max(max_step, abs(step) / std::max(R(1), abs(z[k])));
    }
    if (max_step < eps * R(4)) break;
  }
  return z;
}

#define TWV_LAURENT_INSTANTIATE(R)                                                             \
  template LuDeterminant<R> lu_det<R>(CMatrix<R>);                                           \
  template CMatrix<R> inverse<R>(const CMatrix<R>&);                                         \
  template Complex<R> poly_eval<R>(const LaurentPoly<R>&, const Complex<R>&);                \
  template R horner_scale<R>(const LaurentPoly<R>&, R);                                      \
  template class LaurentMatrix<R>;                                                           \
  template LaurentPoly<R> laurent_det<R>(const LaurentMatrix<R>&, InterpolationOptions);     \
  template LaurentPoly<R> interpolate_unit_circle<R>(int, std::span<const Complex<R>>, R);   \
  template Deflation<R> deflate_at<R>(const LaurentPoly<R>&, const Complex<R>&, R);          \
  template bool compare_up_to_unit<R>(const LaurentPoly<R>&, const LaurentPoly<R>&, R);      \
  template std::vector<Complex<R>> polynomial_roots<R>(std::span<const Complex<R>>);

TWV_LAURENT_INSTANTIATE(double)
TWV_LAURENT_INSTANTIATE(quad)
TWV_LAURENT_INSTANTIATE(mp)

}  // namespace twv
