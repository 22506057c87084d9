#pragma once

// Complex dense matrices, Laurent polynomials in one variable t, rational
// functions, and determinants of Laurent-polynomial matrices.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "twv/errors.hpp"
#include "twv/scalar.hpp"

namespace twv {

template <class R>
class CMatrix {
 public:
  using Scalar = Complex<R>;

  CMatrix() = default;
  CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  CMatrix(std::size_t rows, std::size_t cols, std::vector<Scalar> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) throw std::invalid_argument("CMatrix: data size mismatch");
  }

  static CMatrix identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = Scalar(R(1));
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  Scalar& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Scalar& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  std::span<const Scalar> data() const { return data_; }

  CMatrix& operator+=(const CMatrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  CMatrix& operator-=(const CMatrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
    return *this;
  }
  CMatrix& operator*=(const Scalar& s) {
    for (auto& x : data_) x *= s;
    return *this;
  }
  friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
  friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
  friend CMatrix operator*(CMatrix a, const Scalar& s) { return a *= s; }
  friend CMatrix operator*(const Scalar& s, CMatrix a) { return a *= s; }

  friend CMatrix operator*(const CMatrix& a, const CMatrix& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("CMatrix: product dimension mismatch");
    CMatrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const Scalar aik = a(i, k);
        if (aik.is_zero()) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) add_product(out(i, j), aik, b(k, j));
      }
    }
    return out;
  }

  Scalar trace() const {
    Scalar s;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) s += (*this)(i, i);
    return s;
  }

  // Largest entry modulus.
  R max_abs() const {
    R m(0);
    for (const auto& x : data_) m = std::max(m, abs(x));
    return m;
  }

 private:
  void check_same(const CMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("CMatrix: dimension mismatch");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Scalar> data_;
};

template <class To, class From>
CMatrix<To> matrix_cast(const CMatrix<From>& m) {
  CMatrix<To> out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = complex_cast<To>(m(i, j));
  }
  return out;
}

template <class R>
struct LuDeterminant {
  Complex<R> value;   // zero when singular
  Complex<R> phase;   // unit modulus; value = phase * exp(log_abs)
  R log_abs;          // -inf when singular
  bool singular = false;
};

// Partially pivoted LU.  The log-magnitude is accumulated per pivot so it
// stays finite when `value` would overflow.
template <class R>
LuDeterminant<R> lu_det(CMatrix<R> m);

// Throws MathError when singular.
template <class R>
CMatrix<R> inverse(const CMatrix<R>& m);

// sum_k c_k t^k, k in [lo, hi].  Stored densely; edge zeros are trimmed so a
// non-zero polynomial has non-zero first and last coefficients.
template <class R>
class LaurentPoly {
 public:
  using Scalar = Complex<R>;

  LaurentPoly() = default;
  LaurentPoly(int lo, std::vector<Scalar> coefficients) : lo_(lo), c_(std::move(coefficients)) { trim_exact(); }

  static LaurentPoly constant(Scalar c) { return LaurentPoly(0, {c}); }
  static LaurentPoly monomial(Scalar c, int exponent) { return LaurentPoly(exponent, {c}); }
  // t - c
  static LaurentPoly linear_root(Scalar c) { return LaurentPoly(0, {-c, Scalar(R(1))}); }

  bool is_zero() const { return c_.empty(); }
  int lo() const { return lo_; }
  int hi() const { return lo_ + static_cast<int>(c_.size()) - 1; }
  std::size_t width() const { return c_.size(); }
  std::span<const Scalar> coefficients() const { return c_; }

  Scalar coeff(int exponent) const {
    if (is_zero() || exponent < lo_ || exponent > hi()) return Scalar();
    return c_[static_cast<std::size_t>(exponent - lo_)];
  }

  R max_abs() const {
    R m(0);
    for (const auto& x : c_) m = std::max(m, abs(x));
    return m;
  }

  LaurentPoly shifted(int p) const {
    LaurentPoly out = *this;
    out.lo_ += p;
    return out;
  }

  // Drops edge coefficients whose modulus is at most rel_tol * max|c|.
  LaurentPoly trimmed(R rel_tol) const {
    if (is_zero()) return *this;
    const R cut = rel_tol * max_abs();
    std::size_t first = 0;
    std::size_t last = c_.size();
    while (first < last && abs(c_[first]) <= cut) ++first;
    while (last > first && abs(c_[last - 1]) <= cut) --last;
    return LaurentPoly(lo_ + static_cast<int>(first),
                       std::vector<Scalar>(c_.begin() + static_cast<std::ptrdiff_t>(first),
                                           c_.begin() + static_cast<std::ptrdiff_t>(last)));
  }

  LaurentPoly& operator+=(const LaurentPoly& o) { return accumulate(o, R(1)); }
  LaurentPoly& operator-=(const LaurentPoly& o) { return accumulate(o, R(-1)); }
  LaurentPoly& operator*=(const Scalar& s) {
    for (auto& x : c_) x *= s;
    trim_exact();
    return *this;
  }
  friend LaurentPoly operator+(LaurentPoly a, const LaurentPoly& b) { return a += b; }
  friend LaurentPoly operator-(LaurentPoly a, const LaurentPoly& b) { return a -= b; }
  friend LaurentPoly operator*(LaurentPoly a, const Scalar& s) { return a *= s; }
  friend LaurentPoly operator*(const Scalar& s, LaurentPoly a) { return a *= s; }
  friend LaurentPoly operator-(LaurentPoly a) { return a *= Scalar(R(-1)); }

  friend LaurentPoly operator*(const LaurentPoly& a, const LaurentPoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<Scalar> out(a.c_.size() + b.c_.size() - 1);
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      for (std::size_t j = 0; j < b.c_.size(); ++j) add_product(out[i + j], a.c_[i], b.c_[j]);
    }
    return LaurentPoly(a.lo_ + b.lo_, std::move(out));
  }
  LaurentPoly& operator*=(const LaurentPoly& o) { return *this = *this * o; }

 private:
  LaurentPoly& accumulate(const LaurentPoly& o, R sign) {
    if (o.is_zero()) return *this;
    if (is_zero()) {
      *this = o;
      if (sign < R(0)) *this *= Scalar(sign);
      return *this;
    }
    const int new_lo = std::min(lo_, o.lo_);
    const int new_hi = std::max(hi(), o.hi());
    std::vector<Scalar> out(static_cast<std::size_t>(new_hi - new_lo + 1));
    for (std::size_t k = 0; k < c_.size(); ++k) out[static_cast<std::size_t>(lo_ - new_lo) + k] = c_[k];
    for (std::size_t k = 0; k < o.c_.size(); ++k) {
      out[static_cast<std::size_t>(o.lo_ - new_lo) + k] += Scalar(sign) * o.c_[k];
    }
    lo_ = new_lo;
    c_ = std::move(out);
    trim_exact();
    return *this;
  }

  void trim_exact() {
    std::size_t first = 0;
    std::size_t last = c_.size();
    while (first < last && c_[first].is_zero()) ++first;
    while (last > first && c_[last - 1].is_zero()) --last;
    if (first == last) {
      c_.clear();
      lo_ = 0;
      return;
    }
    if (first > 0 || last < c_.size()) {
      c_ = std::vector<Scalar>(c_.begin() + static_cast<std::ptrdiff_t>(first),
                               c_.begin() + static_cast<std::ptrdiff_t>(last));
      lo_ += static_cast<int>(first);
    }
  }

  int lo_ = 0;
  std::vector<Scalar> c_;
};

template <class To, class From>
LaurentPoly<To> poly_cast(const LaurentPoly<From>& p) {
  std::vector<Complex<To>> c;
  c.reserve(p.width());
  for (const auto& x : p.coefficients()) c.push_back(complex_cast<To>(x));
  return LaurentPoly<To>(p.lo(), std::move(c));
}

// Horner over the shifted polynomial.  Throws DomainError at z = 0 when the
// polynomial has negative exponents.
template <class R>
Complex<R> poly_eval(const LaurentPoly<R>& p, const Complex<R>& z);

// sum_k |c_k| |z|^k: the scale against which evaluation residuals at z are judged.
template <class R>
R horner_scale(const LaurentPoly<R>& p, R z_abs);

template <class R>
class RationalFunction {
 public:
  RationalFunction(LaurentPoly<R> num, LaurentPoly<R> den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) throw MathError("rational function with zero denominator");
  }

  const LaurentPoly<R>& num() const { return num_; }
  const LaurentPoly<R>& den() const { return den_; }

  Complex<R> operator()(const Complex<R>& z) const { return poly_eval(num_, z) / poly_eval(den_, z); }

  friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
    return {a.num_ * b.num_, a.den_ * b.den_};
  }
  friend RationalFunction operator/(const RationalFunction& a, const RationalFunction& b) {
    if (b.num_.is_zero()) throw MathError("division by the zero rational function");
    return {a.num_ * b.den_, a.den_ * b.num_};
  }

 private:
  LaurentPoly<R> num_;
  LaurentPoly<R> den_;
};

// Dense matrix of Laurent polynomials.
template <class R>
class LaurentMatrix {
 public:
  LaurentMatrix() = default;
  LaurentMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), entries_(rows * cols) {}

  // sum_e t^e * coefficient_e, with all coefficient matrices the same shape.
  static LaurentMatrix from_terms(std::size_t rows, std::size_t cols,
                                  const std::vector<std::pair<int, CMatrix<R>>>& terms);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  LaurentPoly<R>& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
  const LaurentPoly<R>& operator()(std::size_t i, std::size_t j) const { return entries_[i * cols_ + j]; }

  CMatrix<R> evaluate(const Complex<R>& z) const;

  // Exponent window [lo, hi] guaranteed to contain every exponent of det;
  // nullopt when some row is identically zero.
  std::optional<std::pair<int, int>> det_window() const;

  // Smallest/largest exponent over all entries; nullopt when all zero.
  std::optional<std::pair<int, int>> entry_window() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<LaurentPoly<R>> entries_;
};

struct InterpolationOptions {
  // Coefficients below clamp_factor * m * eps * max|sample| are set to zero.
  // The default factor 1 reproduces the m * eps rule.
  double clamp_factor = 1.0;
};

// Determinant by sampling on the m-th roots of unity (m = width of the
// determinant window) and inverse discrete Fourier transform.
template <class R>
LaurentPoly<R> laurent_det(const LaurentMatrix<R>& m, InterpolationOptions options = {});

// Coefficients of the Laurent polynomial with exponents in [lo, lo + m) whose
// values at the m-th roots of unity are `samples`.
template <class R>
LaurentPoly<R> interpolate_unit_circle(int lo, std::span<const Complex<R>> samples, R clamp_threshold);

template <class R>
struct Deflation {
  LaurentPoly<R> quotient;
  int multiplicity = 0;
  // |remainder| / horner_scale of the first division that was rejected
  // (or of the last accepted one when the quotient became constant).
  R rejected_residual{0};
  R accepted_residual{0};
};

// Divides by (t - c) while the remainder is at most tol * horner_scale.
template <class R>
Deflation<R> deflate_at(const LaurentPoly<R>& p, const Complex<R>& c, R tol);

// True iff f = +-t^p g within relative tolerance.
template <class R>
bool compare_up_to_unit(const LaurentPoly<R>& f, const LaurentPoly<R>& g, R tol);

// Roots of an ordinary polynomial with coefficients c_0..c_d (Aberth-Ehrlich).
template <class R>
std::vector<Complex<R>> polynomial_roots(std::span<const Complex<R>> coefficients);

#define TWV_LAURENT_EXTERN(R)                                                                           \
  extern template LuDeterminant<R> lu_det<R>(CMatrix<R>);                                             \
  extern template CMatrix<R> inverse<R>(const CMatrix<R>&);                                           \
  extern template Complex<R> poly_eval<R>(const LaurentPoly<R>&, const Complex<R>&);                  \
  extern template R horner_scale<R>(const LaurentPoly<R>&, R);                                        \
  extern template class LaurentMatrix<R>;                                                             \
  extern template LaurentPoly<R> laurent_det<R>(const LaurentMatrix<R>&, InterpolationOptions);       \
  extern template LaurentPoly<R> interpolate_unit_circle<R>(int, std::span<const Complex<R>>, R);     \
  extern template Deflation<R> deflate_at<R>(const LaurentPoly<R>&, const Complex<R>&, R);            \
  extern template bool compare_up_to_unit<R>(const LaurentPoly<R>&, const LaurentPoly<R>&, R);        \
  extern template std::vector<Complex<R>> polynomial_roots<R>(std::span<const Complex<R>>);

TWV_LAURENT_EXTERN(double)
TWV_LAURENT_EXTERN(quad)
TWV_LAURENT_EXTERN(mp)
#undef TWV_LAURENT_EXTERN

}  // namespace twv
