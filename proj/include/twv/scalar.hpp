#pragma once

// Real and complex scalars used throughout the numeric core.
//
// Three real backends: IEEE binary64 (`double`), GCC binary128 (`quad`) and
// MPFR floats (`mp`) whose mantissa width is chosen at run time with
// MpPrecisionScope.  All numeric templates are instantiated for each.

#include <quadmath.h>

#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <utility>

namespace twv {

using quad = __float128;
// Expression templates off so that `auto` locals hold values.
using mp = boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                         boost::multiprecision::et_off>;

// f64 = binary64, dd = binary128, mp = MPFR with an explicit bit count.
enum class Precision { f64, dd, mp };

struct PrecisionSpec {
  Precision kind = Precision::f64;
  int mp_bits = 0;  // only for Precision::mp
  friend bool operator==(const PrecisionSpec&, const PrecisionSpec&) = default;
};

std::string to_string(Precision p);
std::string to_string(const PrecisionSpec& p);
// "f64", "dd", or "mp<bits>" such as "mp256".
PrecisionSpec parse_precision(const std::string& text);

// Sets the working precision of newly created `mp` values and restores the
// previous one on destruction.  Boost keeps that precision in one process-wide
// variable, so a scope holds a process-wide recursive lock for its lifetime:
// mp work on different threads is serialized, nesting on one thread is fine.
class MpPrecisionScope {
 public:
  explicit MpPrecisionScope(int bits);
  ~MpPrecisionScope();
  MpPrecisionScope(const MpPrecisionScope&) = delete;
  MpPrecisionScope& operator=(const MpPrecisionScope&) = delete;

  static int current_bits();

 private:
  std::unique_lock<std::recursive_mutex> lock_;
  unsigned saved_digits10_;
};

// Calls f.template operator()<R>() with R the backend named by `p`, inside
// an MpPrecisionScope for mp.  Every instantiation must return the same type.
template <class F>
decltype(auto) with_precision(const PrecisionSpec& p, F&& f);

template <class R>
struct RealOps;

template <>
struct RealOps<double> {
  static constexpr Precision precision = Precision::f64;
  static double epsilon() { return std::numeric_limits<double>::epsilon(); }
  static double pi() { return 3.14159265358979323846; }
  static double infinity() { return std::numeric_limits<double>::infinity(); }
  static double sqrt(double x) { return std::sqrt(x); }
  static double log(double x) { return std::log(x); }
  static double exp(double x) { return std::exp(x); }
  static double cos(double x) { return std::cos(x); }
  static double sin(double x) { return std::sin(x); }
  static double abs(double x) { return std::fabs(x); }
  static bool isfinite(double x) { return std::isfinite(x); }
  static double parse(const std::string& text);
  static std::string format(double x, int digits);
};

template <>
struct RealOps<quad> {
  static constexpr Precision precision = Precision::dd;
  static quad epsilon() { return ldexpq(quad(1), -112); }
  static quad pi() { return acosq(quad(-1)); }
  static quad infinity() { return HUGE_VALQ; }
  static quad sqrt(quad x) { return sqrtq(x); }
  static quad log(quad x) { return logq(x); }
  static quad exp(quad x) { return expq(x); }
  static quad cos(quad x) { return cosq(x); }
  static quad sin(quad x) { return sinq(x); }
  static quad abs(quad x) { return fabsq(x); }
  static bool isfinite(quad x) { return finiteq(x) != 0; }
  static quad parse(const std::string& text);
  static std::string format(quad x, int digits);
};

template <>
struct RealOps<mp> {
  static constexpr Precision precision = Precision::mp;
  static mp epsilon() { return std::numeric_limits<mp>::epsilon(); }
  static mp pi() { return boost::multiprecision::acos(mp(-1)); }
  static mp infinity() { return std::numeric_limits<mp>::infinity(); }
  static mp sqrt(const mp& x) { return boost::multiprecision::sqrt(x); }
  static mp log(const mp& x) { return boost::multiprecision::log(x); }
  static mp exp(const mp& x) { return boost::multiprecision::exp(x); }
  static mp cos(const mp& x) { return boost::multiprecision::cos(x); }
  static mp sin(const mp& x) { return boost::multiprecision::sin(x); }
  static mp abs(const mp& x) { return boost::multiprecision::abs(x); }
  static bool isfinite(const mp& x) { return boost::multiprecision::isfinite(x); }
  static mp parse(const std::string& text);
  static std::string format(const mp& x, int digits);
};

template <class R>
struct Complex {
  R re{0};
  R im{0};

  constexpr Complex() = default;
  constexpr Complex(R r) : re(r), im(0) {}  // NOLINT(google-explicit-constructor)
  constexpr Complex(R r, R i) : re(r), im(i) {}

  Complex& operator+=(const Complex& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  Complex& operator-=(const Complex& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  Complex& operator*=(const Complex& o) {
    const R r = re * o.re - im * o.im;
    im = re * o.im + im * o.re;
    re = r;
    return *this;
  }
  // Smith's algorithm.
  Complex& operator/=(const Complex& o) {
    using Ops = RealOps<R>;
    if (Ops::abs(o.re) >= Ops::abs(o.im)) {
      const R ratio = o.im / o.re;
      const R denom = o.re + o.im * ratio;
      const R r = (re + im * ratio) / denom;
      im = (im - re * ratio) / denom;
      re = r;
    } else {
      const R ratio = o.re / o.im;
      const R denom = o.re * ratio + o.im;
      const R r = (re * ratio + im) / denom;
      im = (im * ratio - re) / denom;
      re = r;
    }
    return *this;
  }

  friend Complex operator+(Complex a, const Complex& b) { return a += b; }
  friend Complex operator-(Complex a, const Complex& b) { return a -= b; }
  friend Complex operator*(Complex a, const Complex& b) { return a *= b; }
  friend Complex operator/(Complex a, const Complex& b) { return a /= b; }
  friend Complex operator-(const Complex& a) { return {-a.re, -a.im}; }
  friend bool operator==(const Complex& a, const Complex& b) { return a.re == b.re && a.im == b.im; }

  bool is_zero() const { return re == R(0) && im == R(0); }
};

using cdouble = Complex<double>;
using cquad = Complex<quad>;
using cmp = Complex<mp>;

template <class R>
Complex<R> conj(const Complex<R>& z) {
  return {z.re, -z.im};
}

template <class R>
R norm(const Complex<R>& z) {
  return z.re * z.re + z.im * z.im;
}

template <class R>
R abs(const Complex<R>& z) {
  using Ops = RealOps<R>;
  R a = Ops::abs(z.re);
  R b = Ops::abs(z.im);
  if (a < b) std::swap(a, b);
  if (a == R(0)) return R(0);
  const R q = b / a;
  return a * Ops::sqrt(R(1) + q * q);
}

// log|z| without squaring the components.
template <class R>
R log_abs(const Complex<R>& z) {
  return RealOps<R>::log(abs(z));
}

template <class R>
Complex<R> polar(R modulus, R angle) {
  return {modulus * RealOps<R>::cos(angle), modulus * RealOps<R>::sin(angle)};
}

// exp(2 pi i k / m), reduced so that the angle lies in [0, 2pi).
template <class R>
Complex<R> unit_root(long k, long m) {
  long r = k % m;
  if (r < 0) r += m;
  if (r == 0) return {R(1), R(0)};
  if (2 * r == m) return {R(-1), R(0)};
  if (4 * r == m) return {R(0), R(1)};
  if (4 * r == 3 * m) return {R(0), R(-1)};
  const R angle = R(2) * RealOps<R>::pi() * R(r) / R(m);
  return polar(R(1), angle);
}

// Fused kernels for the hot loops: x += a b, x -= a b, x = x z + c.  The
// generic versions are plain arithmetic; the mp overloads work in place on
// the MPFR limbs instead of allocating temporaries.
template <class R>
void add_product(Complex<R>& x, const Complex<R>& a, const Complex<R>& b) {
  x += a * b;
}
template <class R>
void sub_product(Complex<R>& x, const Complex<R>& a, const Complex<R>& b) {
  x -= a * b;
}
template <class R>
void horner_step(Complex<R>& x, const Complex<R>& z, const Complex<R>& c) {
  x = x * z + c;
}
void add_product(cmp& x, const cmp& a, const cmp& b);
void sub_product(cmp& x, const cmp& a, const cmp& b);
void horner_step(cmp& x, const cmp& z, const cmp& c);

template <class To, class From>
Complex<To> complex_cast(const Complex<From>& z) {
  return {static_cast<To>(z.re), static_cast<To>(z.im)};
}

template <class R>
double to_double(const R& x) {
  return static_cast<double>(x);
}

template <class F>
decltype(auto) with_precision(const PrecisionSpec& p, F&& f) {
  switch (p.kind) {
    case Precision::dd:
      return f.template operator()<quad>();
    case Precision::mp: {
      MpPrecisionScope scope(p.mp_bits);
      return f.template operator()<mp>();
    }
    case Precision::f64:
      break;
  }
  return f.template operator()<double>();
}

}  // namespace twv
