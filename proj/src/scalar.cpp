#include "twv/scalar.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "twv/errors.hpp"

namespace twv {

std::string to_string(Precision p) {
  switch (p) {
    case Precision::f64: return "f64";
    case Precision::dd: return "dd";
    case Precision::mp: return "mp";
  }
  return "?";
}

std::string to_string(const PrecisionSpec& p) {
  return p.kind == Precision::mp ? "mp" + std::to_string(p.mp_bits) : to_string(p.kind);
}

PrecisionSpec parse_precision(const std::string& text) {
  if (text == "f64") return {Precision::f64, 0};
  if (text == "dd") return {Precision::dd, 0};
  if (text.size() > 2 && text.compare(0, 2, "mp") == 0) {
    const std::string digits = text.substr(2);
    if (digits.size() <= 6 && std::all_of(digits.begin(), digits.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      const int bits = std::stoi(digits);
      if (bits >= 64 && bits <= 100000) return {Precision::mp, bits};
    }
  }
  throw InputError("unknown precision '" + text + "' (expected f64, dd or mp<bits> with bits >= 64)");
}

namespace {

unsigned bits_to_digits10(int bits) {
  // Boost converts back with digits10 * log2(10) rounded up, so this never
  // loses bits.
  return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1;
}

}  // namespace

namespace {

std::recursive_mutex& mp_precision_mutex() {
  static std::recursive_mutex m;
  return m;
}

int checked_bits(int bits) {
  if (bits < 16) throw InputError("mp precision must be at least 16 bits");
  return bits;
}

}  // namespace

MpPrecisionScope::MpPrecisionScope(int bits)
    : lock_((checked_bits(bits), mp_precision_mutex())), saved_digits10_(mp::default_precision()) {
  mp::default_precision(bits_to_digits10(bits));
}

MpPrecisionScope::~MpPrecisionScope() { mp::default_precision(saved_digits10_); }

int MpPrecisionScope::current_bits() {
  return static_cast<int>(mpfr_get_prec(mp(1).backend().data()));
}

namespace {

void check_number_text(const std::string& text, const char* end, const char* begin) {
  if (text.empty() || end == begin) throw InputError("not a decimal number: '" + text + "'");
  while (*end != '\0' && std::isspace(static_cast<unsigned char>(*end))) ++end;
  if (*end != '\0') throw InputError("trailing characters in number: '" + text + "'");
}

}  // namespace

double RealOps<double>::parse(const std::string& text) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  check_number_text(text, end, text.c_str());
  return v;
}

std::string RealOps<double>::format(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

quad RealOps<quad>::parse(const std::string& text) {
  char* end = nullptr;
  const quad v = strtoflt128(text.c_str(), &end);
  check_number_text(text, end, text.c_str());
  return v;
}

std::string RealOps<quad>::format(quad x, int digits) {
  char buf[96];
  quadmath_snprintf(buf, sizeof buf, "%.*Qg", digits, x);
  return buf;
}

namespace {

// Scratch registers sized to the precision of the destination.
struct MpScratch {
  mpfr_t re, im;
  MpScratch() {
    mpfr_init2(re, 64);
    mpfr_init2(im, 64);
  }
  ~MpScratch() {
    mpfr_clear(re);
    mpfr_clear(im);
  }
  void fit(mpfr_prec_t prec) {
    if (mpfr_get_prec(re) != prec) {
      mpfr_set_prec(re, prec);
      mpfr_set_prec(im, prec);
    }
  }
};

MpScratch& scratch(const mp& like) {
  thread_local MpScratch s;
  s.fit(mpfr_get_prec(like.backend().data()));
  return s;
}

mpfr_ptr raw(mp& x) { return x.backend().data(); }
mpfr_srcptr raw(const mp& x) { return x.backend().data(); }

}  // namespace

void add_product(cmp& x, const cmp& a, const cmp& b) {
  auto& s = scratch(x.re);
  mpfr_fmms(s.re, raw(a.re), raw(b.re), raw(a.im), raw(b.im), MPFR_RNDN);
  mpfr_fmma(s.im, raw(a.re), raw(b.im), raw(a.im), raw(b.re), MPFR_RNDN);
  mpfr_add(raw(x.re), raw(x.re), s.re, MPFR_RNDN);
  mpfr_add(raw(x.im), raw(x.im), s.im, MPFR_RNDN);
}

void sub_product(cmp& x, const cmp& a, const cmp& b) {
  auto& s = scratch(x.re);
  mpfr_fmms(s.re, raw(a.re), raw(b.re), raw(a.im), raw(b.im), MPFR_RNDN);
  mpfr_fmma(s.im, raw(a.re), raw(b.im), raw(a.im), raw(b.re), MPFR_RNDN);
  mpfr_sub(raw(x.re), raw(x.re), s.re, MPFR_RNDN);
  mpfr_sub(raw(x.im), raw(x.im), s.im, MPFR_RNDN);
}

void horner_step(cmp& x, const cmp& z, const cmp& c) {
  auto& s = scratch(x.re);
  mpfr_fmms(s.re, raw(x.re), raw(z.re), raw(x.im), raw(z.im), MPFR_RNDN);
  mpfr_fmma(s.im, raw(x.re), raw(z.im), raw(x.im), raw(z.re), MPFR_RNDN);
  mpfr_add(raw(x.re), s.re, raw(c.re), MPFR_RNDN);
  mpfr_add(raw(x.im), s.im, raw(c.im), MPFR_RNDN);
}

mp RealOps<mp>::parse(const std::string& text) {
  // Validate with the binary64 parser's grammar, then read at full precision.
  char* end = nullptr;
  (void)std::strtod(text.c_str(), &end);
  check_number_text(text, end, text.c_str());
  std::string trimmed(text.c_str(), static_cast<const char*>(end));
  const auto first = trimmed.find_first_not_of(" \t\n\r");
  return mp(first == std::string::npos ? trimmed : trimmed.substr(first));
}

std::string RealOps<mp>::format(const mp& x, int digits) { return x.str(digits, std::ios_base::fmtflags{}); }

}  // namespace twv
