#pragma once

// Independent oracles and random generators shared by the test binaries.
// Nothing here calls the library routine it is used to check.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "twv/cli_io.hpp"
#include "twv/group_words.hpp"
#include "twv/laurent_linalg.hpp"
#include "twv/representations.hpp"
#include "twv/volume_flow.hpp"
#include "twv/wada_engine.hpp"

namespace twv::test {

using cd = std::complex<double>;

inline cd to_std(const cdouble& z) { return {z.re, z.im}; }
inline cdouble from_std(const cd& z) { return {z.real(), z.imag()}; }

// ---------------------------------------------------------------------------
// Cofactor expansion along the first row.

inline cd cofactor_det(const std::vector<std::vector<cd>>& m) {
  const std::size_t n = m.size();
  if (n == 0) return 1.0;
  if (n == 1) return m[0][0];
  cd sum = 0;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::vector<cd>> minor;
    for (std::size_t i = 1; i < n; ++i) {
      std::vector<cd> row;
      for (std::size_t k = 0; k < n; ++k) {
        if (k != j) row.push_back(m[i][k]);
      }
      minor.push_back(row);
    }
    sum += (j % 2 == 0 ? 1.0 : -1.0) * m[0][j] * cofactor_det(minor);
  }
  return sum;
}

inline cd cofactor_det(const CMatrix<double>& a) {
  std::vector<std::vector<cd>> m(a.rows(), std::vector<cd>(a.cols()));
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) m[i][j] = to_std(a(i, j));
  }
  return cofactor_det(m);
}

// Laurent polynomials as exponent -> coefficient maps, multiplied term by term.
using TermMap = std::map<int, cd>;

inline TermMap terms_of(const LaurentPoly<double>& p) {
  TermMap out;
  for (int e = p.lo(); !p.is_zero() && e <= p.hi(); ++e) {
    if (!p.coeff(e).is_zero()) out[e] = to_std(p.coeff(e));
  }
  return out;
}

inline TermMap term_product(const TermMap& a, const TermMap& b) {
  TermMap out;
  for (const auto& [ea, ca] : a) {
    for (const auto& [eb, cb] : b) out[ea + eb] += ca * cb;
  }
  return out;
}

inline TermMap cofactor_det(const std::vector<std::vector<TermMap>>& m) {
  const std::size_t n = m.size();
  if (n == 1) return m[0][0];
  TermMap sum;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<std::vector<TermMap>> minor;
    for (std::size_t i = 1; i < n; ++i) {
      std::vector<TermMap> row;
      for (std::size_t k = 0; k < n; ++k) {
        if (k != j) row.push_back(m[i][k]);
      }
      minor.push_back(row);
    }
    const double sign = j % 2 == 0 ? 1.0 : -1.0;
    for (const auto& [e, c] : term_product(m[0][j], cofactor_det(minor))) sum[e] += sign * c;
  }
  return sum;
}

inline TermMap cofactor_det(const LaurentMatrix<double>& a) {
  std::vector<std::vector<TermMap>> m(a.rows(), std::vector<TermMap>(a.cols()));
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) m[i][j] = terms_of(a(i, j));
  }
  return cofactor_det(m);
}

// max_e |p_e - q_e| / max_e |q_e|
inline double relative_gap(const LaurentPoly<double>& p, const TermMap& q) {
  TermMap diff = terms_of(p);
  double scale = 0;
  for (const auto& [e, c] : q) {
    diff[e] -= c;
    scale = std::max(scale, std::abs(c));
  }
  double gap = 0;
  for (const auto& [e, c] : diff) gap = std::max(gap, std::abs(c));
  return scale == 0 ? gap : gap / scale;
}

inline cd naive_eval(const TermMap& p, cd z) {
  cd s = 0;
  for (const auto& [e, c] : p) s += c * std::pow(z, e);
  return s;
}

// ---------------------------------------------------------------------------
// Free derivative straight from the closed formula
//   d w / d x = sum_{k: w_k = x} w_1..w_{k-1}  -  sum_{k: w_k = x^-1} w_1..w_k.

inline GroupRingElement brute_fox(const Word& w, int generator) {
  GroupRingElement out;
  const auto& letters = w.letters();
  for (std::size_t k = 0; k < letters.size(); ++k) {
    if (letters[k].generator != generator) continue;
    if (letters[k].sign > 0) {
      out.add_term(Word(std::vector<Letter>(letters.begin(), letters.begin() + static_cast<std::ptrdiff_t>(k))), 1);
    } else {
      out.add_term(Word(std::vector<Letter>(letters.begin(), letters.begin() + static_cast<std::ptrdiff_t>(k + 1))),
                   -1);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// sigma_n by expanding products of linear forms in x, y one factor at a time.
// The basis vector x^{n-1-j} y^j is sent to (d x - b y)^{n-1-j} (-c x + a y)^j.

inline std::vector<std::vector<cd>> naive_sym_power(int n, cd a, cd b, cd c, cd d) {
  if (n == 2) return {{a, b}, {c, d}};  // standard action; the rule below gives the conjugate A^{-T}
  std::vector<std::vector<cd>> m(static_cast<std::size_t>(n), std::vector<cd>(static_cast<std::size_t>(n)));
  for (int j = 0; j < n; ++j) {
    // poly[k] = coefficient of x^{deg-k} y^k
    std::vector<cd> poly{1.0};
    auto times = [&](cd px, cd py) {
      std::vector<cd> out(poly.size() + 1);
      for (std::size_t k = 0; k < poly.size(); ++k) {
        out[k] += poly[k] * px;
        out[k + 1] += poly[k] * py;
      }
      poly = out;
    };
    for (int k = 0; k < n - 1 - j; ++k) times(d, -b);
    for (int k = 0; k < j; ++k) times(-c, a);
    for (int i = 0; i < n; ++i) m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = poly[static_cast<std::size_t>(i)];
  }
  return m;
}

// ---------------------------------------------------------------------------
// Random data

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  cdouble complex(double r = 1.0) { return {uniform(-r, r), uniform(-r, r)}; }
  bool coin() { return uniform_int(0, 1) == 1; }

  Word word(int generators, int max_len) {
    std::vector<Letter> letters;
    const int len = uniform_int(0, max_len);
    for (int k = 0; k < len; ++k) letters.push_back({uniform_int(0, generators - 1), coin() ? 1 : -1});
    return Word(letters);
  }

  // Unreduced letter sequences exercise free_reduce itself.
  std::vector<Letter> letters(int generators, int max_len) {
    std::vector<Letter> out;
    const int len = uniform_int(0, max_len);
    for (int k = 0; k < len; ++k) out.push_back({uniform_int(0, generators - 1), coin() ? 1 : -1});
    return out;
  }

  // det = 1 by rescaling a random matrix with det away from 0.
  CMatrix<double> unimodular(double r = 1.0) {
    for (;;) {
      CMatrix<double> m(2, 2);
      for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) m(i, j) = complex(r);
      }
      const cd det = to_std(m(0, 0)) * to_std(m(1, 1)) - to_std(m(0, 1)) * to_std(m(1, 0));
      if (std::abs(det) < 0.1) continue;
      const cdouble s = from_std(1.0 / std::sqrt(det));
      for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) m(i, j) = m(i, j) * s;
      }
      return m;
    }
  }

  LaurentPoly<double> poly(int lo, int hi, double r = 1.0) {
    std::vector<cdouble> c;
    for (int e = lo; e <= hi; ++e) c.push_back(complex(r));
    return LaurentPoly<double>(lo, c);
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

// ---------------------------------------------------------------------------
// Fixtures

inline Example figure8(int branch = 0) { return to_example(fixture("figure8"), branch); }
inline Example whitehead(int branch = 0) { return to_example(fixture("whitehead"), branch); }

inline LaurentPoly<double> poly_from(int lo, std::vector<cd> c) {
  std::vector<cdouble> out;
  for (const auto& z : c) out.push_back(from_std(z));
  return LaurentPoly<double>(lo, out);
}

// Wada invariant on a fixture at the precision R (quad or mp need an active scope for mp).
template <class R = double>
WadaInvariant<R> invariant(const Example& ex, int n, const std::string& signs,
                           std::optional<int> column = std::nullopt) {
  const auto rho2 = to_sl2<R>(ex.holonomy);
  const auto rho = lift_rep<R>(n, ex.presentation, rho2, SignAssignment::parse(signs));
  return wada_invariant<R>(ex.presentation, rho, ex.alpha, column);
}

}  // namespace twv::test
