#pragma once

// Corrected ratios A_n = Delta_n / Delta_{2 or 3}, plain values at t = +-1,
// the volume estimator 4 pi log|.| / n^2, and series over n.

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "twv/group_words.hpp"
#include "twv/representations.hpp"
#include "twv/scalar.hpp"

namespace twv {

struct Example {
  std::string name;
  Presentation presentation;
  AlphaMap alpha;
  Holonomy holonomy;
};

// ratio: A_n = Delta_n / Delta_2 (n even) or Delta_n / Delta_3 (n odd).
// plain: Delta_n for even n, Delta_n / prod_l (t^{a(l)} - 1) for odd n.
enum class Mode { ratio, plain };
enum class Parity { even, odd, both };

std::string to_string(Mode m);
std::string to_string(Parity p);
Mode parse_mode(const std::string& text);
Parity parse_parity(const std::string& text);

// t = exp(2 pi i k / m).
struct EvaluationPoint {
  long k = 0;
  long m = 1;

  static EvaluationPoint plus_one() { return {0, 1}; }
  static EvaluationPoint minus_one() { return {1, 2}; }
  // "1", "-1", or "k/m" for exp(2 pi i k/m).
  static EvaluationPoint parse(const std::string& text);

  bool is_plus_one() const;
  bool is_minus_one() const;
  bool exploratory() const { return !is_plus_one() && !is_minus_one(); }
  std::string label() const;

  template <class R>
  Complex<R> value() const {
    return unit_root<R>(k, m);
  }
};

struct PrecisionPolicy {
  // automatic: start at automatic_for(n) and recompute one rung higher until
  // two consecutive rungs agree.  Otherwise run at `fixed`, escalating only
  // on an ambiguous deflation, and recompute once if `certify` is set.
  bool automatic = true;
  PrecisionSpec fixed;
  bool certify = false;

  static PrecisionSpec automatic_for(int n);
  static PrecisionSpec next(const PrecisionSpec& p, int n);
};

struct Evaluation {
  double modulus_log = std::numeric_limits<double>::quiet_NaN();
  int zero_order = 0;
  int num_multiplicity = 0;
  int den_multiplicity = 0;
  double deflation_residual = 0;
  std::string precision;
  std::optional<double> certification_delta;  // |log difference| to the check run
  std::string substitution;                   // Nielsen move used, empty if none
};

// Limit at `point` of A_n(t), with A_n formed as a rational function before
// any limit is taken.  Throws PoleError, ParityError (t = 1 only) or
// MathError when the value vanishes.
Evaluation corrected_ratio(const Example& ex, const SignAssignment& signs, int n, const EvaluationPoint& point,
                           const PrecisionPolicy& precision = {}, double tol = 1e-8);

Evaluation tilde_value(const Example& ex, const SignAssignment& signs, int n, const EvaluationPoint& point,
                       const PrecisionPolicy& precision = {}, double tol = 1e-8);

// Limit of Delta_n itself at `point` (no correction); a remaining zero gives
// modulus_log = -inf with the order in zero_order.
Evaluation delta_limit(const Example& ex, const SignAssignment& signs, int n, const EvaluationPoint& point,
                       const PrecisionPolicy& precision = {}, double tol = 1e-8);

// 4 pi ln(modulus) / n^2.  Throws DomainError for modulus <= 0.
double estimator(int n, double modulus);
double estimator_from_log(int n, double log_modulus);

struct SeriesConfig {
  int n_min = 4;
  int n_max = 20;
  std::vector<int> n_values;  // overrides [n_min, n_max] when non-empty
  Parity parity = Parity::both;
  EvaluationPoint point;
  bool exploratory = false;  // must be set for points other than +-1
  SignAssignment signs;      // empty: all +
  Mode mode = Mode::ratio;
  PrecisionPolicy precision;
  double deflation_tol = 1e-8;
  bool accelerate = false;
  int threads = 0;  // rows evaluated concurrently; 0: hardware concurrency

  std::vector<int> selected_n() const;
};

struct VolumeEstimate {
  int n = 0;
  std::string sign;
  Mode mode = Mode::ratio;
  std::string point;
  double modulus_log = std::numeric_limits<double>::quiet_NaN();
  double estimator = std::numeric_limits<double>::quiet_NaN();
  int zero_order = 0;
  double runtime_ms = 0;
  Evaluation diagnostics;
  std::string status = "ok";  // "ok" or "error: ..."

  bool ok() const { return status == "ok"; }
};

inline constexpr const char* kExtrapolatedLabel = "extrapolated (Aitken delta^2, not a computed value)";
inline constexpr const char* kConjecturalBanner =
    "conjectural: evaluation at a root of unity other than +-1; no convergence theorem covers this point";

struct EstimateTable {
  std::string example;
  std::string branch;
  std::string sign;
  std::string point;
  Mode mode = Mode::ratio;
  bool conjectural = false;
  std::vector<VolumeEstimate> rows;          // sorted by n
  std::vector<std::optional<double>> accelerated;  // aligned with rows when requested
};

// Aitken delta^2 over successive entries; the first two entries and any
// window containing a non-finite value or a zero second difference are empty.
std::vector<std::optional<double>> aitken(const std::vector<double>& values);

// Per-row failures are recorded in the row status; the series continues.
// Rows run concurrently; the table is identical to a serial run apart from
// runtime_ms.
EstimateTable run_series(const SeriesConfig& config, const Example& ex);

// run_series at t = -1.  Zero orders there are reported, never checked
// against the parity rule.
EstimateTable minus_one_series(SeriesConfig config, const Example& ex);

}  // namespace twv
