#include "twv/volume_flow.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "twv/errors.hpp"
#include "twv/wada_engine.hpp"

namespace twv {

std::string to_string(Mode m) { return m == Mode::ratio ? "ratio" : "plain"; }

std::string to_string(Parity p) {
  switch (p) {
    case Parity::even: return "even";
    case Parity::odd: return "odd";
    case Parity::both: return "both";
  }
  return "?";
}

Mode parse_mode(const std::string& text) {
  if (text == "ratio") return Mode::ratio;
  if (text == "plain" || text == "tilde") return Mode::plain;
  throw InputError("unknown mode '" + text + "' (expected ratio or plain)");
}

Parity parse_parity(const std::string& text) {
  if (text == "even") return Parity::even;
  if (text == "odd") return Parity::odd;
  if (text == "both") return Parity::both;
  throw InputError("unknown parity '" + text + "' (expected even, odd or both)");
}

EvaluationPoint EvaluationPoint::parse(const std::string& text) {
  if (text == "1" || text == "+1") return plus_one();
  if (text == "-1") return minus_one();
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    char* end = nullptr;
    const long k = std::strtol(text.c_str(), &end, 10);
    const bool k_ok = end == text.c_str() + slash;
    const long m = std::strtol(text.c_str() + slash + 1, &end, 10);
    if (k_ok && *end == '\0' && slash + 1 < text.size() && m > 0) {
      long r = k % m;
      if (r < 0) r += m;
      return {r, m};
    }
  }
  throw InputError("evaluation point must be 1, -1 or k/m for exp(2 pi i k/m): '" + text + "'");
}

bool EvaluationPoint::is_plus_one() const { return k % m == 0; }
bool EvaluationPoint::is_minus_one() const { return 2 * (k % m) == m; }

std::string EvaluationPoint::label() const {
  if (is_plus_one()) return "1";
  if (is_minus_one()) return "-1";
  return std::to_string(k) + "/" + std::to_string(m);
}

namespace {

int round_up(int x, int step) { return (x + step - 1) / step * step; }

}  // namespace

PrecisionSpec PrecisionPolicy::automatic_for(int n) {
  // Rounding error in the n x n determinants grows like |mu|^{O(n)} for the
  // loxodromic generator: binary64 holds to n ~ 8, binary128 to n ~ 16 on the
  // built-in examples; beyond that about 6 bits per unit of n.
  if (n <= 5) return {Precision::f64, 0};
  if (n <= 12) return {Precision::dd, 0};
  return {Precision::mp, round_up(64 + 6 * n, 32)};
}

PrecisionSpec PrecisionPolicy::next(const PrecisionSpec& p, int n) {
  switch (p.kind) {
    case Precision::f64: return {Precision::dd, 0};
    case Precision::dd: return {Precision::mp, std::max(192, automatic_for(n).mp_bits)};
    case Precision::mp: return {Precision::mp, p.mp_bits + 64};
  }
  return p;
}

double estimator(int n, double modulus) {
  if (!(modulus > 0)) throw DomainError("estimator: modulus must be positive");
  return estimator_from_log(n, std::log(modulus));
}

double estimator_from_log(int n, double log_modulus) {
  if (n <= 0) throw DomainError("estimator: n must be positive");
  return 4 * 3.14159265358979323846 * log_modulus / (static_cast<double>(n) * n);
}

namespace {

// raw: Delta_n itself; a remaining zero is reported, not an error.
enum class Kind { ratio, plain, raw };

template <class R>
RationalFunction<R> conditioned_delta(const Example& ex, const SignAssignment& signs, int n,
                                      std::string* substitution) {
  const auto rho2 = to_sl2<R>(ex.holonomy);
  const auto cp = loxodromic_substitution(n, ex.presentation, ex.alpha, rho2, signs);
  if (substitution != nullptr && cp.source >= 0) {
    const auto& g = ex.presentation.generators();
    *substitution = g[static_cast<std::size_t>(cp.replaced)].name + " -> " +
                    g[static_cast<std::size_t>(cp.source)].name + "^-1 " +
                    cp.presentation.generators()[static_cast<std::size_t>(cp.replaced)].name;
  }
  return cp.invariant().rational();
}

template <class R>
Evaluation evaluate_at(const Example& ex, const SignAssignment& signs, int n, Kind kind, const EvaluationPoint& point,
                       double tol) {
  Evaluation ev;
  RationalFunction<R> f = conditioned_delta<R>(ex, signs, n, &ev.substitution);
  if (kind == Kind::ratio) {
    f = f / conditioned_delta<R>(ex, signs, n % 2 == 0 ? 2 : 3, nullptr);
  } else if (kind == Kind::plain && n % 2 == 1) {
    // prod_l (t^{a(l)} - 1)
    auto divisor = LaurentPoly<R>::constant(Complex<R>(R(1)));
    for (int a : ex.alpha.component_exponents()) {
      divisor *= LaurentPoly<R>::monomial(Complex<R>(R(1)), a) - LaurentPoly<R>::constant(Complex<R>(R(1)));
    }
    f = RationalFunction<R>(f.num(), f.den() * divisor);
  }
  const auto lv = limit_value(f, point.value<R>(), R(tol));
  ev.zero_order = lv.zero_order;
  ev.num_multiplicity = lv.num_multiplicity;
  ev.den_multiplicity = lv.den_multiplicity;
  ev.deflation_residual = to_double(lv.max_accepted_residual);
  if (lv.zero_order > 0 && kind == Kind::raw) {
    ev.modulus_log = -std::numeric_limits<double>::infinity();
    return ev;
  }
  if (lv.zero_order > 0) {
    const Mode mode = kind == Kind::ratio ? Mode::ratio : Mode::plain;
    std::ostringstream os;
    os << "zero of order " << lv.zero_order << " remains at t = " << point.label() << " after cancellation";
    if (point.is_plus_one()) {
      os << "; for " << (n % 2 == 0 ? "even" : "odd") << " n the " << to_string(mode)
         << " value at t = 1 must have zero order 0";
      throw ParityError(os.str());
    }
    throw MathError(os.str());
  }
  ev.modulus_log = to_double(log_abs(lv.value));
  return ev;
}

template <class F>
Evaluation run_at(const PrecisionSpec& p, F&& f) {
  Evaluation ev = with_precision(p, std::forward<F>(f));
  ev.precision = to_string(p);
  return ev;
}

// Outcome of one rung: a value or a mathematical failure.
struct Attempt {
  std::optional<Evaluation> value;
  std::string error;
  int error_kind = 0;  // distinguishes exception classes for agreement checks
};

bool agree(const Attempt& a, const Attempt& b) {
  if (a.value && b.value) {
    if (a.value->zero_order != b.value->zero_order) return false;
    if (a.value->zero_order > 0) return true;
    const double x = a.value->modulus_log;
    const double y = b.value->modulus_log;
    return std::fabs(x - y) <= 1e-9 * std::max(1.0, std::fabs(y));
  }
  return !a.value && !b.value && a.error_kind == b.error_kind;
}

[[noreturn]] void rethrow(const Attempt& a) {
  switch (a.error_kind) {
    case 1: throw PoleError(a.error);
    case 2: throw ParityError(a.error);
    case 3: throw PrecisionEscalation(a.error);
    default: throw MathError(a.error);
  }
}

Evaluation evaluate(const Example& ex, const SignAssignment& signs, int n, Kind kind, const EvaluationPoint& point,
                    const PrecisionPolicy& policy, double tol) {
  if (n < 1 || (kind == Kind::ratio && n < 2)) {
    throw InputError("dimension n=" + std::to_string(n) + " is too small for this mode");
  }
  if (signs.size() != ex.presentation.component_count()) {
    throw InputError("sign assignment '" + signs.to_string() + "' does not match " +
                     std::to_string(ex.presentation.component_count()) + " components");
  }
  auto attempt = [&](const PrecisionSpec& p) {
    Attempt a;
    try {
      a.value = run_at(p, [&]<class R>() { return evaluate_at<R>(ex, signs, n, kind, point, tol); });
    } catch (const PoleError& e) {
      a.error = e.what();
      a.error_kind = 1;
    } catch (const ParityError& e) {
      a.error = e.what();
      a.error_kind = 2;
    } catch (const PrecisionEscalation& e) {
      a.error = e.what();
      a.error_kind = 3;
    } catch (const MathError& e) {
      a.error = e.what();
      a.error_kind = 4;
    }
    return a;
  };
  constexpr int kMaxBits = 4096;
  if (policy.automatic) {
    PrecisionSpec p = PrecisionPolicy::automatic_for(n);
    Attempt low = attempt(p);
    for (;;) {
      const PrecisionSpec q = PrecisionPolicy::next(p, n);
      if (q.kind == Precision::mp && q.mp_bits > kMaxBits) break;
      Attempt high = attempt(q);
      if (agree(low, high) && high.error_kind != 3) {
        if (!high.value) rethrow(high);
        Evaluation ev = *high.value;
        if (ev.zero_order == 0) ev.certification_delta = std::fabs(low.value->modulus_log - ev.modulus_log);
        return ev;
      }
      // Disagreement: jump ahead rather than creep up 64 bits at a time.
      p = q.kind == Precision::mp ? PrecisionSpec{Precision::mp, q.mp_bits * 2} : q;
      low = p == q ? std::move(high) : attempt(p);
    }
    throw MathError("no two consecutive precision rungs agreed up to " + std::to_string(kMaxBits) + " bits");
  }
  PrecisionSpec p = policy.fixed;
  Attempt a = attempt(p);
  while (a.error_kind == 3) {
    p = PrecisionPolicy::next(p, n);
    if (p.kind == Precision::mp && p.mp_bits > kMaxBits) break;
    a = attempt(p);
  }
  if (!a.value) rethrow(a);
  if (policy.certify) {
    const Attempt check = attempt(PrecisionPolicy::next(p, n));
    if (!agree(a, check)) {
      std::ostringstream os;
      os << "precision check failed: " << to_string(p) << " gives log|value| " << a.value->modulus_log;
      if (check.value) {
        os << " but " << check.value->precision << " gives " << check.value->modulus_log;
      } else {
        os << " but the check run failed: " << check.error;
      }
      throw MathError(os.str());
    }
    if (a.value->zero_order == 0) {
      a.value->certification_delta = std::fabs(a.value->modulus_log - check.value->modulus_log);
    }
  }
  return *a.value;
}

}  // namespace

Evaluation corrected_ratio(const Example& ex, const SignAssignment& signs, int n, const EvaluationPoint& point,
                           const PrecisionPolicy& precision, double tol) {
  return evaluate(ex, signs, n, Kind::ratio, point, precision, tol);
}

Evaluation tilde_value(const Example& ex, const SignAssignment& signs, int n, const EvaluationPoint& point,
                       const PrecisionPolicy& precision, double tol) {
  return evaluate(ex, signs, n, Kind::plain, point, precision, tol);
}

Evaluation delta_limit(const Example& ex, const SignAssignment& signs, int n, const EvaluationPoint& point,
                       const PrecisionPolicy& precision, double tol) {
  return evaluate(ex, signs, n, Kind::raw, point, precision, tol);
}

std::vector<int> SeriesConfig::selected_n() const {
  std::vector<int> out;
  auto wanted = [&](int n) {
    return parity == Parity::both || (parity == Parity::even) == (n % 2 == 0);
  };
  if (!n_values.empty()) {
    for (int n : n_values) {
      if (wanted(n)) out.push_back(n);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }
  if (n_max < 4) throw InputError("n_max must be at least 4");
  if (n_min < 1 || n_min > n_max) throw InputError("n_min must lie in [1, n_max]");
  for (int n = n_min; n <= n_max; ++n) {
    if (wanted(n)) out.push_back(n);
  }
  return out;
}

std::vector<std::optional<double>> aitken(const std::vector<double>& x) {
  std::vector<std::optional<double>> out(x.size());
  for (std::size_t i = 2; i < x.size(); ++i) {
    const double a = x[i - 2];
    const double b = x[i - 1];
    const double c = x[i];
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) continue;
    const double second = c - 2 * b + a;
    if (second == 0) continue;
    out[i] = c - (c - b) * (c - b) / second;
  }
  return out;
}

EstimateTable run_series(const SeriesConfig& config, const Example& ex) {
  if (config.point.exploratory() && !config.exploratory) {
    throw InputError("evaluation at t = " + config.point.label() +
                     " is exploratory; enable it explicitly to evaluate at roots of unity other than +-1");
  }
  const SignAssignment signs =
      config.signs.size() > 0 ? config.signs : SignAssignment::all_plus(ex.presentation.component_count());
  if (signs.size() != ex.presentation.component_count()) {
    throw InputError("sign assignment '" + signs.to_string() + "' does not match " +
                     std::to_string(ex.presentation.component_count()) + " components");
  }
  EstimateTable table;
  table.example = ex.name;
  table.branch = ex.holonomy.branch;
  table.sign = signs.to_string();
  table.point = config.point.label();
  table.mode = config.mode;
  table.conjectural = config.point.exploratory();
  const std::vector<int> dims = config.selected_n();
  table.rows.resize(dims.size());
  auto compute = [&](std::size_t i) {
    VolumeEstimate& row = table.rows[i];
    const int n = dims[i];
    row.n = n;
    row.sign = table.sign;
    row.mode = config.mode;
    row.point = table.point;
    const auto start = std::chrono::steady_clock::now();
    try {
      const Evaluation ev =
          evaluate(ex, signs, n, config.mode == Mode::ratio ? Kind::ratio : Kind::plain, config.point,
                   config.precision, config.deflation_tol);
      row.diagnostics = ev;
      row.modulus_log = ev.modulus_log;
      row.estimator = estimator_from_log(n, ev.modulus_log);
      row.zero_order = ev.zero_order;
    } catch (const std::exception& e) {
      row.status = std::string("error: ") + e.what();
    }
    row.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  };
  std::size_t workers = config.threads > 0 ? static_cast<std::size_t>(config.threads)
                                           : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, dims.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < dims.size(); ++i) compute(i);
  } else {
    // Largest n first so the slow rows do not trail at the end.
    std::vector<std::size_t> order(dims.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = order.size() - 1 - i;
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < order.size(); k = next++) compute(order[k]);
      });
    }
    for (auto& t : pool) t.join();
  }
  if (config.accelerate) {
    table.accelerated.assign(table.rows.size(), std::nullopt);
    for (int parity = 0; parity < 2; ++parity) {
      std::vector<std::size_t> index;
      std::vector<double> values;
      for (std::size_t i = 0; i < table.rows.size(); ++i) {
        if (table.rows[i].n % 2 != parity) continue;
        index.push_back(i);
        values.push_back(table.rows[i].ok() ? table.rows[i].estimator : std::numeric_limits<double>::quiet_NaN());
      }
      const auto acc = aitken(values);
      for (std::size_t k = 0; k < index.size(); ++k) table.accelerated[index[k]] = acc[k];
    }
  }
  return table;
}

EstimateTable minus_one_series(SeriesConfig config, const Example& ex) {
  config.point = EvaluationPoint::minus_one();
  return run_series(config, ex);
}

}  // namespace twv
