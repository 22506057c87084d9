#include <doctest.h>

#include "support.hpp"

using namespace twv;

namespace {

const SignAssignment kPlus = SignAssignment::parse("+");

double est(const Evaluation& e, int n) { return estimator_from_log(n, e.modulus_log); }

PrecisionPolicy fixed(const char* p) {
  PrecisionPolicy out;
  out.automatic = false;
  out.fixed = parse_precision(p);
  return out;
}

}  // namespace

TEST_SUITE("volume_flow") {
  TEST_CASE("estimator") {
    CHECK(estimator(4, 2) == doctest::Approx(0.544397).epsilon(1e-6));
    CHECK(estimator(7, 1) == 0);
    CHECK(estimator(5, 28.0 / 3) == doctest::Approx(1.12273).epsilon(1e-5));
    CHECK_THROWS_AS(estimator(4, 0), DomainError);
    CHECK_THROWS_AS(estimator(4, -1), DomainError);
    CHECK(estimator_from_log(4, std::log(2.0)) == doctest::Approx(estimator(4, 2)));
  }

  TEST_CASE("corrected ratio closed forms") {
    const Example f = test::figure8();
    const auto r4 = corrected_ratio(f, kPlus, 4, EvaluationPoint::plus_one());
    CHECK(std::exp(r4.modulus_log) == doctest::Approx(2).epsilon(1e-10));
    CHECK(est(r4, 4) == doctest::Approx(0.544397).epsilon(1e-6));
    const auto r5 = corrected_ratio(f, kPlus, 5, EvaluationPoint::plus_one());
    CHECK(std::exp(r5.modulus_log) == doctest::Approx(28.0 / 3).epsilon(1e-10));
    CHECK(est(r5, 5) == doctest::Approx(1.12273).epsilon(1e-5));
    const auto r2 = corrected_ratio(f, kPlus, 2, EvaluationPoint::plus_one());
    CHECK(std::abs(r2.modulus_log) < 1e-12);
  }

  TEST_CASE("plain values") {
    const Example f = test::figure8();
    CHECK(est(tilde_value(f, kPlus, 15, EvaluationPoint::plus_one()), 15) == doctest::Approx(1.99496).epsilon(1e-5));
    CHECK(est(tilde_value(f, kPlus, 20, EvaluationPoint::plus_one()), 20) == doctest::Approx(1.99298).epsilon(1e-5));
    const Example wh = test::whitehead();
    CHECK(est(tilde_value(wh, SignAssignment::parse("++"), 10, EvaluationPoint::plus_one()), 10) ==
          doctest::Approx(3.56149).epsilon(1e-5));
    // Odd n: Delta_3 / (t - 1) at 1 is 3 for the figure-eight knot.
    const auto t3 = tilde_value(f, kPlus, 3, EvaluationPoint::plus_one());
    CHECK(std::exp(t3.modulus_log) == doctest::Approx(3).epsilon(1e-10));
    CHECK(t3.zero_order == 0);
  }

  TEST_CASE("table rows") {
    const Example f = test::figure8();
    const auto minus = SignAssignment::parse("-");
    CHECK(est(tilde_value(f, minus, 16, EvaluationPoint::plus_one()), 16) == doctest::Approx(2.07177).epsilon(1e-5));
    const Example wh = test::whitehead();
    const auto mm = SignAssignment::parse("--");
    CHECK(est(corrected_ratio(wh, mm, 10, EvaluationPoint::plus_one()), 10) == doctest::Approx(3.45010).epsilon(1e-5));
    CHECK(est(tilde_value(wh, mm, 10, EvaluationPoint::plus_one()), 10) == doctest::Approx(3.78300).epsilon(1e-5));
  }

  TEST_CASE("t = -1") {
    const Example f = test::figure8();
    const auto d2 = delta_limit(f, kPlus, 2, EvaluationPoint::minus_one());
    CHECK(std::exp(d2.modulus_log) == doctest::Approx(6).epsilon(1e-10));
    const auto r4 = corrected_ratio(f, kPlus, 4, EvaluationPoint::minus_one());
    CHECK(std::exp(r4.modulus_log) == doctest::Approx(6).epsilon(1e-10));
    SeriesConfig cfg;
    cfg.n_min = 4;
    cfg.n_max = 10;
    const auto table = minus_one_series(cfg, f);
    CHECK(table.point == "-1");
    CHECK(table.rows.size() == 7);
    for (const auto& r : table.rows) {
      CHECK(r.ok());
      CHECK(std::isfinite(r.estimator));
    }
  }

  TEST_CASE("delta_limit keeps the zero") {
    const Example f = test::figure8();
    const auto d3 = delta_limit(f, kPlus, 3, EvaluationPoint::plus_one());
    CHECK(d3.zero_order == 1);
    CHECK(std::isinf(d3.modulus_log));
    CHECK(d3.modulus_log < 0);
  }

  TEST_CASE("ratio mode has no zero at t = 1 for either parity") {
    for (const auto& ex : {test::figure8(), test::whitehead()}) {
      const std::string s(static_cast<std::size_t>(ex.presentation.component_count()), '+');
      for (int n = 4; n <= 9; ++n) {
        const auto r = corrected_ratio(ex, SignAssignment::parse(s), n, EvaluationPoint::plus_one());
        CHECK(r.zero_order == 0);
        CHECK(std::isfinite(r.modulus_log));
      }
    }
  }

  TEST_CASE("branch independence") {
    for (const char* name : {"figure8", "whitehead"}) {
      const InputDocument doc = fixture(name);
      const Example a = to_example(doc, 0);
      const Example b = to_example(doc, 1);
      const std::string s(static_cast<std::size_t>(a.presentation.component_count()), '+');
      for (int n : {6, 7, 12}) {
        const auto x = corrected_ratio(a, SignAssignment::parse(s), n, EvaluationPoint::plus_one());
        const auto y = corrected_ratio(b, SignAssignment::parse(s), n, EvaluationPoint::plus_one());
        CHECK(std::abs(est(x, n) - est(y, n)) < 1e-9);
      }
    }
  }

  TEST_CASE("unit factors do not change the modulus on the unit circle") {
    const auto q = test::invariant(test::figure8(), 4, "+");
    const auto base = limit_value(q.rational(), cdouble(-1), 1e-8);
    for (int p : {-3, 1, 7}) {
      const RationalFunction<double> u((-q.num).shifted(p), q.den);
      const auto v = limit_value(u, cdouble(-1), 1e-8);
      CHECK(abs(v.value) == doctest::Approx(abs(base.value)).epsilon(1e-12));
    }
  }

  TEST_CASE("evaluation points") {
    CHECK(EvaluationPoint::parse("1").is_plus_one());
    CHECK(EvaluationPoint::parse("-1").is_minus_one());
    CHECK(EvaluationPoint::parse("2/4").is_minus_one());
    CHECK(EvaluationPoint::parse("1/3").exploratory());
    CHECK(EvaluationPoint::parse("-1/3").label() == "2/3");
    CHECK_THROWS_AS(EvaluationPoint::parse("i"), InputError);
    CHECK_THROWS_AS(EvaluationPoint::parse("1/0"), InputError);
    CHECK(parse_mode("tilde") == Mode::plain);
    CHECK_THROWS_AS(parse_mode("other"), InputError);
    CHECK_THROWS_AS(parse_parity("all"), InputError);
  }

  TEST_CASE("precision policy") {
    CHECK(PrecisionPolicy::automatic_for(4).kind == Precision::f64);
    CHECK(PrecisionPolicy::automatic_for(10).kind == Precision::dd);
    const auto big = PrecisionPolicy::automatic_for(30);
    CHECK(big.kind == Precision::mp);
    CHECK(big.mp_bits >= 64 + 6 * 30);
    CHECK(PrecisionPolicy::next(parse_precision("f64"), 4).kind == Precision::dd);
    CHECK(PrecisionPolicy::next(parse_precision("mp256"), 30).mp_bits == 320);
    CHECK_THROWS_AS(parse_precision("single"), InputError);
    CHECK_THROWS_AS(parse_precision("mp8"), InputError);

    const Example f = test::figure8();
    const auto certified = corrected_ratio(f, kPlus, 8, EvaluationPoint::plus_one());
    REQUIRE(certified.certification_delta.has_value());
    CHECK(*certified.certification_delta < 1e-9);
    const auto plain64 = corrected_ratio(f, kPlus, 8, EvaluationPoint::plus_one(), fixed("f64"));
    CHECK(plain64.precision == "f64");
    CHECK(est(plain64, 8) == doctest::Approx(est(certified, 8)).epsilon(1e-6));
  }

  TEST_CASE("aitken") {
    std::vector<double> x;
    for (int k = 0; k < 6; ++k) x.push_back(2.0 + 0.5 * std::pow(0.6, k));
    const auto a = aitken(x);
    REQUIRE(a.size() == 6);
    CHECK_FALSE(a[0].has_value());
    CHECK_FALSE(a[1].has_value());
    for (std::size_t k = 2; k < 6; ++k) {
      REQUIRE(a[k].has_value());
      CHECK(*a[k] == doctest::Approx(2.0).epsilon(1e-12));
    }
    const auto b = aitken({1, 2, std::nan(""), 4, 5});
    CHECK_FALSE(b[2].has_value());
    CHECK_FALSE(b[3].has_value());
    CHECK_FALSE(b[4].has_value());
    const auto c = aitken({1, 2, 3});  // zero second difference
    CHECK_FALSE(c[2].has_value());
  }

  TEST_CASE("series selection and gating") {
    SeriesConfig cfg;
    cfg.n_min = 4;
    cfg.n_max = 9;
    cfg.parity = Parity::odd;
    CHECK(cfg.selected_n() == std::vector<int>{5, 7, 9});
    cfg.n_values = {12, 7, 7, 6};
    CHECK(cfg.selected_n() == std::vector<int>{7});
    cfg.n_values.clear();
    cfg.n_max = 3;
    CHECK_THROWS_AS(cfg.selected_n(), InputError);

    const Example f = test::figure8();
    SeriesConfig g;
    g.n_values = {4, 5};
    g.point = EvaluationPoint::parse("1/3");
    CHECK_THROWS_AS(run_series(g, f), InputError);
    g.exploratory = true;
    const auto t = run_series(g, f);
    CHECK(t.conjectural);
    g.point = EvaluationPoint::plus_one();
    g.signs = SignAssignment::parse("++");
    CHECK_THROWS_AS(run_series(g, f), InputError);
  }

  TEST_CASE("row failures are recorded and the series continues") {
    Example f = test::figure8();
    f.holonomy.matrices[0][0] = ComplexText{"2", "0"};  // det 2: every row fails
    SeriesConfig cfg;
    cfg.n_values = {4, 6};
    const auto t = run_series(cfg, f);
    REQUIRE(t.rows.size() == 2);
    for (const auto& r : t.rows) {
      CHECK_FALSE(r.ok());
      CHECK(r.status.rfind("error: ", 0) == 0);
    }
  }

  TEST_CASE("concurrent rows match a serial run") {
    const Example wh = test::whitehead();
    SeriesConfig cfg;
    cfg.n_min = 4;
    cfg.n_max = 12;
    cfg.signs = SignAssignment::parse("+-");
    cfg.accelerate = true;
    cfg.threads = 1;
    const auto serial = run_series(cfg, wh);
    cfg.threads = 4;
    const auto parallel = run_series(cfg, wh);
    REQUIRE(serial.rows.size() == parallel.rows.size());
    for (std::size_t i = 0; i < serial.rows.size(); ++i) {
      CHECK(serial.rows[i].n == parallel.rows[i].n);
      CHECK(serial.rows[i].modulus_log == parallel.rows[i].modulus_log);
      CHECK(serial.accelerated[i] == parallel.accelerated[i]);
    }
    for (std::size_t i = 1; i < serial.rows.size(); ++i) CHECK(serial.rows[i - 1].n < serial.rows[i].n);
  }
}
