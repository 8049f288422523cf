#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "quoter/detail/ddouble.hpp"
#include "quoter/model.hpp"
#include "quoter/oracle.hpp"

using namespace quoter;
namespace o = quoter::oracle;
namespace dd = quoter::detail;

namespace {
const ModelParams kPaperish{2.0, 0.1, 140.0, 1.5, 1.0, 0.0};
}

TEST_CASE("double-double primitives") {
    // exp/log round trip at double-double accuracy
    for (double x : {-5.0, -0.3, 0.0, 0.7, 3.0, 40.0}) {
        dd::dd e = dd::dd_exp(dd::dd(x));
        dd::dd back = dd::dd_log(e);
        CHECK(std::fabs(dd::to_double(dd::dd_sub(back, dd::dd(x)))) <= 1e-28 * (1.0 + std::fabs(x)));
    }
    // two_prod catches what plain multiplication drops
    dd::dd p = dd::two_prod(0.1, 0.1);
    CHECK(p.hi == 0.1 * 0.1);
    CHECK(p.lo != 0.0);
    // expm1 for small arguments
    CHECK(dd::to_double(dd::dd_expm1(dd::dd(1e-20))) == doctest::Approx(1e-20).epsilon(1e-14));
}

TEST_CASE("finite-horizon indifference residuals") {
    // terminal: reservation prices equal s, the identity is exact
    auto [b0, a0] = o::check_indifference(kPaperish, {100.0, 1.0, 4, 3.0});
    CHECK(b0.residual <= 1e-15);
    CHECK(a0.residual <= 1e-15);
    CHECK(b0.passed);

    auto [b1, a1] = o::check_indifference(kPaperish, {100.0, 0.0, 3, 50.0});
    CHECK(b1.residual <= 1e-12);
    CHECK(a1.residual <= 1e-12);

    // sensitivity: a 1e-6 price perturbation must trip the gate
    auto [b2, a2] = o::check_indifference(kPaperish, {100.0, 0.0, 3, 50.0}, 1e-12, 1e-6);
    CHECK_FALSE(b2.passed);
    CHECK(b2.residual > 1e-12);
}

TEST_CASE("stationary indifference residuals") {
    ModelParams p{1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
    auto [b, a] = o::check_stationary_indifference(p, 0.0, 0, 0.0);
    CHECK(b.residual <= 1e-12);
    CHECK(a.residual <= 1e-12);
    CHECK(b.passed);
    CHECK(a.passed);

    auto [b2, a2] = o::check_stationary_indifference(p, 0.0, 0, 0.0, 1e-12, 1e-6);
    CHECK_FALSE(b2.passed);
}

TEST_CASE("brute-force offsets agree with the closed forms") {
    // r = s, gamma = kappa = 1: optimum at ln 2
    ModelParams p{1.0, 1.0, 1.0, 1.0, 1.0, 0.0};
    o::OffsetSearchResult res = o::brute_force_offset(
        p, 10.0, 10.0, o::Side::bid, o::default_bracket(p, 10.0, 10.0, o::Side::bid));
    CHECK(res.delta_star == doctest::Approx(0.6931471805599453).epsilon(1e-10));

    // ask with r_a - s = 0.2 at the stock parameters
    o::OffsetSearchResult ra = o::brute_force_offset(
        kPaperish, 100.0, 100.2, o::Side::ask,
        o::default_bracket(kPaperish, 100.0, 100.2, o::Side::ask));
    CHECK(ra.delta_star == doctest::Approx(0.8453852113757118).epsilon(1e-10));
    // the maximum value matches a direct evaluation of log f
    CHECK(ra.log_f_max ==
          doctest::Approx(o::log_objective(kPaperish, 100.0, 100.2, o::Side::ask,
                                           ra.delta_star))
              .epsilon(1e-12));

    // risk-neutral proxy: delta* -> 1/kappa as gamma -> 0
    ModelParams tiny{1.0, 1e-6, 1.0, 2.0, 1.0, 0.0};
    o::OffsetSearchResult rn = o::brute_force_offset(
        tiny, 5.0, 5.0, o::Side::bid, o::default_bracket(tiny, 5.0, 5.0, o::Side::bid));
    CHECK(std::fabs(rn.delta_star - 0.5) <= 1e-6);

    // a bracket that misses the optimum is rejected
    try {
        o::brute_force_offset(p, 10.0, 10.0, o::Side::bid, {5.0, 6.0, 64});
        FAIL("expected bracket-miss");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::bracket_miss);
    }
}

TEST_CASE("concavity at the optimum") {
    ModelParams p{1.0, 1.0, 1.0, 1.0, 1.0, 0.0};
    o::ResidualReport rep = o::concavity_check(p, 10.0, 10.0, o::Side::bid);
    CHECK(rep.passed);
    CHECK(rep.residual <= 1e-6);

    o::ResidualReport repa = o::concavity_check(p, 10.0, 10.0, o::Side::ask);
    CHECK(repa.passed);

    // stressed corner of the box: low kappa, low gamma
    ModelParams corner{4.0, 0.01, 300.0, 0.1, 2.0, 0.0};
    MarketState st{50.0, 0.0, -10, 0.0};
    ReservationPair r = model::reservation_prices(corner, st);
    CHECK(o::concavity_check(corner, st.s, r.r_b, o::Side::bid).passed);
    CHECK(o::concavity_check(corner, st.s, r.r_a, o::Side::ask).passed);
}

TEST_CASE("stationary utility by quadrature and by sampling") {
    ModelParams p{1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
    RngStream rng(2718, 0);

    // q = 0: deterministic integrand, exact truncated integral
    auto [v0, se0] = o::mc_stationary_value(p, {0.0, 0.0, 0, 0.0}, 0, 12.0, rng);
    CHECK(se0 == 0.0);
    CHECK(v0 == doctest::Approx(std::expm1(-12.0) / 1.0).epsilon(1e-14));

    // q = 1: deterministic route against the closed-form value -2
    MarketState st{0.0, 0.0, 1, 0.0};
    double closed = model::stationary_value(p, st);
    CHECK(closed == doctest::Approx(-2.0).epsilon(1e-14));
    double t_tr = 50.0;
    auto [v1, se1] = o::mc_stationary_value(p, st, 0, t_tr, rng);
    double tail = o::stationary_tail_bound(p, st, t_tr);
    CHECK(std::fabs(v1 - closed) <=
          tail * (1.0 + 1e-4) + 8e-16 * std::fabs(closed));

    // sampled route: truncated where the lognormal variance stays bounded,
    // the analytic tail covering the remainder
    double t_smp = 3.0;
    auto [v2, se2] = o::mc_stationary_value(p, st, 20000, t_smp, rng, true);
    CHECK(se2 > 0.0);
    CHECK(std::fabs(v2 - closed) <=
          3.0 * se2 + o::stationary_tail_bound(p, st, t_smp));

    // divergent configuration is refused
    ModelParams bad = p;
    bad.discount_w = 0.5;
    CHECK_THROWS_AS(o::mc_stationary_value(bad, st, 0, 10.0, rng), Error);

    // just above the convergence boundary: error bars are wide (the tail
    // dominates) but the routes stay consistent
    ModelParams edge = p;
    edge.discount_w = 0.51;
    double closed_edge = model::stationary_value(edge, st);
    auto [ve, se_e] = o::mc_stationary_value(edge, st, 0, 60.0, rng);
    double tail_e = o::stationary_tail_bound(edge, st, 60.0);
    CHECK(tail_e > 0.1 * std::fabs(closed_edge));  // genuinely wide
    CHECK(std::fabs(ve - closed_edge) <=
          tail_e * (1.0 + 1e-4) + 8e-16 * std::fabs(closed_edge));
}

TEST_CASE("feynman-kac estimators for the three coefficients") {
    RngStream rng(99, 7);
    // k = 0 and k = 2 are deterministic and match theta_coeffs bit-exactly
    ThetaCoeffs c = model::theta_coeffs(kPaperish, 7.0, 0.0);
    auto [e0, s0] = o::fk_check_theta(kPaperish, 7.0, 0.0, 0, 0, rng);
    CHECK(s0 == 0.0);
    CHECK(e0 == c.theta0);  // 175, exactly
    auto [e2, s2] = o::fk_check_theta(kPaperish, 7.0, 0.0, 2, 0, rng);
    CHECK(s2 == 0.0);
    CHECK(e2 == c.theta2);  // -0.4, exactly

    // k = 1 is the sampled Gaussian mean
    auto [e1, s1] = o::fk_check_theta(kPaperish, 7.0, 0.0, 1, 100000, rng);
    CHECK(s1 > 0.0);
    CHECK(std::fabs(e1 - 7.0) <= 3.0 * s1);

    // the k = 0 exponent would overflow exp(); the log-domain route keeps it
    ModelParams hot{4.0, 2.0, 300.0, 0.1, 2.0, 0.0};
    auto [ehot, shot] = o::fk_check_theta(hot, 1.0, 0.0, 0, 0, rng);
    CHECK(std::isfinite(ehot));
    CHECK(ehot == doctest::Approx(model::theta_coeffs(hot, 1.0, 0.0).theta0)
                      .epsilon(1e-12));
}

TEST_CASE("verification sweep is green, deterministic, and injectable") {
    o::SweepConfig cfg;
    cfg.n_draws = 120;
    cfg.seed = 20240601;
    auto rows = o::run_verification_sweep(cfg);
    CHECK(rows.size() >= 120 * 8);
    long failures = 0;
    for (const auto& r : rows)
        if (!r.passed) ++failures;
    CHECK(failures == 0);

    // same seed, different thread cap: identical rows
    o::SweepConfig cfg1 = cfg;
    cfg1.n_threads = 1;
    auto rows1 = o::run_verification_sweep(cfg1);
    REQUIRE(rows1.size() == rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].check == rows1[i].check);
        CHECK(rows[i].residual == rows1[i].residual);
        CHECK(rows[i].params_hash == rows1[i].params_hash);
    }

    // failure injection must produce failures
    o::SweepConfig bad = cfg;
    bad.n_draws = 10;
    bad.perturb_reservation = 1e-6;
    auto bad_rows = o::run_verification_sweep(bad);
    long bad_failures = 0;
    for (const auto& r : bad_rows)
        if (!r.passed) ++bad_failures;
    CHECK(bad_failures > 0);

    // report CSV round trip
    std::string path = "/tmp/quoter_test_verify.csv";
    o::write_verification_csv(rows, path);
    std::ifstream in(path);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "check,params_hash,residual,tolerance,passed");
    long n = 0;
    while (std::getline(in, line)) ++n;
    CHECK(n == static_cast<long>(rows.size()));
    std::remove(path.c_str());
}
