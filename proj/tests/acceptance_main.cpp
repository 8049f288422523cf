// Acceptance suite: runs every gate criterion at desk scale and prints one
// pass/fail line per criterion. Exits with the number of failed criteria.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "quoter/detail/ddouble.hpp"
#include "quoter/hjb.hpp"
#include "quoter/model.hpp"
#include "quoter/oracle.hpp"
#include "quoter/rng.hpp"
#include "quoter/sim.hpp"

using namespace quoter;

namespace {

const ModelParams kStock{2.0, 0.1, 140.0, 1.5, 1.0, 0.0};

struct Outcome {
    bool ok = true;
    std::string detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

struct Draw {
    ModelParams params;
    MarketState state;
};

// the oracle module's documented parameter box
Draw box_draw(uint64_t seed, int index) {
    RngStream rng(seed, static_cast<uint64_t>(index));
    auto unif = [&](double lo, double hi) {
        return lo + (hi - lo) * rng.uniform01();
    };
    Draw d;
    d.params.gamma = unif(0.01, 2.0);
    d.params.sigma = unif(0.1, 4.0);
    d.params.kappa = unif(0.1, 5.0);
    d.params.big_a = unif(1.0, 300.0);
    d.params.horizon_t = unif(0.01, 2.0);
    int q = static_cast<int>(std::floor(unif(-10.0, 11.0)));
    if (q > 10) q = 10;
    if (q < -10) q = -10;
    d.state = {unif(1.0, 50.0), 0.0, q, unif(-20.0, 20.0)};
    double qn = std::abs(q) + 1.0;
    d.params.discount_w = unif(1.05, 3.0) * 0.5 * d.params.gamma *
                          d.params.gamma * sigma_sq(d.params) * qn * qn;
    return d;
}

Outcome criterion1_indifference() {
    Outcome out;
    double worst_frozen = 0.0, worst_stationary = 0.0;
    for (int i = 0; i < 120; ++i) {
        Draw d = box_draw(20240601, i);
        auto [b, a] = oracle::check_indifference(d.params, d.state);
        worst_frozen = std::max({worst_frozen, b.residual, a.residual});
        auto [sb, sa] = oracle::check_stationary_indifference(
            d.params, d.state.s, d.state.q, d.state.x);
        worst_stationary = std::max({worst_stationary, sb.residual, sa.residual});
    }
    out.require(worst_frozen <= 1e-12,
                "frozen residual " + std::to_string(worst_frozen));
    out.require(worst_stationary <= 1e-12,
                "stationary residual " + std::to_string(worst_stationary));
    char buf[128];
    std::snprintf(buf, sizeof(buf), "worst residuals %.3e / %.3e", worst_frozen,
                  worst_stationary);
    if (out.ok) out.detail = buf;
    return out;
}

Outcome criterion2_foc() {
    Outcome out;
    double worst_delta = 0.0, worst_fd = 0.0;
    for (int i = 0; i < 120; ++i) {
        Draw d = box_draw(20240601, i);
        ReservationPair r = model::reservation_prices(d.params, d.state);
        Quote closed = model::offsets_from_reservation(d.params, r, d.state.s);
        for (oracle::Side side : {oracle::Side::bid, oracle::Side::ask}) {
            double rr = side == oracle::Side::bid ? r.r_b : r.r_a;
            double want =
                side == oracle::Side::bid ? closed.delta_b : closed.delta_a;
            oracle::OffsetSearchResult got = oracle::brute_force_offset(
                d.params, d.state.s, rr, side,
                oracle::default_bracket(d.params, d.state.s, rr, side));
            worst_delta = std::max(worst_delta, std::fabs(got.delta_star - want));
            oracle::ResidualReport conc =
                oracle::concavity_check(d.params, d.state.s, rr, side);
            worst_fd = std::max(worst_fd, conc.residual);
            out.require(conc.passed, "concavity failed at draw " +
                                         std::to_string(i));
        }
    }
    out.require(worst_delta <= 1e-8,
                "offset mismatch " + std::to_string(worst_delta));
    out.require(worst_fd <= 1e-6, "f'' mismatch " + std::to_string(worst_fd));
    char buf[128];
    std::snprintf(buf, sizeof(buf), "worst |delta-closed| %.3e, fd %.3e",
                  worst_delta, worst_fd);
    if (out.ok) out.detail = buf;
    return out;
}

std::vector<hjb::ConvergenceRow> study_rows() {
    static std::vector<hjb::ConvergenceRow> rows = [] {
        hjb::Grid base = hjb::Grid::make(50.0, 150.0, 50, 1, -3, 3);
        return hjb::convergence_study(kStock, base, 3);
    }();
    return rows;
}

Outcome criterion3_theta() {
    Outcome out;
    auto rows = study_rows();
    out.require(rows.size() == 3, "expected 3 levels");
    out.require(rows.back().n_s == 200, "final level must be n_s = 200");
    for (size_t l = 0; l + 1 < rows.size(); ++l) {
        out.require(rows[l + 1].err_theta0 <= rows[l].err_theta0,
                    "theta0 errors not monotone");
        out.require(rows[l + 1].err_theta1 <= rows[l].err_theta1,
                    "theta1 errors not monotone");
        out.require(rows[l + 1].err_theta2 <= rows[l].err_theta2,
                    "theta2 errors not monotone");
    }
    out.require(rows.back().err_theta0 <= 1e-6, "theta0 final error too large");
    out.require(rows.back().err_theta1 <= 1e-6, "theta1 final error too large");
    out.require(rows.back().err_theta2 <= 1e-6, "theta2 final error too large");
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "sup errors (final level) %.3e / %.3e / %.3e",
                  rows.back().err_theta0, rows.back().err_theta1,
                  rows.back().err_theta2);
    if (out.ok) out.detail = buf;
    return out;
}

Outcome criterion4_frozen_hjb() {
    Outcome out;
    auto rows = study_rows();
    for (size_t l = 0; l + 1 < rows.size(); ++l)
        out.require(rows[l + 1].err_hjb_a0 <= rows[l].err_hjb_a0,
                    "A=0 errors not monotone");
    out.require(rows.back().err_hjb_a0 <= 1e-4, "A=0 final error too large");
    char buf[96];
    std::snprintf(buf, sizeof(buf), "sup error at level 3: %.3e",
                  rows.back().err_hjb_a0);
    if (out.ok) out.detail = buf;
    return out;
}

Outcome criterion5_identities() {
    Outcome out;
    double worst_sum = 0.0, worst_mid = 0.0, worst_side = 0.0;
    double spread_bits = model::optimal_spread(kStock, 0.25);
    for (int q = -10; q <= 10; ++q) {
        for (double s : {60.0, 100.0, 140.0}) {
            MarketState st{s, 0.25, q, 0.0};
            Quote quote = model::optimal_offsets(kStock, st, false);
            double spread = model::optimal_spread(kStock, 0.25);
            out.require(spread == spread_bits, "spread depends on (q, s)");
            worst_sum = std::max(worst_sum,
                                 std::fabs(quote.delta_a + quote.delta_b - spread));
            ReservationPair exact = model::reservation_prices(kStock, st);
            ReservationPair asym = model::asymptotic_reservation(kStock, st);
            worst_mid = std::max(worst_mid, std::fabs(exact.r_mid - asym.r_mid));
            worst_side = std::max({worst_side, std::fabs(exact.r_a - asym.r_a),
                                   std::fabs(exact.r_b - asym.r_b)});
        }
    }
    out.require(worst_sum <= 1e-12, "offset sum vs spread");
    out.require(worst_mid <= 1e-12, "r_mid mismatch");
    out.require(worst_side <= 1e-12, "r_a/r_b mismatch");
    char buf[128];
    std::snprintf(buf, sizeof(buf), "worst sum %.3e, mid %.3e", worst_sum,
                  worst_mid);
    if (out.ok) out.detail = buf;
    return out;
}

Outcome criterion6_simulator() {
    Outcome out;
    sim::PathConfig cfg;
    cfg.n_paths = 10000;
    cfg.dt = 1e-3;
    cfg.seed = 909090;
    cfg.s0 = 100.0;

    // (a) A = 0: zero fills, constant cash, exact
    {
        ModelParams p = kStock;
        p.big_a = 0.0;
        sim::PathConfig c = cfg;
        c.x0 = 3.25;
        sim::BatchResult b = sim::simulate_batch(p, sim::Strategy::asymptotic(), c);
        bool exact = true;
        for (const auto& r : b.paths)
            exact = exact && r.n_buys == 0 && r.n_sells == 0 && r.x_T == 3.25;
        out.require(exact, "(a) A=0 fills or cash moved");
    }

    // (b) constant intensity: counts within 3 SE of A*T
    {
        ModelParams p = kStock;
        p.sigma = 0.0;
        p.big_a = 5.0;
        sim::BatchResult b =
            sim::simulate_batch(p, sim::Strategy::symmetric_quotes(0.0), cfg);
        double pf = -std::expm1(-p.big_a * cfg.dt);
        double se = std::sqrt(1000.0 * pf * (1.0 - pf) / 10000.0);
        out.require(std::fabs(b.summary.buys_mean - 5.0) <= 3.0 * se,
                    "(b) buys mean off A*T");
        out.require(std::fabs(b.summary.sells_mean - 5.0) <= 3.0 * se,
                    "(b) sells mean off A*T");
    }

    // (c) symmetric strategy: mean terminal inventory indistinguishable from 0
    {
        double half = 0.5 * (0.5 * kStock.gamma * sigma_sq(kStock) *
                                 kStock.horizon_t +
                             2.0 * model::log_intensity_premium(kStock));
        sim::BatchResult b = sim::simulate_batch(
            kStock, sim::Strategy::symmetric_quotes(half), cfg);
        double se = b.summary.q_std / std::sqrt(10000.0);
        out.require(std::fabs(b.summary.q_mean) <= 3.0 * se,
                    "(c) symmetric q mean off 0");
    }

    // (d) A = 0, q0 = 1: mean utility within 3 SE of the closed expectation
    {
        ModelParams p = kStock;
        p.big_a = 0.0;
        sim::PathConfig c = cfg;
        c.q0 = 1;
        auto [mean, se] = sim::estimate_utility(p, sim::Strategy::asymptotic(), c);
        double want = model::frozen_value(p, {100.0, 0.0, 1, 0.0});
        out.require(std::fabs(mean - want) <= 3.0 * se,
                    "(d) utility off the frozen value");
    }
    if (out.ok) out.detail = "a-d within gates at 10^4 paths";
    return out;
}

Outcome criterion7_feynman_kac() {
    Outcome out;
    ThetaCoeffs c = model::theta_coeffs(kStock, 100.0, 0.0);
    RngStream rng(4321, 0);
    auto [e0, s0] = oracle::fk_check_theta(kStock, 100.0, 0.0, 0, 0, rng);
    out.require(e0 == c.theta0 && s0 == 0.0, "k=0 not exact");
    auto [e2, s2] = oracle::fk_check_theta(kStock, 100.0, 0.0, 2, 0, rng);
    out.require(e2 == c.theta2 && s2 == 0.0, "k=2 not exact");
    auto [e1, s1] = oracle::fk_check_theta(kStock, 100.0, 0.0, 1, 100000, rng);
    out.require(std::fabs(e1 - c.theta1) <= 3.0 * s1, "k=1 outside 3 SE");
    char buf[128];
    std::snprintf(buf, sizeof(buf), "k0 %.10g (exact), k1 %.6f +- %.6f, k2 %g",
                  e0, e1, s1, e2);
    if (out.ok) out.detail = buf;
    return out;
}

// ---- criterion 8: CLI round trips ---------------------------------------

int run_cmd(const std::string& cmd) {
    int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome criterion8_determinism() {
    Outcome out;
    const char* cli = std::getenv("QUOTER_CLI");
    if (!cli) {
        out.require(false, "QUOTER_CLI not set");
        return out;
    }
    std::string dir = "/tmp/quoter_acceptance." + std::to_string(::getpid());
    run_cmd("rm -rf " + dir + " && mkdir -p " + dir);
    std::string cfg = dir + "/accept.conf";
    {
        std::ofstream c(cfg);
        c << "model.sigma = 2.0\nmodel.gamma = 0.1\nmodel.big_a = 140.0\n"
             "model.kappa = 1.5\nmodel.horizon_t = 1.0\n"
             "sim.n_paths = 2000\nsim.dt = 0.001\nsim.seed = 20240601\n"
             "verify.draws = 120\nverify.seed = 1\n";
    }
    auto sim_cmd = [&](const std::string& sub, const std::string& env) {
        return env + " " + std::string(cli) + " --config " + cfg + " --out " +
               dir + "/" + sub + " simulate --arms asymptotic,symmetric > " +
               dir + "/" + sub + ".log 2>&1";
    };
    auto verify_cmd = [&](const std::string& sub, const std::string& env) {
        return env + " " + std::string(cli) + " --config " + cfg + " --out " +
               dir + "/" + sub + " verify > " + dir + "/" + sub + ".log 2>&1";
    };

    out.require(run_cmd(sim_cmd("s1", "QUOTER_THREADS=1")) == 0, "simulate run 1");
    out.require(run_cmd(sim_cmd("s2", "QUOTER_THREADS=1")) == 0, "simulate run 2");
    out.require(run_cmd(sim_cmd("s4", "QUOTER_THREADS=4")) == 0,
                "simulate run, 4 threads");
    for (const char* f :
         {"paths_asymptotic.csv", "paths_symmetric.csv", "summary.csv"}) {
        std::string a = slurp(dir + "/s1/" + f);
        out.require(!a.empty(), std::string("missing ") + f);
        out.require(a == slurp(dir + "/s2/" + f),
                    std::string("rerun differs: ") + f);
        out.require(a == slurp(dir + "/s4/" + f),
                    std::string("thread count changes ") + f);
    }

    out.require(run_cmd(verify_cmd("v1", "QUOTER_THREADS=1")) == 0, "verify run 1");
    out.require(run_cmd(verify_cmd("v2", "QUOTER_THREADS=4")) == 0, "verify run 2");
    std::string v = slurp(dir + "/v1/verify_report.csv");
    out.require(!v.empty(), "missing verify_report.csv");
    out.require(v == slurp(dir + "/v2/verify_report.csv"),
                "verify CSV differs across thread counts");

    run_cmd("rm -rf " + dir);
    if (out.ok) out.detail = "byte-identical CSVs across reruns and threads";
    return out;
}

}  // namespace

int main() {
    struct Entry {
        int id;
        const char* label;
        double budget_s;
        std::function<Outcome()> fn;
    };
    std::vector<Entry> entries = {
        {1, "indifference suite (both definitions, 120 draws)", 1.0,
         criterion1_indifference},
        {2, "first-order conditions and concavity", 10.0, criterion2_foc},
        {3, "asymptotic coefficients under refinement", 30.0, criterion3_theta},
        {4, "full HJB against the A=0 frozen form", 60.0, criterion4_frozen_hjb},
        {5, "quote and spread identities", 1.0, criterion5_identities},
        {6, "simulator statistical suite", 120.0, criterion6_simulator},
        {7, "Feynman-Kac coefficient checks", 5.0, criterion7_feynman_kac},
        {8, "CSV determinism across runs and threads", 240.0,
         criterion8_determinism},
    };

    int failures = 0;
    for (auto& e : entries) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = e.fn();
        } catch (const std::exception& ex) {
            out.ok = false;
            out.detail = std::string("exception: ") + ex.what();
        }
        double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        if (secs > e.budget_s) {
            out.ok = false;
            out.detail += (out.detail.empty() ? "" : "; ") + std::string("over ") +
                          std::to_string(e.budget_s) + "s budget";
        }
        std::printf("%s criterion %d [%6.2fs]: %s%s%s\n",
                    out.ok ? "PASS" : "FAIL", e.id, secs, e.label,
                    out.detail.empty() ? "" : " -- ", out.detail.c_str());
        if (!out.ok) ++failures;
    }
    return failures;
}
