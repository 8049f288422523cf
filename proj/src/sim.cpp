#include "quoter/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <mutex>

#include "quoter/detail/csv.hpp"
#include "quoter/detail/parallel.hpp"
#include "quoter/model.hpp"
#include "quoter/rng.hpp"

namespace quoter::sim {

namespace {

long resolve_steps(const ModelParams& p, const PathConfig& cfg) {
    if (!(cfg.dt > 0.0) || cfg.dt > p.horizon_t)
        throw Error(ErrorCode::invalid_config, "need 0 < dt <= T");
    double ratio = p.horizon_t / cfg.dt;
    long n = static_cast<long>(std::llround(ratio));
    if (n < 1 || std::fabs(ratio - static_cast<double>(n)) > 1e-9 * ratio)
        throw Error(ErrorCode::invalid_config, "T/dt must be an integer");
    return n;
}

void validate_strategy(const ModelParams& p, const Strategy& strat) {
    if (strat.kind == StrategyKind::symmetric && !(strat.half_spread >= 0.0))
        throw Error(ErrorCode::invalid_config, "symmetric half-spread must be >= 0");
    if (strat.kind == StrategyKind::grid_policy) {
        if (!strat.field)
            throw Error(ErrorCode::invalid_config, "grid policy needs a solved field");
        const ModelParams& fp = strat.field->params();
        if (fp.sigma != p.sigma || fp.gamma != p.gamma || fp.big_a != p.big_a ||
            fp.kappa != p.kappa || fp.horizon_t != p.horizon_t)
            throw Error(ErrorCode::invalid_config,
                        "grid policy field solved under different parameters");
    }
}

int resolve_cap(const Strategy& strat, const PathConfig& cfg) {
    if (cfg.q_cap) {
        if (*cfg.q_cap < 1)
            throw Error(ErrorCode::invalid_config, "q_cap must be >= 1");
        return *cfg.q_cap;
    }
    if (strat.kind == StrategyKind::grid_policy && strat.field) {
        const hjb::Grid& g = strat.field->grid();
        return std::min(g.q_max, -g.q_min);
    }
    return 0;  // unbounded
}

}  // namespace

PathResult simulate_path(const ModelParams& p, const Strategy& strat,
                         const PathConfig& cfg, long path_index) {
    validate_params(p);
    validate_strategy(p, strat);
    const long n_steps = resolve_steps(p, cfg);
    const int cap = resolve_cap(strat, cfg);
    const double sqrt_dt = std::sqrt(cfg.dt);

    RngStream rng(cfg.seed, static_cast<uint64_t>(path_index));

    double s = cfg.s0;
    int q = cfg.q0;
    PathResult out;

    for (long step = 0; step < n_steps; ++step) {
        const double t = static_cast<double>(step) * cfg.dt;

        // quotes from the step-start state
        Quote quote;
        switch (strat.kind) {
            case StrategyKind::asymptotic_inventory:
                quote = model::optimal_offsets(p, {s, t, q, 0.0}, cfg.clamp);
                break;
            case StrategyKind::symmetric:
                quote.delta_b = quote.delta_a = strat.half_spread;
                break;
            case StrategyKind::frozen_reservation:
                quote = model::offsets_from_reservation(
                    p, model::reservation_prices(p, {s, t, q, 0.0}), s);
                break;
            case StrategyKind::grid_policy: {
                const hjb::Grid& g = strat.field->grid();
                if (s < g.s_min || s > g.s_max || q < g.q_min || q > g.q_max) {
                    // state escaped the solved window: fall back and count it
                    quote = model::optimal_offsets(p, {s, t, q, 0.0}, cfg.clamp);
                    ++out.n_grid_escapes;
                } else {
                    quote = hjb::extract_quote_sides(*strat.field, s, q, t,
                                                     q < g.q_max, q > g.q_min);
                }
                break;
            }
        }
        if (cfg.clamp) {
            if (quote.delta_b < 0.0) quote.delta_b = 0.0;
            if (quote.delta_a < 0.0) quote.delta_a = 0.0;
        }
        const double p_b = s - quote.delta_b;
        const double p_a = s + quote.delta_a;

        // fixed draw sequence: u_bid, u_ask, then the price increment
        const double u_b = rng.uniform01();
        const double u_a = rng.uniform01();
        const double z = rng.gaussian();

        const bool bid_live = cap == 0 || q < cap;
        const bool ask_live = cap == 0 || q > -cap;
        // lambda evaluated directly: with clamping off an offset may be
        // negative (quote crossing the mid), where the exponential still
        // applies
        int dq = 0;
        if (bid_live) {
            double lam = p.big_a * std::exp(-p.kappa * quote.delta_b);
            if (u_b < -std::expm1(-lam * cfg.dt)) {
                out.sum_buy_cost += p_b;
                ++out.n_buys;
                ++dq;
            }
        }
        if (ask_live) {
            double lam = p.big_a * std::exp(-p.kappa * quote.delta_a);
            if (u_a < -std::expm1(-lam * cfg.dt)) {
                out.sum_sell_proceeds += p_a;
                ++out.n_sells;
                --dq;
            }
        }
        q += dq;
        s += p.sigma * sqrt_dt * z;
    }

    out.x_T = cfg.x0 + (out.sum_sell_proceeds - out.sum_buy_cost);
    out.q_T = q;
    out.s_T = s;
    const double wealth = out.x_T + static_cast<double>(q) * s;
    out.pnl = wealth - cfg.x0 - static_cast<double>(cfg.q0) * cfg.s0;
    const double exponent = -p.gamma * wealth;
    if (exponent > 709.0)
        throw Error(ErrorCode::overflow,
                    "utility overflow on path " + std::to_string(path_index));
    out.utility = -std::exp(exponent);
    return out;
}

// Full binary-tree reduction: order-independent, and exact for identical
// inputs at power-of-two counts (degenerate batches really report zero
// variance).
double pairwise_sum(const double* v, long n) {
    if (n <= 2) {
        if (n == 2) return v[0] + v[1];
        return n == 1 ? v[0] : 0.0;
    }
    long half = n / 2;
    return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

double pairwise_mean(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    return pairwise_sum(v.data(), static_cast<long>(v.size())) /
           static_cast<double>(v.size());
}

namespace {

struct MeanStd {
    double mean = 0.0, std = 0.0, se = 0.0;
};

MeanStd mean_std(const std::vector<double>& v) {
    MeanStd r;
    long n = static_cast<long>(v.size());
    if (n == 0) return r;
    r.mean = pairwise_mean(v);
    if (n > 1) {
        std::vector<double> dev(v.size());
        for (size_t i = 0; i < v.size(); ++i) {
            double d = v[i] - r.mean;
            dev[i] = d * d;
        }
        double var = pairwise_sum(dev.data(), n) / static_cast<double>(n - 1);
        r.std = std::sqrt(var);
        r.se = r.std / std::sqrt(static_cast<double>(n));
    }
    return r;
}

double quantile(std::vector<double> sorted, double prob) {
    if (sorted.empty()) return 0.0;
    double pos = prob * static_cast<double>(sorted.size() - 1);
    size_t lo = static_cast<size_t>(pos);
    size_t hi = std::min(lo + 1, sorted.size() - 1);
    double w = pos - static_cast<double>(lo);
    return (1.0 - w) * sorted[lo] + w * sorted[hi];
}

}  // namespace

BatchResult simulate_batch(const ModelParams& p, const Strategy& strat,
                           const PathConfig& cfg) {
    validate_params(p);
    validate_strategy(p, strat);
    if (cfg.n_paths < 1)
        throw Error(ErrorCode::invalid_config, "n_paths must be >= 1");
    resolve_steps(p, cfg);
    resolve_cap(strat, cfg);

    BatchResult batch;
    batch.paths.resize(cfg.n_paths);
    std::exception_ptr first_error;
    std::mutex error_mutex;
    detail::parallel_for(cfg.n_paths, cfg.n_threads, [&](long i) {
        try {
            batch.paths[i] = simulate_path(p, strat, cfg, i);
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    });
    if (first_error) std::rethrow_exception(first_error);

    const long n = cfg.n_paths;
    std::vector<double> pnl(n), qT(n), util(n), buys(n), sells(n);
    for (long i = 0; i < n; ++i) {
        pnl[i] = batch.paths[i].pnl;
        qT[i] = batch.paths[i].q_T;
        util[i] = batch.paths[i].utility;
        buys[i] = static_cast<double>(batch.paths[i].n_buys);
        sells[i] = static_cast<double>(batch.paths[i].n_sells);
        batch.summary.grid_escapes += batch.paths[i].n_grid_escapes;
    }
    SummaryStats& s = batch.summary;
    s.n_paths = n;
    MeanStd mp = mean_std(pnl);
    s.pnl_mean = mp.mean;
    s.pnl_std = mp.std;
    s.pnl_se = mp.se;
    s.pnl_min = *std::min_element(pnl.begin(), pnl.end());
    s.pnl_max = *std::max_element(pnl.begin(), pnl.end());
    std::vector<double> sorted = pnl;
    std::sort(sorted.begin(), sorted.end());
    s.pnl_p05 = quantile(sorted, 0.05);
    s.pnl_p25 = quantile(sorted, 0.25);
    s.pnl_p50 = quantile(sorted, 0.50);
    s.pnl_p75 = quantile(sorted, 0.75);
    s.pnl_p95 = quantile(sorted, 0.95);
    MeanStd mq = mean_std(qT);
    s.q_mean = mq.mean;
    s.q_std = mq.std;
    s.q_se = mq.se;
    MeanStd mu = mean_std(util);
    s.utility_mean = mu.mean;
    s.utility_se = mu.se;
    s.buys_mean = pairwise_mean(buys);
    s.sells_mean = pairwise_mean(sells);
    return batch;
}

std::pair<double, double> estimate_utility(const ModelParams& p,
                                           const Strategy& strat,
                                           const PathConfig& cfg) {
    BatchResult batch = simulate_batch(p, strat, cfg);
    return {batch.summary.utility_mean, batch.summary.utility_se};
}

void write_paths_csv(const BatchResult& batch, const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw Error(ErrorCode::io_error, "cannot open " + path);
    std::fprintf(fp, "path,x_T,q_T,s_T,pnl,utility,n_buys,n_sells\n");
    using detail::format_num;
    for (size_t i = 0; i < batch.paths.size(); ++i) {
        const PathResult& r = batch.paths[i];
        std::fprintf(fp, "%zu,%s,%d,%s,%s,%s,%ld,%ld\n", i,
                     format_num(r.x_T).c_str(), r.q_T, format_num(r.s_T).c_str(),
                     format_num(r.pnl).c_str(), format_num(r.utility).c_str(),
                     r.n_buys, r.n_sells);
    }
    std::fclose(fp);
}

void write_summary_csv(
    const std::vector<std::pair<std::string, SummaryStats>>& arms,
    const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw Error(ErrorCode::io_error, "cannot open " + path);
    std::fprintf(fp,
                 "arm,n_paths,pnl_mean,pnl_std,pnl_se,pnl_min,pnl_max,pnl_p05,"
                 "pnl_p25,pnl_p50,pnl_p75,pnl_p95,q_mean,q_std,utility_mean,"
                 "utility_se,buys_mean,sells_mean,grid_escapes\n");
    using detail::csv_field;
    using detail::format_num;
    for (const auto& [name, s] : arms) {
        std::fprintf(
            fp, "%s,%ld,%s,%s,%s,%s,%s,%s,%s,%s,%s,%s,%s,%s,%s,%s,%s,%s,%ld\n",
            csv_field(name).c_str(), s.n_paths, format_num(s.pnl_mean).c_str(),
            format_num(s.pnl_std).c_str(), format_num(s.pnl_se).c_str(),
            format_num(s.pnl_min).c_str(), format_num(s.pnl_max).c_str(),
            format_num(s.pnl_p05).c_str(), format_num(s.pnl_p25).c_str(),
            format_num(s.pnl_p50).c_str(), format_num(s.pnl_p75).c_str(),
            format_num(s.pnl_p95).c_str(), format_num(s.q_mean).c_str(),
            format_num(s.q_std).c_str(), format_num(s.utility_mean).c_str(),
            format_num(s.utility_se).c_str(), format_num(s.buys_mean).c_str(),
            format_num(s.sells_mean).c_str(), s.grid_escapes);
    }
    std::fclose(fp);
}

}  // namespace quoter::sim
