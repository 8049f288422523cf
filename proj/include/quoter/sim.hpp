#ifndef QUOTER_SIM_HPP
#define QUOTER_SIM_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "quoter/hjb.hpp"
#include "quoter/types.hpp"

namespace quoter::sim {

enum class StrategyKind {
    asymptotic_inventory,  // inventory-skewed optimal offsets, recomputed each step
    symmetric,             // fixed half-spread around the mid
    frozen_reservation,    // FOC offsets on the finite-horizon reservation prices
    grid_policy,           // offsets extracted from a solved theta field
};

struct Strategy {
    StrategyKind kind = StrategyKind::asymptotic_inventory;
    double half_spread = 0.0;                // symmetric only, >= 0
    const hjb::ThetaField* field = nullptr;  // grid_policy only

    static Strategy asymptotic() { return {}; }
    static Strategy symmetric_quotes(double hs) {
        return {StrategyKind::symmetric, hs, nullptr};
    }
    static Strategy frozen() {
        return {StrategyKind::frozen_reservation, 0.0, nullptr};
    }
    static Strategy grid(const hjb::ThetaField* f) {
        return {StrategyKind::grid_policy, 0.0, f};
    }
};

struct PathConfig {
    long n_paths = 1;
    double dt = 1e-3;           // T/dt must be integral
    uint64_t seed = 0;          // master seed; path i uses substream i
    double s0 = 100.0;
    double x0 = 0.0;
    int q0 = 0;
    std::optional<int> q_cap;   // symmetric bound; default: grid q_max if any
    bool clamp = true;          // raise negative offsets to 0 before quoting
    int n_threads = 0;          // 0 = auto; QUOTER_THREADS caps either way
};

struct PathResult {
    double x_T = 0.0;
    int q_T = 0;
    double s_T = 0.0;
    double pnl = 0.0;      // x_T + q_T s_T - x0 - q0 s0
    double utility = 0.0;  // -exp(-gamma (x_T + q_T s_T))
    long n_buys = 0;
    long n_sells = 0;
    long n_grid_escapes = 0;       // grid_policy fallbacks to asymptotic quotes
    double sum_buy_cost = 0.0;     // sum of bid fill prices
    double sum_sell_proceeds = 0.0;
};

struct SummaryStats {
    long n_paths = 0;
    double pnl_mean = 0.0, pnl_std = 0.0, pnl_se = 0.0;
    double pnl_min = 0.0, pnl_max = 0.0;
    double pnl_p05 = 0.0, pnl_p25 = 0.0, pnl_p50 = 0.0, pnl_p75 = 0.0,
           pnl_p95 = 0.0;
    double q_mean = 0.0, q_std = 0.0, q_se = 0.0;
    double utility_mean = 0.0, utility_se = 0.0;
    double buys_mean = 0.0, sells_mean = 0.0;
    long grid_escapes = 0;
};

struct BatchResult {
    SummaryStats summary;
    std::vector<PathResult> paths;
};

// One trading path under the given strategy. Deterministic in
// (seed, path_index); the per-step draw sequence (u_bid, u_ask, Z) is fixed
// regardless of caps, fills, or the strategy, so common random numbers pair
// across arms.
PathResult simulate_path(const ModelParams& p, const Strategy& strat,
                         const PathConfig& cfg, long path_index);

// n_paths independent paths on substreams of the master seed; aggregation is
// pairwise over the path-ordered array, so results do not depend on the
// execution order or thread count.
BatchResult simulate_batch(const ModelParams& p, const Strategy& strat,
                           const PathConfig& cfg);

// Sample mean and standard error of the terminal utility.
std::pair<double, double> estimate_utility(const ModelParams& p,
                                           const Strategy& strat,
                                           const PathConfig& cfg);

void write_paths_csv(const BatchResult& batch, const std::string& path);
void write_summary_csv(
    const std::vector<std::pair<std::string, SummaryStats>>& arms,
    const std::string& path);

// Deterministic pairwise reduction helpers (exposed for reuse in the oracle
// and tests).
double pairwise_sum(const double* v, long n);
double pairwise_mean(const std::vector<double>& v);

}  // namespace quoter::sim

#endif  // QUOTER_SIM_HPP
