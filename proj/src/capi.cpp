#include "quoter.h"

#include <cstdio>
#include <cstring>
#include <memory>
#include <new>
#include <string>

#include "quoter/hjb.hpp"
#include "quoter/model.hpp"
#include "quoter/oracle.hpp"
#include "quoter/sim.hpp"
#include "quoter/types.hpp"

namespace {

thread_local std::string g_last_error;

quoter_status fail(quoter_status code, const char* what) {
    g_last_error = what;
    return code;
}

// Every entry point funnels through here: exceptions from the core map onto
// status codes, never escape the C boundary.
template <typename Fn>
quoter_status guarded(Fn&& fn) {
    try {
        fn();
        return QUOTER_OK;
    } catch (const quoter::Error& e) {
        g_last_error = e.what();
        return static_cast<quoter_status>(static_cast<int>(e.code()));
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return QUOTER_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return QUOTER_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return QUOTER_ERR_INTERNAL;
    }
}

quoter::ModelParams to_params(const quoter_params* p) {
    quoter::ModelParams out;
    out.sigma = p->sigma;
    out.gamma = p->gamma;
    out.big_a = p->big_a;
    out.kappa = p->kappa;
    out.horizon_t = p->horizon_t;
    out.discount_w = p->discount_w;
    return out;
}

quoter::MarketState to_state(const quoter_state* st) {
    return {st->s, st->t, st->q, st->x};
}

quoter_quote from_quote(const quoter::Quote& q) {
    return {q.delta_b, q.delta_a, q.p_b, q.p_a, q.clamped_b ? 1 : 0,
            q.clamped_a ? 1 : 0};
}

quoter_reservation from_reservation(const quoter::ReservationPair& r) {
    return {r.r_a, r.r_b, r.r_mid};
}

quoter::hjb::Grid to_grid(const quoter_grid_spec* g) {
    return quoter::hjb::Grid::make(g->s_min, g->s_max, g->n_s, g->n_t, g->q_min,
                                   g->q_max);
}

void fill_report(quoter_solve_report* rep, const quoter::hjb::SolveReport& r) {
    if (!rep) return;
    rep->sup_error_vs_closed_form = r.sup_error_vs_closed_form;
    rep->steps = r.steps;
    rep->cfl_ratio = r.cfl_ratio;
    rep->wall_time_s = r.wall_time_s;
    std::string joined;
    for (const auto& n : r.notes) {
        if (!joined.empty()) joined += "; ";
        joined += n;
    }
    std::snprintf(rep->notes, sizeof(rep->notes), "%s", joined.c_str());
}

}  // namespace

struct quoter_field {
    // exactly one of the two is engaged
    quoter::hjb::ScalarField* scalar = nullptr;
    quoter::hjb::ThetaField* full = nullptr;
    ~quoter_field() {
        delete scalar;
        delete full;
    }
};

struct quoter_batch {
    quoter::sim::BatchResult result;
};

struct quoter_verify_report {
    std::vector<quoter::oracle::SweepRow> rows;
    long failures = 0;
};

extern "C" {

const char* quoter_status_name(quoter_status s) {
    switch (s) {
        case QUOTER_OK: return "ok";
        case QUOTER_ERR_INVALID_ARGUMENT: return "invalid-argument";
        case QUOTER_ERR_INVALID_PARAMS: return "invalid-params";
        case QUOTER_ERR_INVALID_TIME: return "invalid-time";
        case QUOTER_ERR_DIVERGENT_HORIZON: return "divergent-horizon";
        case QUOTER_ERR_NONPOSITIVE_LOG_ARGUMENT: return "nonpositive-log-argument";
        case QUOTER_ERR_NEGATIVE_OFFSET: return "negative-offset";
        case QUOTER_ERR_OVERFLOW: return "overflow";
        case QUOTER_ERR_CFL_VIOLATION: return "cfl-violation";
        case QUOTER_ERR_GRID_TOO_SMALL: return "grid-too-small";
        case QUOTER_ERR_OUT_OF_GRID: return "out-of-grid";
        case QUOTER_ERR_NONFINITE_FIELD: return "nonfinite-field";
        case QUOTER_ERR_INVALID_CONFIG: return "invalid-config";
        case QUOTER_ERR_BRACKET_MISS: return "bracket-miss";
        case QUOTER_ERR_IO: return "io-error";
        default: return "internal";
    }
}

const char* quoter_last_error(void) { return g_last_error.c_str(); }

quoter_status quoter_frozen_value(const quoter_params* p,
                                  const quoter_state* st, double* out) {
    if (!p || !st || !out) return fail(QUOTER_ERR_INVALID_ARGUMENT, "null arg");
    return guarded([&] {
        *out = quoter::model::frozen_value(to_params(p), to_state(st));
    });
}

quoter_status quoter_reservation_prices(const quoter_params* p,
                                        const quoter_state* st,
                                        quoter_reservation* out) {
    if (!p || !st || !out) return fail(QUOTER_ERR_INVALID_ARGUMENT, "null arg");
    return guarded([&] {
        *out = from_reservation(
            quoter::model::reservation_prices(to_params(p), to_state(st)));
    });
}

quoter_status quoter_stationary_value(const quoter_params* p,
                                      const quoter_state* st, double* out) {
    if (!p || !st || !out) return fail(QUOTER_ERR_INVALID_ARGUMENT, "null arg");
    return guarded([&] {
        *out = quoter::model::stationary_value(to_params(p), to_state(st));
    });
}

quoter_status quoter_stationary_reservation(const quoter_params* p, double s,
                                            int q, quoter_reservation* out) {
    if (!p || !out) return fail(QUOTER_ERR_INVALID_ARGUMENT, "null arg");
    return guarded([&] {
        *out = from_reservation(
            quoter::model::stationary_reservation(to_params(p), s, q));
    });
}

quoter_status quoter_intensity(const quoter_params* p, double delta,
                               double* out) {
    if (!p || !out) return fail(QUOTER_ERR_INVALID_ARGUMENT, "null arg");
    return guarded(
        [&] { *out = quoter::model::intensity(to_params(p), delta); });
}

quoter_status quoter_theta_coeffs_at(const quoter_params* p, double s,
                                     double t, quoter_theta_coeffs* out) {
    if (!p || !out) return fail(QUOTER_ERR_INVALID_ARGUMENT, "null arg");
    return guarded([&] {
        quoter::ThetaCoeffs c = quoter::model::theta_coeffs(to_params(p), s, t);
        out->theta0 = c.theta0;
        out->theta1 = c.theta1;
        out->theta2 = c.theta2;
    });
}

quoter_status quoter_asymptotic_reservation(const quoter_params* p,
                                            const quoter_state* st,
                                            quoter_reservation* out) {
    if (!p || !st || !out) return fail(QUOTER_ERR_INVALID_ARGUMENT, "null arg");
    return guarded([&] {
        *out = from_reservation(
            quoter::model::asymptotic_reservation(to_params(p), to_state(st)));
    });
}

quoter_status quoter_optimal_spread(const quoter_params* p, double t,
                                    double* out) {
    if (!p || !out) return fail(QUOTER_ERR_INVALID_ARGUMENT, "null arg");
    return guarded(
        [&] { *out = quoter::model::optimal_spread(to_params(p), t); });
}

quoter_status quoter_optimal_offsets(const quoter_params* p,
                                     const quoter_state* st, int clamp,
                                     quoter_quote* out) {
    if (!p || !st || !out) return fail(QUOTER_ERR_INVALID_ARGUMENT, "null arg");
    return guarded([&] {
        *out = from_quote(quoter::model::optimal_offsets(to_params(p),
                                                         to_state(st), clamp));
    });
}

quoter_status quoter_offsets_from_reservation(const quoter_params* p,
                                              const quoter_reservation* r,
                                              double s, quoter_quote* out) {
    if (!p || !r || !out) return fail(QUOTER_ERR_INVALID_ARGUMENT, "null arg");
    return guarded([&] {
        quoter::ReservationPair pair{r->r_a, r->r_b, r->r_mid};
        *out = from_quote(
            quoter::model::offsets_from_reservation(to_params(p), pair, s));
    });
}

quoter_status quoter_cfl_steps(const quoter_params* p,
                               const quoter_grid_spec* g, long* out_min,
                               long* out_pow2) {
    if (!p || !g || !out_min || !out_pow2)
        return fail(QUOTER_ERR_INVALID_ARGUMENT, "null arg");
    return guarded([&] {
        quoter::hjb::Grid grid = to_grid(g);
        *out_min = quoter::hjb::cfl_min_steps(to_params(p), grid);
        *out_pow2 = quoter::hjb::cfl_pow2_steps(to_params(p), grid);
    });
}

quoter_status quoter_solve_theta_k(const quoter_params* p,
                                   const quoter_grid_spec* g, int k,
                                   quoter_field** out,
                                   quoter_solve_report* rep) {
    if (!p || !g || !out) return fail(QUOTER_ERR_INVALID_ARGUMENT, "null arg");
    *out = nullptr;
    return guarded([&] {
        auto [field, report] = quoter::hjb::solve_theta_k(to_params(p), to_grid(g), k);
        fill_report(rep, report);
        auto handle = std::make_unique<quoter_field>();
        handle->scalar = new quoter::hjb::ScalarField(std::move(field));
        *out = handle.release();
    });
}

quoter_status quoter_solve_full_hjb(const quoter_params* p,
                                    const quoter_grid_spec* g, int clamp,
                                    quoter_field** out,
                                    quoter_solve_report* rep) {
    if (!p || !g || !out) return fail(QUOTER_ERR_INVALID_ARGUMENT, "null arg");
    *out = nullptr;
    return guarded([&] {
        auto [field, report] =
            quoter::hjb::solve_full_hjb(to_params(p), to_grid(g), clamp != 0);
        fill_report(rep, report);
        auto handle = std::make_unique<quoter_field>();
        handle->full = new quoter::hjb::ThetaField(std::move(field));
        *out = handle.release();
    });
}

void quoter_field_free(quoter_field* f) { delete f; }

int quoter_field_is_full(const quoter_field* f) {
    return f && f->full ? 1 : 0;
}

quoter_status quoter_field_dump_csv(const quoter_field* f, const char* path) {
    if (!f || !path) return fail(QUOTER_ERR_INVALID_ARGUMENT, "null arg");
    return guarded([&] {
        if (f->full)
            quoter::hjb::dump_csv(*f->full, path);
        else
            quoter::hjb::dump_csv(*f->scalar, path);
    });
}

quoter_status quoter_field_quotes(const quoter_field* f, double s, int q,
                                  double t, quoter_quote* out) {
    if (!f || !out) return fail(QUOTER_ERR_INVALID_ARGUMENT, "null arg");
    if (!f->full)
        return fail(QUOTER_ERR_INVALID_ARGUMENT,
                    "quotes need a full theta field");
    return guarded(
        [&] { *out = from_quote(quoter::hjb::extract_quotes(*f->full, s, q, t)); });
}

quoter_status quoter_convergence_study(const quoter_params* p,
                                       const quoter_grid_spec* base,
                                       int levels,
                                       quoter_convergence_row* rows) {
    if (!p || !base || !rows)
        return fail(QUOTER_ERR_INVALID_ARGUMENT, "null arg");
    return guarded([&] {
        auto out =
            quoter::hjb::convergence_study(to_params(p), to_grid(base), levels);
        for (size_t i = 0; i < out.size(); ++i) {
            rows[i].level = out[i].level;
            rows[i].n_s = out[i].n_s;
            rows[i].n_t = out[i].n_t;
            rows[i].h = out[i].h;
            rows[i].dt = out[i].dt;
            rows[i].err_theta0 = out[i].err_theta0;
            rows[i].err_theta1 = out[i].err_theta1;
            rows[i].err_theta2 = out[i].err_theta2;
            rows[i].err_hjb_a0 = out[i].err_hjb_a0;
        }
    });
}

namespace {

quoter::sim::Strategy to_strategy(const quoter_strategy* s) {
    quoter::sim::Strategy out;
    switch (s->kind) {
        case QUOTER_STRAT_ASYMPTOTIC:
            out.kind = quoter::sim::StrategyKind::asymptotic_inventory;
            break;
        case QUOTER_STRAT_SYMMETRIC:
            out.kind = quoter::sim::StrategyKind::symmetric;
            break;
        case QUOTER_STRAT_FROZEN:
            out.kind = quoter::sim::StrategyKind::frozen_reservation;
            break;
        case QUOTER_STRAT_GRID:
            out.kind = quoter::sim::StrategyKind::grid_policy;
            break;
        default:
            throw quoter::Error(quoter::ErrorCode::invalid_config,
                                "unknown strategy kind");
    }
    out.half_spread = s->half_spread;
    if (out.kind == quoter::sim::StrategyKind::grid_policy) {
        if (!s->field || !s->field->full)
            throw quoter::Error(quoter::ErrorCode::invalid_config,
                                "grid strategy needs a full theta field");
        out.field = s->field->full;
    }
    return out;
}

quoter::sim::PathConfig to_path_config(const quoter_path_config* c) {
    quoter::sim::PathConfig out;
    out.n_paths = c->n_paths;
    out.dt = c->dt;
    out.seed = c->seed;
    out.s0 = c->s0;
    out.x0 = c->x0;
    out.q0 = c->q0;
    if (c->q_cap > 0) out.q_cap = c->q_cap;
    // q_cap == 0 keeps the default (grid bound when a grid strategy is used);
    // q_cap < 0 forces unbounded, which the default already means otherwise
    out.clamp = c->clamp != 0;
    out.n_threads = c->n_threads;
    return out;
}

quoter_summary from_summary(const quoter::sim::SummaryStats& s) {
    quoter_summary out;
    out.n_paths = s.n_paths;
    out.pnl_mean = s.pnl_mean;
    out.pnl_std = s.pnl_std;
    out.pnl_se = s.pnl_se;
    out.pnl_min = s.pnl_min;
    out.pnl_max = s.pnl_max;
    out.pnl_p05 = s.pnl_p05;
    out.pnl_p25 = s.pnl_p25;
    out.pnl_p50 = s.pnl_p50;
    out.pnl_p75 = s.pnl_p75;
    out.pnl_p95 = s.pnl_p95;
    out.q_mean = s.q_mean;
    out.q_std = s.q_std;
    out.q_se = s.q_se;
    out.utility_mean = s.utility_mean;
    out.utility_se = s.utility_se;
    out.buys_mean = s.buys_mean;
    out.sells_mean = s.sells_mean;
    out.grid_escapes = s.grid_escapes;
    return out;
}

}  // namespace

quoter_status quoter_simulate_batch(const quoter_params* p,
                                    const quoter_strategy* strat,
                                    const quoter_path_config* cfg,
                                    quoter_batch** out) {
    if (!p || !strat || !cfg || !out)
        return fail(QUOTER_ERR_INVALID_ARGUMENT, "null arg");
    *out = nullptr;
    return guarded([&] {
        auto handle = std::make_unique<quoter_batch>();
        handle->result = quoter::sim::simulate_batch(
            to_params(p), to_strategy(strat), to_path_config(cfg));
        *out = handle.release();
    });
}

void quoter_batch_free(quoter_batch* b) { delete b; }

quoter_status quoter_batch_summary(const quoter_batch* b, quoter_summary* out) {
    if (!b || !out) return fail(QUOTER_ERR_INVALID_ARGUMENT, "null arg");
    *out = from_summary(b->result.summary);
    return QUOTER_OK;
}

long quoter_batch_n_paths(const quoter_batch* b) {
    return b ? static_cast<long>(b->result.paths.size()) : 0;
}

quoter_status quoter_batch_path(const quoter_batch* b, long index,
                                quoter_path_result* out) {
    if (!b || !out) return fail(QUOTER_ERR_INVALID_ARGUMENT, "null arg");
    if (index < 0 || index >= static_cast<long>(b->result.paths.size()))
        return fail(QUOTER_ERR_INVALID_ARGUMENT, "path index out of range");
    const quoter::sim::PathResult& r = b->result.paths[index];
    out->x_T = r.x_T;
    out->q_T = r.q_T;
    out->s_T = r.s_T;
    out->pnl = r.pnl;
    out->utility = r.utility;
    out->n_buys = r.n_buys;
    out->n_sells = r.n_sells;
    out->n_grid_escapes = r.n_grid_escapes;
    return QUOTER_OK;
}

quoter_status quoter_batch_write_paths_csv(const quoter_batch* b,
                                           const char* path) {
    if (!b || !path) return fail(QUOTER_ERR_INVALID_ARGUMENT, "null arg");
    return guarded([&] { quoter::sim::write_paths_csv(b->result, path); });
}

quoter_status quoter_write_summary_csv(const char* const* arm_names,
                                       const quoter_summary* summaries,
                                       int n_arms, const char* path) {
    if (!arm_names || !summaries || !path || n_arms < 1)
        return fail(QUOTER_ERR_INVALID_ARGUMENT, "null arg");
    return guarded([&] {
        std::vector<std::pair<std::string, quoter::sim::SummaryStats>> arms;
        for (int i = 0; i < n_arms; ++i) {
            quoter::sim::SummaryStats s;
            const quoter_summary& c = summaries[i];
            s.n_paths = c.n_paths;
            s.pnl_mean = c.pnl_mean;
            s.pnl_std = c.pnl_std;
            s.pnl_se = c.pnl_se;
            s.pnl_min = c.pnl_min;
            s.pnl_max = c.pnl_max;
            s.pnl_p05 = c.pnl_p05;
            s.pnl_p25 = c.pnl_p25;
            s.pnl_p50 = c.pnl_p50;
            s.pnl_p75 = c.pnl_p75;
            s.pnl_p95 = c.pnl_p95;
            s.q_mean = c.q_mean;
            s.q_std = c.q_std;
            s.q_se = c.q_se;
            s.utility_mean = c.utility_mean;
            s.utility_se = c.utility_se;
            s.buys_mean = c.buys_mean;
            s.sells_mean = c.sells_mean;
            s.grid_escapes = c.grid_escapes;
            arms.emplace_back(arm_names[i], s);
        }
        quoter::sim::write_summary_csv(arms, path);
    });
}

quoter_status quoter_estimate_utility(const quoter_params* p,
                                      const quoter_strategy* strat,
                                      const quoter_path_config* cfg,
                                      double* mean, double* se) {
    if (!p || !strat || !cfg || !mean || !se)
        return fail(QUOTER_ERR_INVALID_ARGUMENT, "null arg");
    return guarded([&] {
        auto [m, s] = quoter::sim::estimate_utility(to_params(p),
                                                    to_strategy(strat),
                                                    to_path_config(cfg));
        *mean = m;
        *se = s;
    });
}

quoter_status quoter_verify_run(const quoter_verify_config* cfg,
                                quoter_verify_report** out) {
    if (!cfg || !out) return fail(QUOTER_ERR_INVALID_ARGUMENT, "null arg");
    *out = nullptr;
    return guarded([&] {
        quoter::oracle::SweepConfig sc;
        sc.n_draws = cfg->n_draws;
        sc.seed = cfg->seed;
        sc.n_threads = cfg->n_threads;
        sc.perturb_reservation = cfg->perturb_reservation;
        auto handle = std::make_unique<quoter_verify_report>();
        handle->rows = quoter::oracle::run_verification_sweep(sc);
        for (const auto& row : handle->rows)
            if (!row.passed) ++handle->failures;
        *out = handle.release();
    });
}

void quoter_verify_report_free(quoter_verify_report* r) { delete r; }

long quoter_verify_report_rows(const quoter_verify_report* r) {
    return r ? static_cast<long>(r->rows.size()) : 0;
}

long quoter_verify_report_failures(const quoter_verify_report* r) {
    return r ? r->failures : 0;
}

quoter_status quoter_verify_report_row(const quoter_verify_report* r,
                                       long index, char* check_buf,
                                       size_t check_cap, uint64_t* params_hash,
                                       double* residual, double* tolerance,
                                       int* passed) {
    if (!r) return fail(QUOTER_ERR_INVALID_ARGUMENT, "null arg");
    if (index < 0 || index >= static_cast<long>(r->rows.size()))
        return fail(QUOTER_ERR_INVALID_ARGUMENT, "row index out of range");
    const quoter::oracle::SweepRow& row = r->rows[index];
    if (check_buf && check_cap > 0)
        std::snprintf(check_buf, check_cap, "%s", row.check.c_str());
    if (params_hash) *params_hash = row.params_hash;
    if (residual) *residual = row.residual;
    if (tolerance) *tolerance = row.tolerance;
    if (passed) *passed = row.passed ? 1 : 0;
    return QUOTER_OK;
}

quoter_status quoter_verify_report_write_csv(const quoter_verify_report* r,
                                             const char* path) {
    if (!r || !path) return fail(QUOTER_ERR_INVALID_ARGUMENT, "null arg");
    return guarded(
        [&] { quoter::oracle::write_verification_csv(r->rows, path); });
}

} /* extern "C" */
