/* quoter -- C API for the market-making quoting toolkit.
 *
 * The core is a C++ library compiled into libquoter; this header is its
 * stable C surface: plain structs for parameters and results, opaque handles
 * for solver fields, simulation batches and verification reports, and status
 * codes for every failure path. All functions are thread-safe; the handle
 * types are immutable after creation and may be shared across threads.
 * Failure details for the calling thread are kept in quoter_last_error().
 */

#ifndef QUOTER_H
#define QUOTER_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum quoter_status {
    QUOTER_OK = 0,
    QUOTER_ERR_INVALID_ARGUMENT = 1,
    QUOTER_ERR_INVALID_PARAMS = 2,
    QUOTER_ERR_INVALID_TIME = 3,
    QUOTER_ERR_DIVERGENT_HORIZON = 4,
    QUOTER_ERR_NONPOSITIVE_LOG_ARGUMENT = 5,
    QUOTER_ERR_NEGATIVE_OFFSET = 6,
    QUOTER_ERR_OVERFLOW = 7,
    QUOTER_ERR_CFL_VIOLATION = 8,
    QUOTER_ERR_GRID_TOO_SMALL = 9,
    QUOTER_ERR_OUT_OF_GRID = 10,
    QUOTER_ERR_NONFINITE_FIELD = 11,
    QUOTER_ERR_INVALID_CONFIG = 12,
    QUOTER_ERR_BRACKET_MISS = 13,
    QUOTER_ERR_IO = 14,
    QUOTER_ERR_INTERNAL = 15
} quoter_status;

const char* quoter_status_name(quoter_status s);

/* Message describing the calling thread's most recent failure. */
const char* quoter_last_error(void);

/* ------------------------------------------------------------------ model */

typedef struct quoter_params {
    double sigma;      /* volatility per sqrt(time), >= 0 */
    double gamma;      /* risk aversion, > 0 */
    double big_a;      /* base fill intensity, >= 0 */
    double kappa;      /* intensity decay, > 0 */
    double horizon_t;  /* terminal time, > 0 */
    double discount_w; /* stationary discount; 0 when unused */
} quoter_params;

typedef struct quoter_state {
    double s; /* mid-price */
    double t; /* time in [0, horizon_t] */
    double x; /* cash */
    int q;    /* inventory */
} quoter_state;

typedef struct quoter_quote {
    double delta_b, delta_a; /* offsets from the mid */
    double p_b, p_a;         /* p_b = s - delta_b, p_a = s + delta_a */
    int clamped_b, clamped_a;
} quoter_quote;

typedef struct quoter_reservation {
    double r_a, r_b, r_mid;
} quoter_reservation;

typedef struct quoter_theta_coeffs {
    double theta0, theta1, theta2;
} quoter_theta_coeffs;

quoter_status quoter_frozen_value(const quoter_params* p,
                                  const quoter_state* st, double* out);
quoter_status quoter_reservation_prices(const quoter_params* p,
                                        const quoter_state* st,
                                        quoter_reservation* out);
quoter_status quoter_stationary_value(const quoter_params* p,
                                      const quoter_state* st, double* out);
quoter_status quoter_stationary_reservation(const quoter_params* p, double s,
                                            int q, quoter_reservation* out);
quoter_status quoter_intensity(const quoter_params* p, double delta,
                               double* out);
quoter_status quoter_theta_coeffs_at(const quoter_params* p, double s,
                                     double t, quoter_theta_coeffs* out);
quoter_status quoter_asymptotic_reservation(const quoter_params* p,
                                            const quoter_state* st,
                                            quoter_reservation* out);
quoter_status quoter_optimal_spread(const quoter_params* p, double t,
                                    double* out);
quoter_status quoter_optimal_offsets(const quoter_params* p,
                                     const quoter_state* st, int clamp,
                                     quoter_quote* out);
quoter_status quoter_offsets_from_reservation(const quoter_params* p,
                                              const quoter_reservation* r,
                                              double s, quoter_quote* out);

/* -------------------------------------------------------------------- hjb */

typedef struct quoter_grid_spec {
    double s_min, s_max;
    int n_s;    /* interior price nodes, >= 3 */
    long n_t;   /* time steps, >= 1 */
    int q_min;  /* < 0 */
    int q_max;  /* > 0 */
} quoter_grid_spec;

typedef struct quoter_field quoter_field; /* opaque solved field */

typedef struct quoter_solve_report {
    double sup_error_vs_closed_form; /* < 0 when no closed form applies */
    long steps;
    double cfl_ratio;
    double wall_time_s;
    char notes[384]; /* scheme conventions, "; "-joined */
} quoter_solve_report;

/* Smallest n_t within the stability bound, and the smallest power of two. */
quoter_status quoter_cfl_steps(const quoter_params* p,
                               const quoter_grid_spec* g, long* out_min,
                               long* out_pow2);

/* k in {0,1,2}; lower orders use their closed forms. */
quoter_status quoter_solve_theta_k(const quoter_params* p,
                                   const quoter_grid_spec* g, int k,
                                   quoter_field** out,
                                   quoter_solve_report* rep);
quoter_status quoter_solve_full_hjb(const quoter_params* p,
                                    const quoter_grid_spec* g, int clamp,
                                    quoter_field** out,
                                    quoter_solve_report* rep);
void quoter_field_free(quoter_field* f);
int quoter_field_is_full(const quoter_field* f); /* 1: theta(s,q,t) field */
quoter_status quoter_field_dump_csv(const quoter_field* f, const char* path);
/* quotes from a full field at q_min < q < q_max */
quoter_status quoter_field_quotes(const quoter_field* f, double s, int q,
                                  double t, quoter_quote* out);

typedef struct quoter_convergence_row {
    int level;
    int n_s;
    long n_t;
    double h, dt;
    double err_theta0, err_theta1, err_theta2, err_hjb_a0;
} quoter_convergence_row;

/* rows must hold `levels` entries; levels >= 2 */
quoter_status quoter_convergence_study(const quoter_params* p,
                                       const quoter_grid_spec* base,
                                       int levels,
                                       quoter_convergence_row* rows);

/* -------------------------------------------------------------------- sim */

typedef enum quoter_strategy_kind {
    QUOTER_STRAT_ASYMPTOTIC = 0,
    QUOTER_STRAT_SYMMETRIC = 1,
    QUOTER_STRAT_FROZEN = 2,
    QUOTER_STRAT_GRID = 3
} quoter_strategy_kind;

typedef struct quoter_strategy {
    int kind;                  /* quoter_strategy_kind */
    double half_spread;        /* symmetric only */
    const quoter_field* field; /* grid policy only; must be a full field */
} quoter_strategy;

typedef struct quoter_path_config {
    long n_paths;
    double dt;     /* horizon_t / dt must be integral */
    uint64_t seed; /* master seed; path i runs on substream i */
    double s0, x0;
    int q0;
    int q_cap;     /* > 0: symmetric cap; 0: default; < 0: force unbounded */
    int clamp;     /* raise negative offsets to 0 before quoting */
    int n_threads; /* 0 = auto; QUOTER_THREADS caps either way */
} quoter_path_config;

typedef struct quoter_path_result {
    double x_T;
    int q_T;
    double s_T;
    double pnl;
    double utility;
    long n_buys, n_sells, n_grid_escapes;
} quoter_path_result;

typedef struct quoter_summary {
    long n_paths;
    double pnl_mean, pnl_std, pnl_se, pnl_min, pnl_max;
    double pnl_p05, pnl_p25, pnl_p50, pnl_p75, pnl_p95;
    double q_mean, q_std, q_se;
    double utility_mean, utility_se;
    double buys_mean, sells_mean;
    long grid_escapes;
} quoter_summary;

typedef struct quoter_batch quoter_batch; /* opaque */

quoter_status quoter_simulate_batch(const quoter_params* p,
                                    const quoter_strategy* strat,
                                    const quoter_path_config* cfg,
                                    quoter_batch** out);
void quoter_batch_free(quoter_batch* b);
quoter_status quoter_batch_summary(const quoter_batch* b, quoter_summary* out);
long quoter_batch_n_paths(const quoter_batch* b);
quoter_status quoter_batch_path(const quoter_batch* b, long index,
                                quoter_path_result* out);
quoter_status quoter_batch_write_paths_csv(const quoter_batch* b,
                                           const char* path);
quoter_status quoter_write_summary_csv(const char* const* arm_names,
                                       const quoter_summary* summaries,
                                       int n_arms, const char* path);
quoter_status quoter_estimate_utility(const quoter_params* p,
                                      const quoter_strategy* strat,
                                      const quoter_path_config* cfg,
                                      double* mean, double* se);

/* ---------------------------------------------------------- verification */

typedef struct quoter_verify_config {
    int n_draws; /* >= 1; the stock sweep uses 120 */
    uint64_t seed;
    int n_threads;
    double perturb_reservation; /* failure injection; 0 = off */
} quoter_verify_config;

typedef struct quoter_verify_report quoter_verify_report; /* opaque */

quoter_status quoter_verify_run(const quoter_verify_config* cfg,
                                quoter_verify_report** out);
void quoter_verify_report_free(quoter_verify_report* r);
long quoter_verify_report_rows(const quoter_verify_report* r);
long quoter_verify_report_failures(const quoter_verify_report* r);
quoter_status quoter_verify_report_row(const quoter_verify_report* r,
                                       long index, char* check_buf,
                                       size_t check_cap, uint64_t* params_hash,
                                       double* residual, double* tolerance,
                                       int* passed);
quoter_status quoter_verify_report_write_csv(const quoter_verify_report* r,
                                             const char* path);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* QUOTER_H */
