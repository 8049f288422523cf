#include "quoter/hjb.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>

#include "quoter/detail/csv.hpp"
#include "quoter/detail/ddouble.hpp"
#include "quoter/model.hpp"

namespace quoter::hjb {

using detail::dd;

namespace {

constexpr double kCflBound = 0.5;

// Canonical coefficient expressions; the in-solver right-hand sides and the
// closed-form evaluations below must share these bit-for-bit.
double theta0_rate(const ModelParams& p) {
    return 2.0 * p.big_a / (p.kappa + p.gamma);
}
double gamma_sigma2(const ModelParams& p) { return p.gamma * sigma_sq(p); }

void validate_grid(const Grid& g) {
    if (g.n_s < 3)
        throw Error(ErrorCode::grid_too_small, "n_s must be >= 3");
    if (g.n_t < 1)
        throw Error(ErrorCode::grid_too_small, "n_t must be >= 1");
    if (!(g.s_max > g.s_min) || !std::isfinite(g.s_min) || !std::isfinite(g.s_max))
        throw Error(ErrorCode::grid_too_small, "need s_max > s_min");
    if (!(g.q_min < 0 && 0 < g.q_max))
        throw Error(ErrorCode::grid_too_small, "need q_min < 0 < q_max");
}

double check_cfl(const ModelParams& p, const Grid& g) {
    double dt = p.horizon_t / static_cast<double>(g.n_t);
    double ratio = sigma_sq(p) * dt / (g.h * g.h);
    if (ratio > kCflBound * (1.0 + 1e-12)) {
        char msg[160];
        std::snprintf(msg, sizeof(msg),
                      "explicit scheme unstable: sigma^2 dt/h^2 = %.6g > %.2g; "
                      "need n_t >= %ld",
                      ratio, kCflBound, cfl_min_steps(p, g));
        throw Error(ErrorCode::cfl_violation, msg);
    }
    return ratio;
}

// Compensated per-node time accumulation (Neumaier). Keeps the accumulated
// sum correctly rounded over arbitrarily many steps, so solves whose exact
// solution the scheme reproduces show a true zero error instead of a
// roundoff drift that grows with n_t.
struct CompensatedRow {
    std::vector<double> s;  // running sums
    std::vector<double> e;  // compensations

    explicit CompensatedRow(int n) : s(n, 0.0), e(n, 0.0) {}

    void add(int i, double y) {
        double t = s[i] + y;
        if (std::fabs(s[i]) >= std::fabs(y))
            e[i] += (s[i] - t) + y;
        else
            e[i] += (y - t) + s[i];
        s[i] = t;
    }

    double value(int i) const { return s[i] + e[i]; }
};

struct StopWatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                             t0)
            .count();
    }
};

// Coefficient closed forms evaluated in double-double and rounded to
// the nearest double, so a correctly-rounded solver matches them bit-exactly.
double closed_theta_k(const ModelParams& p, int k, double s_i, const dd& tau) {
    switch (k) {
        case 0: return detail::to_double(detail::dd_mul(tau, theta0_rate(p)));
        case 1: return s_i;
        default:
            return detail::to_double(detail::dd_mul(tau, -gamma_sigma2(p)));
    }
}

void scheme_notes(SolveReport& rep) {
    rep.notes.push_back("diffusion term: (1/2) sigma^2 theta_ss");
    rep.notes.push_back("fill term: A/(kappa+gamma) * exp(-kappa delta) per side");
    rep.notes.push_back("s-boundary: zero second derivative (linear extrapolation)");
    rep.notes.push_back("q-boundary: saturation (side beyond the cap dropped)");
}

}  // namespace

Grid Grid::make(double s_min, double s_max, int n_s, long n_t, int q_min,
                int q_max) {
    Grid g;
    g.s_min = s_min;
    g.n_s = n_s;
    g.n_t = n_t;
    g.q_min = q_min;
    g.q_max = q_max;
    if (!(s_max > s_min) || n_s < 1)
        throw Error(ErrorCode::grid_too_small, "need s_max > s_min and n_s >= 1");
    double h = (s_max - s_min) / static_cast<double>(n_s + 1);
    // Snap the spacing to 40 significant bits: node coordinates become exact,
    // which lets the scheme carry affine data without rounding. Moves s_max
    // by at most ~1e-12 relative.
    int e;
    std::frexp(h, &e);
    double scale = std::ldexp(1.0, 40 - e);
    g.h = std::nearbyint(h * scale) / scale;
    g.s_max = s_min + (n_s + 1) * g.h;
    validate_grid(g);
    return g;
}

long cfl_min_steps(const ModelParams& p, const Grid& g) {
    double dt_max = kCflBound * g.h * g.h / sigma_sq(p);
    return std::max(1L, static_cast<long>(std::ceil(p.horizon_t / dt_max - 1e-9)));
}

long cfl_pow2_steps(const ModelParams& p, const Grid& g) {
    long need = cfl_min_steps(p, g);
    long n = 1;
    while (n < need) n *= 2;
    return n;
}

std::pair<ScalarField, SolveReport> solve_theta_k(const ModelParams& p,
                                                  const Grid& g, int k,
                                                  const ScalarField* theta0,
                                                  const ScalarField* theta1) {
    validate_params(p);
    validate_grid(g);
    if (k < 0 || k > 2)
        throw Error(ErrorCode::invalid_argument, "order k must be 0, 1 or 2");
    auto check_lower = [&](const ScalarField* f, const char* name) {
        if (!f) return;
        if (f->grid().n_s != g.n_s || f->grid().n_t != g.n_t ||
            f->grid().s_min != g.s_min || f->grid().h != g.h)
            throw Error(ErrorCode::invalid_argument,
                        std::string(name) + " field solved on a different grid");
    };
    check_lower(theta0, "theta0");
    check_lower(theta1, "theta1");

    StopWatch watch;
    SolveReport rep;
    rep.cfl_ratio = check_cfl(p, g);
    rep.steps = g.n_t;
    scheme_notes(rep);

    const int nn = g.n_nodes();
    const double dt = p.horizon_t / static_cast<double>(g.n_t);
    const double inv_h2 = 1.0 / (g.h * g.h);
    const double half_s2 = 0.5 * sigma_sq(p);
    const double gs2 = gamma_sigma2(p);
    const double half_gs2 = 0.5 * gs2;
    const double c0 = theta0_rate(p);
    const double h = g.h;
    // central difference; the trailing division keeps the slope of exactly
    // affine rows exactly representable (d/h with d a multiple of h)
    auto dstencil = [h](const double* v, int i) {
        return ((v[i + 1] - v[i - 1]) * 0.5) / h;
    };

    ScalarField field(g, p.horizon_t);
    CompensatedRow acc(nn);
    std::vector<double> prev(nn);

    // terminal slice
    for (int i = 0; i < nn; ++i) {
        double v = (k == 1) ? g.node(i) : 0.0;
        acc.s[i] = v;
        field.at(g.n_t, i) = v;
        prev[i] = v;
    }

    double sup_err = 0.0;
    auto track_error = [&](long m) {
        dd tau = detail::dd_sub(dd(p.horizon_t),
                                detail::dd_mul(static_cast<double>(m), dt));
        for (int i = 0; i < nn; ++i) {
            double e = std::fabs(field.at(m, i) - closed_theta_k(p, k, g.node(i), tau));
            if (e > sup_err) sup_err = e;
        }
    };
    track_error(g.n_t);

    for (long m = g.n_t - 1; m >= 0; --m) {
        // lower-order s-derivatives at the time level being consumed
        for (int i = 1; i <= g.n_s; ++i) {
            double d2 = (prev[i + 1] - prev[i]) - (prev[i] - prev[i - 1]);
            double ds = dstencil(prev.data(), i);
            double ds0 = 0.0;
            double ds1 = 1.0;
            if (theta0)
                ds0 = ((theta0->at(m + 1, i + 1) - theta0->at(m + 1, i - 1)) * 0.5) / h;
            if (theta1)
                ds1 = ((theta1->at(m + 1, i + 1) - theta1->at(m + 1, i - 1)) * 0.5) / h;
            double rhs;
            switch (k) {
                case 0: rhs = half_s2 * d2 * inv_h2 - half_gs2 * (ds * ds) + c0; break;
                case 1: rhs = half_s2 * d2 * inv_h2 - gs2 * ds0 * ds; break;
                default:
                    rhs = half_s2 * d2 * inv_h2 - gs2 * (ds1 * ds1) - gs2 * ds0 * ds;
            }
            acc.add(i, dt * rhs);
        }
        for (int i = 1; i <= g.n_s; ++i) field.at(m, i) = acc.value(i);
        // linear extrapolation at the price boundaries
        field.at(m, 0) = 2.0 * field.at(m, 1) - field.at(m, 2);
        field.at(m, nn - 1) = 2.0 * field.at(m, nn - 2) - field.at(m, nn - 3);
        for (int i = 0; i < nn; ++i) {
            prev[i] = field.at(m, i);
            if (!std::isfinite(prev[i]))
                throw Error(ErrorCode::nonfinite_field,
                            "nonfinite value at step " + std::to_string(m));
        }
        track_error(m);
    }

    rep.sup_error_vs_closed_form = sup_err;
    rep.wall_time_s = watch.seconds();
    return {std::move(field), std::move(rep)};
}

std::pair<ThetaField, SolveReport> solve_full_hjb(const ModelParams& p,
                                                  const Grid& g, bool clamp) {
    validate_params(p);
    validate_grid(g);
    if (g.q_max - g.q_min < 2)
        throw Error(ErrorCode::grid_too_small, "need q_max - q_min >= 2");

    StopWatch watch;
    SolveReport rep;
    rep.cfl_ratio = check_cfl(p, g);
    rep.steps = g.n_t;
    scheme_notes(rep);
    rep.notes.push_back(clamp ? "offsets clamped at 0 in the fill term"
                              : "offsets unclamped in the fill term");

    const int nn = g.n_nodes();
    const int nq = g.n_q();
    const double dt = p.horizon_t / static_cast<double>(g.n_t);
    const double inv_h2 = 1.0 / (g.h * g.h);
    const double h = g.h;
    const double half_s2 = 0.5 * sigma_sq(p);
    const double half_gs2 = 0.5 * gamma_sigma2(p);
    const double fill_scale = p.big_a / (p.kappa + p.gamma);
    const double premium = model::log_intensity_premium(p);

    ThetaField field(g, p, clamp);

    // The solver steps phi = theta - q s; theta's affine-in-s part then never
    // touches the accumulators and survives exactly. Reservation differences
    // reduce to r_b - s = phi(q+1) - phi(q) and r_a - s = phi(q) - phi(q-1).
    std::vector<CompensatedRow> acc(nq, CompensatedRow(nn));
    std::vector<std::vector<double>> prev(nq, std::vector<double>(nn, 0.0));

    // Interior values come from the compensated accumulators; boundary nodes
    // carry the extrapolated phi of the given row.
    auto publish = [&](int qi, long m, const std::vector<double>& phi_row) {
        double q = static_cast<double>(g.q_min + qi);
        for (int i = 0; i < nn; ++i) {
            dd phi = (i == 0 || i == nn - 1) ? dd(phi_row[i])
                                             : dd(acc[qi].s[i], acc[qi].e[i]);
            field.at(g.q_min + qi, m, i) =
                detail::to_double(detail::dd_add(detail::dd_mul(q, g.node(i)), phi));
        }
    };

    for (int qi = 0; qi < nq; ++qi) publish(qi, g.n_t, prev[qi]);

    std::vector<std::vector<double>> next(nq, std::vector<double>(nn, 0.0));
    for (long m = g.n_t - 1; m >= 0; --m) {
        for (int qi = 0; qi < nq; ++qi) {
            const int q = g.q_min + qi;
            const auto& row = prev[qi];
            auto& acc_q = acc[qi];
            for (int i = 1; i <= g.n_s; ++i) {
                double d2 = (row[i + 1] - row[i]) - (row[i] - row[i - 1]);
                double slope = q + ((row[i + 1] - row[i - 1]) * 0.5) / h;
                double fill = 0.0;
                if (q < g.q_max) {
                    double delta_b = -(prev[qi + 1][i] - row[i]) + premium;
                    if (clamp && delta_b < 0.0) delta_b = 0.0;
                    fill += std::exp(-p.kappa * delta_b);
                }
                if (q > g.q_min) {
                    double delta_a = (row[i] - prev[qi - 1][i]) + premium;
                    if (clamp && delta_a < 0.0) delta_a = 0.0;
                    fill += std::exp(-p.kappa * delta_a);
                }
                double rhs =
                    half_s2 * d2 * inv_h2 - half_gs2 * (slope * slope) + fill_scale * fill;
                acc_q.add(i, dt * rhs);
            }
            auto& out = next[qi];
            for (int i = 1; i <= g.n_s; ++i) out[i] = acc_q.value(i);
            out[0] = 2.0 * out[1] - out[2];
            out[nn - 1] = 2.0 * out[nn - 2] - out[nn - 3];
            for (int i = 0; i < nn; ++i)
                if (!std::isfinite(out[i]))
                    throw Error(ErrorCode::nonfinite_field,
                                "nonfinite value at step " + std::to_string(m) +
                                    ", q = " + std::to_string(q));
        }
        prev.swap(next);
        for (int qi = 0; qi < nq; ++qi) publish(qi, m, prev[qi]);
    }

    rep.wall_time_s = watch.seconds();
    return {std::move(field), std::move(rep)};
}

namespace {

struct Interp {
    long m0;
    double wt;
    int i0;
    double ws;
};

Interp locate(const ThetaField& f, double s, double t) {
    const Grid& g = f.grid();
    if (!(s >= g.s_min && s <= g.s_max))
        throw Error(ErrorCode::out_of_grid, "price outside the grid window");
    if (!(t >= 0.0 && t <= f.params().horizon_t))
        throw Error(ErrorCode::out_of_grid, "time outside [0, T]");
    double dt = f.dt();
    Interp ip;
    double mt = t / dt;
    ip.m0 = std::min<long>(g.n_t - 1, static_cast<long>(mt));
    ip.wt = mt - static_cast<double>(ip.m0);
    double xs = (s - g.s_min) / g.h;
    ip.i0 = std::min(g.n_s, static_cast<int>(xs));
    ip.ws = xs - static_cast<double>(ip.i0);
    return ip;
}

double interp_theta(const ThetaField& f, const Interp& ip, int q) {
    auto plane = [&](long m) {
        return (1.0 - ip.ws) * f.at(q, m, ip.i0) + ip.ws * f.at(q, m, ip.i0 + 1);
    };
    return (1.0 - ip.wt) * plane(ip.m0) + ip.wt * plane(ip.m0 + 1);
}

}  // namespace

Quote extract_quote_sides(const ThetaField& f, double s, int q, double t,
                          bool want_bid, bool want_ask) {
    const Grid& g = f.grid();
    if (q < g.q_min || q > g.q_max)
        throw Error(ErrorCode::out_of_grid, "inventory outside the grid");
    want_bid = want_bid && q < g.q_max;
    want_ask = want_ask && q > g.q_min;
    if (!want_bid && !want_ask)
        throw Error(ErrorCode::out_of_grid, "no quotable side at this inventory");
    Interp ip = locate(f, s, t);
    double premium = model::log_intensity_premium(f.params());
    double th = interp_theta(f, ip, q);
    Quote quote;
    if (want_bid) {
        double r_b = interp_theta(f, ip, q + 1) - th;
        quote.delta_b = (s - r_b) + premium;
        if (f.clamped() && quote.delta_b < 0.0) {
            quote.delta_b = 0.0;
            quote.clamped_b = true;
        }
    }
    if (want_ask) {
        double r_a = th - interp_theta(f, ip, q - 1);
        quote.delta_a = (r_a - s) + premium;
        if (f.clamped() && quote.delta_a < 0.0) {
            quote.delta_a = 0.0;
            quote.clamped_a = true;
        }
    }
    quote.p_b = s - quote.delta_b;
    quote.p_a = s + quote.delta_a;
    return quote;
}

Quote extract_quotes(const ThetaField& f, double s, int q, double t) {
    const Grid& g = f.grid();
    if (!(g.q_min < q && q < g.q_max))
        throw Error(ErrorCode::out_of_grid,
                    "both inventory neighbors must be on the grid");
    return extract_quote_sides(f, s, q, t, true, true);
}

namespace {

void write_rows(std::FILE* fp, double s, double q, double t, double theta) {
    std::fprintf(fp, "%s,%s,%s,%s\n", detail::format_num(s).c_str(),
                 detail::format_num(q).c_str(), detail::format_num(t).c_str(),
                 detail::format_num(theta).c_str());
}

std::FILE* open_dump(const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw Error(ErrorCode::io_error, "cannot open " + path);
    std::fprintf(fp, "s,q,t,theta\n");
    return fp;
}

}  // namespace

void dump_csv(const ScalarField& f, const std::string& path) {
    std::FILE* fp = open_dump(path);
    double dt = f.dt();
    for (long m = 0; m <= f.grid().n_t; ++m)
        for (int i = 0; i < f.grid().n_nodes(); ++i)
            write_rows(fp, f.grid().node(i), 0.0, m * dt, f.at(m, i));
    std::fclose(fp);
}

void dump_csv(const ThetaField& f, const std::string& path) {
    std::FILE* fp = open_dump(path);
    double dt = f.dt();
    for (int q = f.grid().q_min; q <= f.grid().q_max; ++q)
        for (long m = 0; m <= f.grid().n_t; ++m)
            for (int i = 0; i < f.grid().n_nodes(); ++i)
                write_rows(fp, f.grid().node(i), q, m * dt, f.at(q, m, i));
    std::fclose(fp);
}

double empirical_order(double coarse, double fine) {
    if (fine <= 0.0) return std::numeric_limits<double>::infinity();
    if (coarse <= 0.0) return 0.0;
    return std::log2(coarse / fine);
}

std::vector<ConvergenceRow> convergence_study(const ModelParams& p,
                                              const Grid& base, int levels) {
    validate_params(p);
    if (levels < 2)
        throw Error(ErrorCode::invalid_argument, "levels >= 2 required");

    ModelParams frozen = p;
    frozen.big_a = 0.0;

    std::vector<ConvergenceRow> rows;
    for (int lvl = 0; lvl < levels; ++lvl) {
        int n_s = base.n_s * (1 << lvl);  // node count doubles, spacing ~halves
        Grid g0 = Grid::make(base.s_min, base.s_max, n_s, 1, base.q_min, base.q_max);
        Grid g = Grid::make(base.s_min, base.s_max, n_s, cfl_pow2_steps(p, g0),
                            base.q_min, base.q_max);

        ConvergenceRow row;
        row.level = lvl;
        row.n_s = g.n_s;
        row.n_t = g.n_t;
        row.h = g.h;
        row.dt = p.horizon_t / static_cast<double>(g.n_t);

        auto [f0, rep0] = solve_theta_k(p, g, 0);
        auto [f1, rep1] = solve_theta_k(p, g, 1, &f0);
        auto [f2, rep2] = solve_theta_k(p, g, 2, &f0, &f1);
        row.err_theta0 = rep0.sup_error_vs_closed_form;
        row.err_theta1 = rep1.sup_error_vs_closed_form;
        row.err_theta2 = rep2.sup_error_vs_closed_form;

        // frozen oracle: with A = 0 the solution is q s - gamma sigma^2 q^2
        // (T-t)/2 exactly; compare in double-double.
        auto [ff, repf] = solve_full_hjb(frozen, g, true);
        const double half_gs2 = 0.5 * gamma_sigma2(p);
        double sup = 0.0;
        double dt = row.dt;
        for (int q = g.q_min; q <= g.q_max; ++q) {
            double cq = half_gs2 * (static_cast<double>(q) * q);
            for (long m = 0; m <= g.n_t; ++m) {
                dd tau = detail::dd_sub(dd(p.horizon_t),
                                        detail::dd_mul(static_cast<double>(m), dt));
                dd drop = detail::dd_mul(tau, cq);
                for (int i = 0; i < g.n_nodes(); ++i) {
                    dd want = detail::dd_sub(
                        detail::dd_mul(static_cast<double>(q), g.node(i)), drop);
                    double e = std::fabs(ff.at(q, m, i) - detail::to_double(want));
                    if (e > sup) sup = e;
                }
            }
        }
        row.err_hjb_a0 = sup;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace quoter::hjb
