#ifndef QUOTER_HJB_HPP
#define QUOTER_HJB_HPP

#include <string>
#include <utility>
#include <vector>

#include "quoter/types.hpp"

namespace quoter::hjb {

// Uniform discretization of the (s, t) domain plus integer inventory bounds.
// n_s counts interior price nodes; nodes run i = 0..n_s+1 with spacing h.
// The spacing is snapped to a 40-bit significand when the grid is built so
// node coordinates (and affine data on them) are exactly representable;
// s_max stores the resulting upper bound, keeping h = (s_max - s_min)/(n_s+1)
// exact.
struct Grid {
    double s_min = 0.0;
    double s_max = 0.0;
    double h = 0.0;
    int n_s = 0;
    long n_t = 0;
    int q_min = 0;
    int q_max = 0;

    static Grid make(double s_min, double s_max, int n_s, long n_t, int q_min,
                     int q_max);

    int n_nodes() const { return n_s + 2; }
    int n_q() const { return q_max - q_min + 1; }
    double node(int i) const { return s_min + i * h; }
};

struct SolveReport {
    double sup_error_vs_closed_form = -1.0;  // < 0 when no closed form applies
    long steps = 0;
    double cfl_ratio = 0.0;
    double wall_time_s = 0.0;
    std::vector<std::string> notes;
};

// Scalar field over (s, t): one expansion coefficient theta^(k).
class ScalarField {
public:
    ScalarField(const Grid& g, double horizon_t)
        : grid_(g),
          horizon_(horizon_t),
          v_(static_cast<size_t>(g.n_t + 1) * g.n_nodes(), 0.0) {}

    const Grid& grid() const { return grid_; }
    double horizon() const { return horizon_; }
    double dt() const { return horizon_ / static_cast<double>(grid_.n_t); }
    double at(long m, int i) const { return v_[m * grid_.n_nodes() + i]; }
    double& at(long m, int i) { return v_[m * grid_.n_nodes() + i]; }

private:
    Grid grid_;
    double horizon_;
    std::vector<double> v_;
};

// Full solution theta(s, q, t) on the grid, q-major storage.
class ThetaField {
public:
    ThetaField(const Grid& g, const ModelParams& p, bool clamped)
        : grid_(g),
          params_(p),
          clamped_(clamped),
          v_(static_cast<size_t>(g.n_q()) * (g.n_t + 1) * g.n_nodes(), 0.0) {}

    const Grid& grid() const { return grid_; }
    const ModelParams& params() const { return params_; }
    bool clamped() const { return clamped_; }
    double dt() const {
        return params_.horizon_t / static_cast<double>(grid_.n_t);
    }
    double at(int q, long m, int i) const { return v_[index(q, m, i)]; }
    double& at(int q, long m, int i) { return v_[index(q, m, i)]; }

private:
    size_t index(int q, long m, int i) const {
        size_t qi = static_cast<size_t>(q - grid_.q_min);
        return (qi * (grid_.n_t + 1) + m) * grid_.n_nodes() + i;
    }

    Grid grid_;
    ModelParams params_;
    bool clamped_;
    std::vector<double> v_;
};

// Smallest step count satisfying sigma^2 dt / h^2 <= 1/2, and the smallest
// power of two doing so (the convergence study uses the latter so dt is an
// exact binary fraction of T).
long cfl_min_steps(const ModelParams& p, const Grid& g);
long cfl_pow2_steps(const ModelParams& p, const Grid& g);

// Backward explicit solve of the order-k coefficient equation:
//   k=0: th_t + s2/2 th_ss - g s2/2 (th_s)^2 + 2A/(kappa+gamma) = 0, th(T)=0
//   k=1: th_t + s2/2 th_ss - g s2 th0_s th_s           = 0,          th(T)=s
//   k=2: th_t + s2/2 th_ss - g s2 (th1_s)^2 - g s2 th0_s th_s = 0,   th(T)=0
// Lower-order inputs default to their closed forms; pass solved fields to
// chain numerically. The report carries the sup-norm error against the
// closed form over the whole (s, t) history.
std::pair<ScalarField, SolveReport> solve_theta_k(
    const ModelParams& p, const Grid& g, int k,
    const ScalarField* theta0 = nullptr, const ScalarField* theta1 = nullptr);

// Backward explicit solve of the coupled-in-q equation
//   th_t + s2/2 th_ss - g s2/2 (th_s)^2
//        + A/(kappa+gamma) [exp(-kappa db*) + exp(-kappa da*)] = 0,
//   th(s,q,T) = q s,
// with db* = s - (th(q+1)-th(q)) + premium, da* = (th(q)-th(q-1)) - s +
// premium. With clamp set, negative offsets are raised to 0 inside the fill
// term. The buy side is dropped at q_max and the sell side at q_min; the
// s-boundary uses zero second derivative (linear extrapolation). Internally
// the solver steps the deviation phi = th - q s, which keeps the affine part
// of the solution exact.
std::pair<ThetaField, SolveReport> solve_full_hjb(const ModelParams& p,
                                                  const Grid& g, bool clamp);

// Quotes from the solved field at an interior inventory level: bilinear
// interpolation of theta(q), theta(q+-1) in (s, t), then the FOC offsets,
// clamped per the field's setting.
Quote extract_quotes(const ThetaField& f, double s, int q, double t);

// One-sided variant for inventory caps: skips the side whose neighbor row
// does not exist. At least one side must be requested and representable.
Quote extract_quote_sides(const ThetaField& f, double s, int q, double t,
                          bool want_bid, bool want_ask);

// Line-oriented dump "s,q,t,theta"; one file per solve. Scalar fields write
// q = 0 on every row (the coefficient is inventory-independent).
void dump_csv(const ScalarField& f, const std::string& path);
void dump_csv(const ThetaField& f, const std::string& path);

struct ConvergenceRow {
    int level = 0;
    int n_s = 0;
    long n_t = 0;
    double h = 0.0;
    double dt = 0.0;
    double err_theta0 = 0.0;
    double err_theta1 = 0.0;
    double err_theta2 = 0.0;
    double err_hjb_a0 = 0.0;
};

// Refinement study: n_s doubles per level, n_t is the smallest power of two
// within the CFL bound. theta solves are chained (each order consumes the
// solved lower orders); the full-HJB column runs with A = 0 against the
// frozen closed form q s - gamma sigma^2 q^2 (T-t)/2.
std::vector<ConvergenceRow> convergence_study(const ModelParams& p,
                                              const Grid& base, int levels);

// Empirical order log2(e_l / e_{l+1}); +inf when the finer error is at the
// exact-zero floor.
double empirical_order(double coarse, double fine);

}  // namespace quoter::hjb

#endif  // QUOTER_HJB_HPP
