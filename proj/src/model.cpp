#include "quoter/model.hpp"

#include <cmath>

namespace quoter::model {

namespace {

// Largest exponent exp() can take before overflowing a double; below the
// negative of it the result underflows to 0, which would poison residual
// ratios downstream, so both directions are reported.
constexpr double kExpLimit = 709.0;

double checked_neg_exp(double exponent) {
    if (exponent > kExpLimit)
        throw Error(ErrorCode::overflow, "utility exponent overflows");
    if (exponent < -745.0)
        throw Error(ErrorCode::overflow, "utility exponent underflows to 0");
    return -std::exp(exponent);
}

}  // namespace

double log_intensity_premium(const ModelParams& p) {
    return std::log1p(p.gamma / p.kappa) / p.gamma;
}

double frozen_value(const ModelParams& p, const MarketState& st) {
    validate_params(p);
    validate_time(p, st.t);
    double tau = p.horizon_t - st.t;
    double q = st.q;
    double exponent = -p.gamma * st.x - p.gamma * q * st.s +
                      0.5 * p.gamma * p.gamma * q * q * sigma_sq(p) * tau;
    return checked_neg_exp(exponent);
}

ReservationPair reservation_prices(const ModelParams& p, const MarketState& st) {
    validate_params(p);
    validate_time(p, st.t);
    double tau = p.horizon_t - st.t;
    double half = 0.5 * p.gamma * sigma_sq(p) * tau;
    ReservationPair r;
    r.r_a = st.s + (1.0 - 2.0 * st.q) * half;
    r.r_b = st.s + (-1.0 - 2.0 * st.q) * half;
    r.r_mid = st.s - st.q * (p.gamma * sigma_sq(p) * tau);
    return r;
}

double stationary_value(const ModelParams& p, const MarketState& st) {
    validate_params(p);
    validate_discount(p);
    double q = st.q;
    double g2q2s2 = p.gamma * p.gamma * q * q * sigma_sq(p);
    if (p.discount_w <= 0.5 * g2q2s2)
        throw Error(ErrorCode::divergent_horizon,
                    "stationary integral diverges: w <= gamma^2 q^2 sigma^2 / 2");
    double exponent = -p.gamma * st.x - p.gamma * q * st.s;
    double numer = 2.0 * std::exp(exponent);
    if (!std::isfinite(numer) || numer == 0.0)
        throw Error(ErrorCode::overflow, "stationary utility exponent out of range");
    return numer / (g2q2s2 - 2.0 * p.discount_w);
}

ReservationPair stationary_reservation(const ModelParams& p, double s, int q) {
    validate_params(p);
    validate_discount(p);
    double g2s2 = p.gamma * p.gamma * sigma_sq(p);
    double w2 = 2.0 * p.discount_w;
    double dq = w2 - g2s2 * q * q;
    if (dq <= 0.0)
        throw Error(ErrorCode::divergent_horizon,
                    "stationary integral diverges at current inventory");
    // Indifference compares vbar at q with vbar at q+1 (bid) / q-1 (ask);
    // the log argument is the ratio of the two convergence denominators.
    double d_up = w2 - g2s2 * (q + 1.0) * (q + 1.0);
    double d_dn = w2 - g2s2 * (q - 1.0) * (q - 1.0);
    if (d_up <= 0.0 || d_dn <= 0.0)
        throw Error(ErrorCode::nonpositive_log_argument,
                    "stationary integral diverges at post-trade inventory q+-1");
    ReservationPair r;
    r.r_a = s + std::log(dq / d_dn) / p.gamma;
    r.r_b = s + std::log(d_up / dq) / p.gamma;
    r.r_mid = 0.5 * (r.r_a + r.r_b);
    return r;
}

double intensity(const ModelParams& p, double delta) {
    validate_params(p);
    if (delta < 0.0)
        throw Error(ErrorCode::negative_offset, "intensity requires delta >= 0");
    return p.big_a * std::exp(-p.kappa * delta);
}

ThetaCoeffs theta_coeffs(const ModelParams& p, double s, double t) {
    validate_params(p);
    validate_time(p, t);
    double tau = p.horizon_t - t;
    ThetaCoeffs c;
    c.theta0 = (2.0 * p.big_a / (p.kappa + p.gamma)) * tau;
    c.theta1 = s;
    c.theta2 = -(p.gamma * sigma_sq(p)) * tau;
    return c;
}

ReservationPair asymptotic_reservation(const ModelParams& p, const MarketState& st) {
    ThetaCoeffs c = theta_coeffs(p, st.s, st.t);
    ReservationPair r;
    r.r_b = c.theta1 + 0.5 * c.theta2 * (2.0 * st.q + 1.0);
    r.r_a = c.theta1 + 0.5 * c.theta2 * (2.0 * st.q - 1.0);
    r.r_mid = c.theta1 + c.theta2 * st.q;
    return r;
}

double optimal_spread(const ModelParams& p, double t) {
    validate_params(p);
    validate_time(p, t);
    double tau = p.horizon_t - t;
    return p.gamma * sigma_sq(p) * tau + 2.0 * log_intensity_premium(p);
}

Quote optimal_offsets(const ModelParams& p, const MarketState& st, bool clamp) {
    ReservationPair r = asymptotic_reservation(p, st);
    Quote quote = offsets_from_reservation(p, r, st.s);
    if (clamp) {
        if (quote.delta_b < 0.0) {
            quote.delta_b = 0.0;
            quote.clamped_b = true;
        }
        if (quote.delta_a < 0.0) {
            quote.delta_a = 0.0;
            quote.clamped_a = true;
        }
        quote.p_b = st.s - quote.delta_b;
        quote.p_a = st.s + quote.delta_a;
    }
    return quote;
}

Quote offsets_from_reservation(const ModelParams& p, const ReservationPair& r,
                               double s) {
    validate_params(p);
    double premium = log_intensity_premium(p);
    Quote q;
    q.delta_b = (s - r.r_b) + premium;
    q.delta_a = (r.r_a - s) + premium;
    q.p_b = s - q.delta_b;
    q.p_a = s + q.delta_a;
    return q;
}

}  // namespace quoter::model
