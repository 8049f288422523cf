#ifndef QUOTER_TYPES_HPP
#define QUOTER_TYPES_HPP

#include <cmath>
#include <stdexcept>
#include <string>

namespace quoter {

// Status codes shared with the C API (see include/quoter.h); values must stay
// in sync.
enum class ErrorCode : int {
    ok = 0,
    invalid_argument = 1,
    invalid_params = 2,
    invalid_time = 3,
    divergent_horizon = 4,
    nonpositive_log_argument = 5,
    negative_offset = 6,
    overflow = 7,
    cfl_violation = 8,
    grid_too_small = 9,
    out_of_grid = 10,
    nonfinite_field = 11,
    invalid_config = 12,
    bracket_miss = 13,
    io_error = 14,
    internal = 15,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

// Full parameter set of the quoting model. discount_w is only consulted by
// the stationary (infinite-horizon) operations; 0 means "not set".
struct ModelParams {
    double sigma = 0.0;       // mid-price volatility per sqrt(time)
    double gamma = 0.0;       // risk aversion, 1/currency
    double big_a = 0.0;       // base fill intensity A, fills/time
    double kappa = 0.0;       // fill intensity decay, 1/currency
    double horizon_t = 0.0;   // terminal time T
    double discount_w = 0.0;  // stationary discount w (> 0 when used)
};

// Instantaneous market snapshot fed to the pricing operations.
struct MarketState {
    double s = 0.0;  // mid-price
    double t = 0.0;  // current time in [0, T]
    int q = 0;       // inventory, signed share count
    double x = 0.0;  // cash
};

// Bid/ask offsets and the absolute prices they imply. p_b = s - delta_b and
// p_a = s + delta_a always hold; the clamped flags record whether a negative
// raw offset was raised to zero.
struct Quote {
    double delta_b = 0.0;
    double delta_a = 0.0;
    double p_b = 0.0;
    double p_a = 0.0;
    bool clamped_b = false;
    bool clamped_a = false;
};

struct ReservationPair {
    double r_a = 0.0;
    double r_b = 0.0;
    double r_mid = 0.0;  // (r_a + r_b) / 2
};

// Coefficients of the expansion theta ~ theta0 + q*theta1 + q^2/2*theta2.
struct ThetaCoeffs {
    double theta0 = 0.0;  // level, currency
    double theta1 = 0.0;  // linear coefficient, equals s
    double theta2 = 0.0;  // quadratic coefficient, currency/share
};

inline double sigma_sq(const ModelParams& p) { return p.sigma * p.sigma; }

// sigma and big_a admit 0 (the degenerate diffusion and no-fill cases are
// meaningful oracles); everything else is strictly positive.
inline void validate_params(const ModelParams& p) {
    if (!(p.sigma >= 0.0) || !std::isfinite(p.sigma))
        throw Error(ErrorCode::invalid_params, "sigma must be >= 0");
    if (!(p.gamma > 0.0) || !std::isfinite(p.gamma))
        throw Error(ErrorCode::invalid_params, "gamma must be > 0");
    if (!(p.big_a >= 0.0) || !std::isfinite(p.big_a))
        throw Error(ErrorCode::invalid_params, "big_a must be >= 0");
    if (!(p.kappa > 0.0) || !std::isfinite(p.kappa))
        throw Error(ErrorCode::invalid_params, "kappa must be > 0");
    if (!(p.horizon_t > 0.0) || !std::isfinite(p.horizon_t))
        throw Error(ErrorCode::invalid_params, "horizon_t must be > 0");
}

inline void validate_discount(const ModelParams& p) {
    if (!(p.discount_w > 0.0) || !std::isfinite(p.discount_w))
        throw Error(ErrorCode::invalid_params, "discount_w must be > 0");
}

inline void validate_time(const ModelParams& p, double t) {
    if (!(t >= 0.0) || !(t <= p.horizon_t))
        throw Error(ErrorCode::invalid_time,
                    "t = " + std::to_string(t) + " outside [0, " +
                        std::to_string(p.horizon_t) + "]");
}

}  // namespace quoter

#endif  // QUOTER_TYPES_HPP
