#ifndef QUOTER_MODEL_HPP
#define QUOTER_MODEL_HPP

#include "quoter/types.hpp"

namespace quoter::model {

// Premium the FOC adds on top of the reservation skew for the exponential
// intensity family: (1/gamma) * ln(1 + gamma/kappa).
double log_intensity_premium(const ModelParams& p);

// No-trading value function
//   v(x,s,q,t) = -exp(-gamma x) exp(-gamma q s) exp(gamma^2 q^2 sigma^2 (T-t)/2).
// Throws overflow instead of returning +/-inf or a silent 0 for extreme
// exponents.
double frozen_value(const ModelParams& p, const MarketState& st);

// Finite-horizon reservation prices:
//   r_a = s + (1-2q) gamma sigma^2 (T-t)/2,
//   r_b = s + (-1-2q) gamma sigma^2 (T-t)/2.
ReservationPair reservation_prices(const ModelParams& p, const MarketState& st);

// Discounted infinite-horizon utility
//   vbar = 2 exp(-gamma x) exp(-gamma q s) / (gamma^2 q^2 sigma^2 - 2w),
// defined only while w > gamma^2 q^2 sigma^2 / 2.
double stationary_value(const ModelParams& p, const MarketState& st);

// Stationary reservation prices from the vbar indifference equations:
//   rbar_a = s + (1/gamma) ln[(2w - g2s2 q^2)     / (2w - g2s2 (q-1)^2)],
//   rbar_b = s + (1/gamma) ln[(2w - g2s2 (q+1)^2) / (2w - g2s2 q^2)],
// with g2s2 = gamma^2 sigma^2. Requires convergence at q and at the
// post-trade inventories q+1 (bid) / q-1 (ask).
ReservationPair stationary_reservation(const ModelParams& p, double s, int q);

// lambda(delta) = A exp(-kappa delta), delta >= 0.
double intensity(const ModelParams& p, double delta);

// Closed-form expansion coefficients:
//   theta0 = (2A/(kappa+gamma)) (T-t),  theta1 = s,
//   theta2 = -gamma sigma^2 (T-t).
ThetaCoeffs theta_coeffs(const ModelParams& p, double s, double t);

// Reservation prices from the second-order expansion:
//   r_b = theta1 + theta2 (2q+1)/2,  r_a = theta1 + theta2 (2q-1)/2,
//   r_mid = theta1 + theta2 q.
// Coincides with reservation_prices exactly.
ReservationPair asymptotic_reservation(const ModelParams& p, const MarketState& st);

// Total quoted spread gamma sigma^2 (T-t) + (2/gamma) ln(1+gamma/kappa);
// independent of s and q.
double optimal_spread(const ModelParams& p, double t);

// Offsets of the optimal quotes around the mid:
//   delta_b = (s - r_b) + premium,  delta_a = (r_a - s) + premium.
// With clamp set, a negative offset is raised to 0 and flagged. Unclamped,
// delta_a + delta_b equals optimal_spread.
Quote optimal_offsets(const ModelParams& p, const MarketState& st, bool clamp);

// Raw first-order-condition offsets for externally supplied reservation
// prices; never clamps.
Quote offsets_from_reservation(const ModelParams& p, const ReservationPair& r,
                               double s);

}  // namespace quoter::model

#endif  // QUOTER_MODEL_HPP
