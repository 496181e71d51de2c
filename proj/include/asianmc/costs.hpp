#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace asianmc {

/// Proportional cost schedule kappa_n = kappa0 * n^(-alpha).
/// alpha = 1/2 is the asymptotic-hedging regime.
struct CostSchedule {
    double kappa0 = 0.0;
    double alpha = 0.5;
    int n = 1;

    void validate() const {
        if (kappa0 < 0.0) throw std::invalid_argument("CostSchedule: kappa0 must be >= 0");
        if (alpha < 0.0 || alpha > 1.0)
            throw std::invalid_argument("CostSchedule: alpha must lie in [0,1]");
        if (n < 1) throw std::invalid_argument("CostSchedule: n must be >= 1");
    }

    double kappa_n() const { return kappa0 * std::pow(static_cast<double>(n), -alpha); }
};

struct ModifiedVol {
    double sigma_hat = 0.0;
};

/// sigma_hat^2 = sigma^2 + sigma * sqrt(n) * kappa_n * sqrt(8/pi).
/// The adjustment factor is overridable only for mutation-sensitivity
/// checks in the selfcheck suite.
inline ModifiedVol modified_volatility(double sigma, const CostSchedule& schedule,
                                       double adjust_factor = std::sqrt(8.0 / std::numbers::pi)) {
    schedule.validate();
    if (!(sigma > 0.0)) throw std::invalid_argument("modified_volatility: sigma must be > 0");
    const double s2 = sigma * sigma +
                      sigma * std::sqrt(static_cast<double>(schedule.n)) * schedule.kappa_n() *
                          adjust_factor;
    return {std::sqrt(s2)};
}

}  // namespace asianmc
