#pragma once

#include <Eigen/Core>

#include "asianmc/costs.hpp"
#include "asianmc/paths.hpp"
#include "asianmc/rng.hpp"

namespace asianmc {

struct GEstimate {
    double value = 0.0;
    double se = 0.0;
    std::int64_t samples = 0;
    double t = 0.0, x = 0.0, y = 0.0;
    double sigma = 0.0, strike = 0.0;
};

struct OptionCost {
    double c0 = 0.0;
    double se = 0.0;
    double sigma = 0.0, s0 = 0.0, strike = 0.0;
    std::int64_t samples = 0;
    int n_inner = 0;
};

/// Monte Carlo estimator form for E(x + y*eta - K)_+.  Call averages the
/// payoff directly; Parity prices the bounded put side and adds
/// x + y*v - K, exploiting that the discretized eta has mean v exactly.
/// Parity keeps the variance bounded at large volatility.
enum class EstimatorForm { Call, Parity };

struct PricingConfig {
    std::int64_t samples = 100000;  // L
    int n_inner = 100;              // N
    EstimatorForm form = EstimatorForm::Call;
    int threads = 1;
    int chunks = 64;
};

/// One left-Riemann sample of the exponential functional over the
/// remaining horizon [0, 1-t].
double eta_sample(double t, double sigma, int n_inner, NormalStream& rng);

GEstimate g_value(double t, double x, double y, double strike, double sigma, RngSeed seed,
                  const PricingConfig& cfg = {});

/// Forward-difference dG/dy with common random numbers; exact (x >= K)
/// saturation returns 1-t with zero error.  Clamped to [0, 1-t].
GEstimate g_dy(double t, double x, double y, double strike, double sigma, RngSeed seed,
               const PricingConfig& cfg = {}, double bump = -1.0);

/// Second derivative in y.  The default route evaluates the closed form
/// b^2 q(v,b) / y through the density engine (the y-derivative of
/// dG/dy = int_b^inf z q dz taken through b = (K-x)/y); the fallback is
/// a central second difference with common random numbers.
enum class SecondDerivRoute { Density, FiniteDifference };

GEstimate g_dyy(double t, double x, double y, double strike, double sigma, RngSeed seed,
                const PricingConfig& cfg = {},
                SecondDerivRoute route = SecondDerivRoute::Density,
                std::int64_t density_bridges = 20000);

OptionCost option_cost(const MarketParams& params, RngSeed seed,
                       const PricingConfig& cfg = {});

/// option_cost with sigma replaced by the Leland-adjusted volatility.
OptionCost modified_option_cost(const MarketParams& params, const CostSchedule& schedule,
                                RngSeed seed, const PricingConfig& cfg = {});

/// Frozen pool of standard normal increments shared across evaluation
/// dates (common random numbers in the remaining-time parameter).
class EtaPool {
public:
    EtaPool(int pool_size, int n_inner, RngSeed seed);

    int pool_size() const { return static_cast<int>(increments_.rows()); }
    int n_inner() const { return static_cast<int>(increments_.cols()) + 1; }

    /// Sorted eta samples at remaining time v plus suffix sums, giving
    /// O(log P) exact evaluation of pool averages of (x + y*eta - K)_+.
    struct View {
        double v = 0.0;
        Eigen::VectorXd sorted;  // ascending
        Eigen::VectorXd suffix;  // suffix[i] = sum of sorted[i..P-1], suffix[P] = 0
        double mean = 0.0;

        double g(double x, double y, double strike) const;
        double g_dy(double x, double y, double strike, double bump) const;
        /// Exact derivative of the pool average: (1/P) sum eta 1{x + y*eta > K}.
        double g_dy_exact(double x, double y, double strike) const;
        double g_dyy(double x, double y, double strike, double bump) const;
    };

    /// View construction is exact given the frozen increments, so the
    /// thread count never changes the result.
    View view(double sigma, double v, int threads = 1) const;

private:
    Eigen::MatrixXf increments_;  // pool_size x (n_inner - 1), standard normal
};

}  // namespace asianmc
