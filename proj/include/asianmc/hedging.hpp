#pragma once

#include <vector>

#include <Eigen/Core>

#include "asianmc/costs.hpp"
#include "asianmc/paths.hpp"
#include "asianmc/pricing.hpp"

namespace asianmc {

/// Piecewise-constant delta: gamma[j] is held on (t_j, t_{j+1}] with
/// t_j = j/n on the rebalance grid.
struct HedgeStrategy {
    TimeGrid grid;          // rebalance grid, n intervals
    Eigen::VectorXd gamma;  // size n
};

struct HedgeOutcome {
    double v0 = 0.0;
    double v1 = 0.0;
    double payoff = 0.0;
    double error = 0.0;           // v1 - payoff
    double total_cost = 0.0;      // kappa_n * trading_volume
    double trading_volume = 0.0;  // J_n = sum S_{t_j} |gamma_j - gamma_{j-1}|
};

struct HedgeConfig {
    int pool_size = 16384;
    int n_inner = 0;             // 0 -> use the rebalance count
    int refine = 1;              // asset path grid = n * refine intervals
    int threads = 1;
    bool charge_initial = false; // charge the opening trade at S_{t_1}
    double dyy_bump = 0.02;      // relative y-bump for the pool second difference
    std::int64_t v0_samples = 500000;  // 0 -> price v0 from the pool instead
    double vol_adjust = 0.0;     // 0 -> sqrt(8/pi); nonzero only for mutation checks
};

/// gamma_j from the pool delta under sigma_hat at (t_j, xi_j, S_j),
/// saturated to 1 - t_j when xi_j >= K and clamped to [0, 1 - t_j].
/// The path grid must be a refinement of the rebalance grid.
HedgeStrategy build_leland_strategy(const AssetPath& path, const MarketParams& params,
                                    double sigma_hat, int n, const EtaPool& pool,
                                    int threads = 1);

/// Self-financed portfolio with proportional costs:
/// v1 = v0 + sum gamma_j (S_{j+1} - S_j) - kappa_n * J_n, exactly.
HedgeOutcome simulate_hedge(const AssetPath& path, const HedgeStrategy& strategy,
                            double kappa_n, double v0, double strike,
                            bool charge_initial = false);

/// Replication under the unmodified volatility with zero costs;
/// v0 is the pool price at (0, 0, S_0).
HedgeOutcome exact_hedge_no_cost(const AssetPath& path, const MarketParams& params, int n,
                                 const EtaPool& pool, int threads = 1);

/// Both sides of the cost-compensator mechanism on one path:
/// lhs = kappa_n J_n, rhs = ((sigma_hat^2 - sigma^2)/2) sum G''_yy S^2 dt.
struct CompensatorPair {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;  // lhs / rhs, 0 when rhs == 0
};

CompensatorPair compensator_check(const AssetPath& path, const MarketParams& params,
                                  const CostSchedule& schedule, const EtaPool& pool,
                                  const HedgeConfig& cfg = {});

/// lhs = n^{-1/2} sum beta_{j-1} |S_j - S_{j-1}|,
/// rhs = sqrt(2/pi) sigma sum beta_j S_j dt (left rule); lhs -> rhs as n grows.
struct Lemma3Pair {
    double lhs = 0.0;
    double rhs = 0.0;
};

Lemma3Pair lemma3_statistic(const AssetPath& path, const Eigen::VectorXd& beta,
                            double sigma);

struct ConvergenceRow {
    int n = 0;
    double mean_err = 0.0;
    double se = 0.0;
    double mean_abs_err = 0.0;
    double rms_err = 0.0;
    double err_variance = 0.0;
    double mean_cost = 0.0;
    double compensator_ratio = 0.0;  // mean lhs / mean rhs
    std::int64_t paths = 0;
};

struct ConvergenceReport {
    double sigma = 0.0;
    double kappa0 = 0.0;
    double alpha = 0.0;
    double v0 = 0.0;  // from the largest-n run
    std::vector<ConvergenceRow> rows;
};

/// Monte Carlo over M independent asset paths per n in n_list (ascending).
/// One frozen pricing pool per n; dates are processed pool-view by
/// pool-view so memory stays flat in n.
ConvergenceReport convergence_study(const MarketParams& params, double kappa0, double alpha,
                                    const std::vector<int>& n_list, std::int64_t paths,
                                    RngSeed seed, const HedgeConfig& cfg = {});

}  // namespace asianmc
