#include "asianmc/hedging.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "asianmc/stats.hpp"

namespace asianmc {

namespace {

/// Checks that the path grid refines the rebalance grid and returns the
/// stride mapping rebalance node j to path node j * stride.
int refinement_stride(const TimeGrid& path_grid, int n) {
    if (n < 1) throw std::invalid_argument("hedging: rebalance count must be >= 1");
    if (path_grid.n % n != 0)
        throw std::invalid_argument("hedging: path grid must refine the rebalance grid");
    return path_grid.n / n;
}

double gamma_at(const EtaPool::View& view, double xi, double s, double strike, double v) {
    if (xi >= strike) return v;  // saturated in-the-money branch
    return std::clamp(view.g_dy_exact(xi, s, strike), 0.0, v);
}

}  // namespace

HedgeStrategy build_leland_strategy(const AssetPath& path, const MarketParams& params,
                                    double sigma_hat, int n, const EtaPool& pool,
                                    int threads) {
    if (!(sigma_hat > 0.0))
        throw std::invalid_argument("build_leland_strategy: sigma_hat must be > 0");
    const int stride = refinement_stride(path.grid, n);
    HedgeStrategy strategy;
    strategy.grid = make_grid(n);
    strategy.gamma.resize(n);
    for (int j = 0; j < n; ++j) {
        const double v = 1.0 - strategy.grid.time(j);
        const EtaPool::View view = pool.view(sigma_hat, v, threads);
        strategy.gamma[j] = gamma_at(view, path.xi[j * stride], path.s[j * stride],
                                     params.strike, v);
    }
    return strategy;
}

HedgeOutcome simulate_hedge(const AssetPath& path, const HedgeStrategy& strategy,
                            double kappa_n, double v0, double strike,
                            bool charge_initial) {
    if (kappa_n < 0.0) throw std::invalid_argument("simulate_hedge: kappa_n must be >= 0");
    const int n = strategy.grid.n;
    const int stride = refinement_stride(path.grid, n);
    // the position change at t_j is charged at the next revision price
    // S_{t_{j+1}}, matching the trading-volume sum
    double gains = 0.0;
    double volume = charge_initial ? path.s[stride] * std::abs(strategy.gamma[0]) : 0.0;
    for (int j = 0; j < n; ++j) {
        gains += strategy.gamma[j] * (path.s[(j + 1) * stride] - path.s[j * stride]);
        if (j >= 1)
            volume += path.s[(j + 1) * stride] *
                      std::abs(strategy.gamma[j] - strategy.gamma[j - 1]);
    }
    HedgeOutcome out;
    out.v0 = v0;
    out.trading_volume = volume;
    out.total_cost = kappa_n * volume;
    out.v1 = v0 + gains - out.total_cost;
    out.payoff = asian_payoff(path, strike);
    out.error = out.v1 - out.payoff;
    return out;
}

HedgeOutcome exact_hedge_no_cost(const AssetPath& path, const MarketParams& params, int n,
                                 const EtaPool& pool, int threads) {
    params.validate();
    const HedgeStrategy strategy =
        build_leland_strategy(path, params, params.sigma, n, pool, threads);
    const double v0 =
        pool.view(params.sigma, 1.0, threads).g(0.0, params.s0, params.strike);
    return simulate_hedge(path, strategy, 0.0, v0, params.strike);
}

CompensatorPair compensator_check(const AssetPath& path, const MarketParams& params,
                                  const CostSchedule& schedule, const EtaPool& pool,
                                  const HedgeConfig& cfg) {
    params.validate();
    const double sigma_hat = modified_volatility(params.sigma, schedule).sigma_hat;
    const int n = schedule.n;
    const int stride = refinement_stride(path.grid, n);
    const double dt = 1.0 / n;
    const double half_spread = 0.5 * (sigma_hat * sigma_hat - params.sigma * params.sigma);
    CompensatorPair out;
    double volume = 0.0;
    double gamma_prev = 0.0;
    for (int j = 0; j < n; ++j) {
        const double v = 1.0 - static_cast<double>(j) / n;
        const EtaPool::View view = pool.view(sigma_hat, v, cfg.threads);
        const double xi = path.xi[j * stride];
        const double s = path.s[j * stride];
        const double gamma = gamma_at(view, xi, s, params.strike, v);
        if (j >= 1) volume += path.s[(j + 1) * stride] * std::abs(gamma - gamma_prev);
        gamma_prev = gamma;
        if (xi < params.strike)
            out.rhs += half_spread * view.g_dyy(xi, s, params.strike, cfg.dyy_bump * s) *
                       s * s * dt;
    }
    out.lhs = schedule.kappa_n() * volume;
    out.ratio = out.rhs != 0.0 ? out.lhs / out.rhs : 0.0;
    return out;
}

Lemma3Pair lemma3_statistic(const AssetPath& path, const Eigen::VectorXd& beta,
                            double sigma) {
    const int n = path.grid.n;
    if (beta.size() != n + 1)
        throw std::invalid_argument("lemma3_statistic: beta must have one weight per node");
    Lemma3Pair out;
    for (int j = 1; j <= n; ++j) out.lhs += beta[j - 1] * std::abs(path.s[j] - path.s[j - 1]);
    out.lhs /= std::sqrt(static_cast<double>(n));
    for (int j = 0; j < n; ++j) out.rhs += beta[j] * path.s[j];
    out.rhs *= std::sqrt(2.0 / std::numbers::pi) * sigma * path.grid.dt();
    return out;
}

ConvergenceReport convergence_study(const MarketParams& params, double kappa0, double alpha,
                                    const std::vector<int>& n_list, std::int64_t paths,
                                    RngSeed seed, const HedgeConfig& cfg) {
    params.validate();
    if (paths < 2) throw std::invalid_argument("convergence_study: need at least 2 paths");
    if (!std::is_sorted(n_list.begin(), n_list.end()))
        throw std::invalid_argument("convergence_study: n_list must be ascending");

    ConvergenceReport report;
    report.sigma = params.sigma;
    report.kappa0 = kappa0;
    report.alpha = alpha;

    const std::int64_t m = paths;
    const int chunks = 64;

    for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
        const int n = n_list[ni];
        CostSchedule schedule{kappa0, alpha, n};
        schedule.validate();
        const double sigma_hat =
            cfg.vol_adjust > 0.0
                ? modified_volatility(params.sigma, schedule, cfg.vol_adjust).sigma_hat
                : modified_volatility(params.sigma, schedule).sigma_hat;
        const double half_spread =
            0.5 * (sigma_hat * sigma_hat - params.sigma * params.sigma);
        const int n_inner = cfg.n_inner > 0 ? cfg.n_inner : n;
        const int refine = std::max(1, cfg.refine);
        const TimeGrid path_grid = make_grid(n * refine);
        const double dt = 1.0 / n;

        const EtaPool pool(cfg.pool_size, n_inner,
                           seed.next_stream(1 + static_cast<std::uint64_t>(ni)));

        // path states at the rebalance nodes; payoff from the refined grid
        Eigen::MatrixXd s(m, n + 1), xi(m, n + 1);
        Eigen::VectorXd f1(m);
        parallel_chunks(chunks, cfg.threads, [&](int c) {
            const std::int64_t lo = m * c / chunks;
            const std::int64_t hi = m * (c + 1) / chunks;
            for (std::int64_t i = lo; i < hi; ++i) {
                const WienerPath w = sample_wiener(
                    path_grid, seed.next_stream(1000000 * (ni + 1) +
                                                static_cast<std::uint64_t>(i)));
                const AssetPath path = gbm_path(params, w);
                f1[i] = asian_payoff(path, params.strike);
                for (int j = 0; j <= n; ++j) {
                    s(i, j) = path.s[j * refine];
                    xi(i, j) = path.xi[j * refine];
                }
            }
        });

        // date-major sweep sharing one pool view across all paths
        Eigen::VectorXd gains = Eigen::VectorXd::Zero(m);
        Eigen::VectorXd volume = Eigen::VectorXd::Zero(m);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
        Eigen::VectorXd gamma_prev = Eigen::VectorXd::Zero(m);
        // independent high-sample price for the initial capital; the pool
        // price would put its own O(P^{-1/2}) bias into every error
        double v0 = 0.0;
        if (cfg.v0_samples > 0) {
            PricingConfig pc;
            pc.samples = cfg.v0_samples;
            pc.n_inner = n_inner;
            pc.threads = cfg.threads;
            v0 = g_value(0.0, 0.0, params.s0, params.strike, sigma_hat,
                         seed.next_stream(500 + static_cast<std::uint64_t>(ni)), pc)
                     .value;
        }
        for (int j = 0; j < n; ++j) {
            const double v = 1.0 - static_cast<double>(j) / n;
            const EtaPool::View view = pool.view(sigma_hat, v, cfg.threads);
            if (j == 0 && cfg.v0_samples <= 0) v0 = view.g(0.0, params.s0, params.strike);
            parallel_chunks(chunks, cfg.threads, [&](int c) {
                const std::int64_t lo = m * c / chunks;
                const std::int64_t hi = m * (c + 1) / chunks;
                for (std::int64_t i = lo; i < hi; ++i) {
                    const double gamma =
                        gamma_at(view, xi(i, j), s(i, j), params.strike, v);
                    gains[i] += gamma * (s(i, j + 1) - s(i, j));
                    if (j >= 1)
                        volume[i] += s(i, j + 1) * std::abs(gamma - gamma_prev[i]);
                    else if (cfg.charge_initial)
                        volume[i] += s(i, 1) * std::abs(gamma);
                    gamma_prev[i] = gamma;
                    if (half_spread > 0.0 && xi(i, j) < params.strike)
                        rhs[i] += half_spread *
                                  view.g_dyy(xi(i, j), s(i, j), params.strike,
                                             cfg.dyy_bump * s(i, j)) *
                                  s(i, j) * s(i, j) * dt;
                }
            });
        }

        const double kappa_n = schedule.kappa_n();
        RunningStat err_stat, abs_stat, cost_stat, rhs_stat;
        double sq_sum = 0.0;
        for (std::int64_t i = 0; i < m; ++i) {
            const double v1 = v0 + gains[i] - kappa_n * volume[i];
            const double err = v1 - f1[i];
            err_stat.add(err);
            abs_stat.add(std::abs(err));
            cost_stat.add(kappa_n * volume[i]);
            rhs_stat.add(rhs[i]);
            sq_sum += err * err;
        }

        ConvergenceRow row;
        row.n = n;
        row.mean_err = err_stat.mean();
        row.se = err_stat.se();
        row.mean_abs_err = abs_stat.mean();
        row.rms_err = std::sqrt(sq_sum / static_cast<double>(m));
        row.err_variance = err_stat.variance();
        row.mean_cost = cost_stat.mean();
        row.compensator_ratio =
            rhs_stat.mean() != 0.0 ? cost_stat.mean() / rhs_stat.mean() : 0.0;
        row.paths = m;
        report.rows.push_back(row);
        report.v0 = v0;
    }
    return report;
}

}  // namespace asianmc
