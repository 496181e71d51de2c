#include "asianmc/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "asianmc/bridge.hpp"
#include "asianmc/stats.hpp"

namespace asianmc {

namespace {

double normal_pdf(double a) {
    return std::exp(-0.5 * a * a) / std::sqrt(2.0 * std::numbers::pi);
}

void check_common(double t, double y, std::int64_t L, int n_inner) {
    if (t < 0.0 || t > 1.0) throw std::invalid_argument("pricing: t must lie in [0,1]");
    if (y < 0.0) throw std::invalid_argument("pricing: y must be >= 0");
    if (L < 1) throw std::invalid_argument("pricing: sample count must be >= 1");
    if (n_inner < 1) throw std::invalid_argument("pricing: n_inner must be >= 1");
}

/// Chunked Monte Carlo mean of fn(eta) over eta samples at remaining time 1-t.
RunningStat mc_over_eta(double t, double sigma, RngSeed seed, const PricingConfig& cfg,
                        const std::function<double(double)>& fn) {
    const int chunks = std::max(1, cfg.chunks);
    std::vector<RunningStat> stats(chunks);
    parallel_chunks(chunks, cfg.threads, [&](int c) {
        const std::int64_t lo = cfg.samples * c / chunks;
        const std::int64_t hi = cfg.samples * (c + 1) / chunks;
        NormalStream rng(seed.next_stream(static_cast<std::uint64_t>(c)));
        for (std::int64_t i = lo; i < hi; ++i)
            stats[c].add(fn(eta_sample(t, sigma, cfg.n_inner, rng)));
    });
    RunningStat total;
    for (const auto& s : stats) total.merge(s);
    return total;
}

}  // namespace

double eta_sample(double t, double sigma, int n_inner, NormalStream& rng) {
    if (t >= 1.0) throw std::invalid_argument("eta_sample: t must be < 1");
    if (t < 0.0) throw std::invalid_argument("eta_sample: t must be >= 0");
    const double v = 1.0 - t;
    const double du = v / n_inner;
    const double sd = std::sqrt(du);
    double wsum = 0.0, acc = 1.0;
    for (int k = 1; k < n_inner; ++k) {
        wsum += sd * rng();
        acc += std::exp(sigma * wsum - 0.5 * sigma * sigma * k * du);
    }
    return acc * du;
}

GEstimate g_value(double t, double x, double y, double strike, double sigma, RngSeed seed,
                  const PricingConfig& cfg) {
    check_common(t, y, cfg.samples, cfg.n_inner);
    GEstimate out;
    out.t = t;
    out.x = x;
    out.y = y;
    out.sigma = sigma;
    out.strike = strike;
    const double v = 1.0 - t;
    if (t == 1.0) {
        out.value = std::max(x - strike, 0.0);
        return out;
    }
    if (y == 0.0) {
        out.value = std::max(x - strike, 0.0);
        return out;
    }
    RunningStat stat;
    if (cfg.form == EstimatorForm::Call) {
        stat = mc_over_eta(t, sigma, seed, cfg,
                           [&](double eta) { return std::max(x + y * eta - strike, 0.0); });
        out.value = stat.mean();
    } else {
        stat = mc_over_eta(t, sigma, seed, cfg,
                           [&](double eta) { return std::max(strike - x - y * eta, 0.0); });
        out.value = x + y * v - strike + stat.mean();
    }
    out.se = stat.se();
    out.samples = stat.count();
    return out;
}

GEstimate g_dy(double t, double x, double y, double strike, double sigma, RngSeed seed,
               const PricingConfig& cfg, double bump) {
    check_common(t, y, cfg.samples, cfg.n_inner);
    if (!(y > 0.0)) throw std::invalid_argument("g_dy: y must be > 0");
    GEstimate out;
    out.t = t;
    out.x = x;
    out.y = y;
    out.sigma = sigma;
    out.strike = strike;
    const double v = 1.0 - t;
    if (x >= strike) {
        // saturated branch: G = x + y v - K, so dG/dy = v exactly
        out.value = v;
        return out;
    }
    if (t == 1.0) return out;  // value 0, no time left
    if (bump <= 0.0) bump = std::max(1e-4, 1e-4 * y);
    const double d = bump;
    const RunningStat stat = mc_over_eta(t, sigma, seed, cfg, [&](double eta) {
        return (std::max(x + (y + d) * eta - strike, 0.0) -
                std::max(x + y * eta - strike, 0.0)) /
               d;
    });
    out.value = std::clamp(stat.mean(), 0.0, v);
    out.se = stat.se();
    out.samples = stat.count();
    return out;
}

GEstimate g_dyy(double t, double x, double y, double strike, double sigma, RngSeed seed,
                const PricingConfig& cfg, SecondDerivRoute route,
                std::int64_t density_bridges) {
    check_common(t, y, cfg.samples, cfg.n_inner);
    if (!(y > 0.0)) throw std::invalid_argument("g_dyy: y must be > 0");
    GEstimate out;
    out.t = t;
    out.x = x;
    out.y = y;
    out.sigma = sigma;
    out.strike = strike;
    const double v = 1.0 - t;
    if (x >= strike || t == 1.0) return out;  // b = 0: flat in y

    if (route == SecondDerivRoute::FiniteDifference) {
        const double h = 1e-2 * y;
        const RunningStat stat = mc_over_eta(t, sigma, seed, cfg, [&](double eta) {
            const double up = std::max(x + (y + h) * eta - strike, 0.0);
            const double mid = std::max(x + y * eta - strike, 0.0);
            const double dn = std::max(x + (y - h) * eta - strike, 0.0);
            return (up - 2.0 * mid + dn) / (h * h);
        });
        out.value = stat.mean();
        out.se = stat.se();
        out.samples = stat.count();
        return out;
    }

    // closed form b^2 q(v,b) / y: differentiate the delta
    // dG/dy = int_b^inf z q dz once more in y through b = (K-x)/y
    const double b = (strike - x) / y;
    const double c_q = b * b / y;
    const int chunks = 64;
    const TimeGrid quad_grid = make_grid(512);
    std::vector<RunningStat> stats(chunks);
    std::vector<std::int64_t> discards(chunks, 0);
    parallel_chunks(chunks, cfg.threads, [&](int c) {
        const std::int64_t lo = density_bridges * c / chunks;
        const std::int64_t hi = density_bridges * (c + 1) / chunks;
        NormalStream rng(seed.next_stream(1000 + static_cast<std::uint64_t>(c)));
        const double sd = std::sqrt(quad_grid.dt());
        Eigen::VectorXd w(quad_grid.points());
        for (std::int64_t i = lo; i < hi; ++i) {
            w[0] = 0.0;
            for (int j = 1; j <= quad_grid.n; ++j) w[j] = w[j - 1] + sd * rng();
            WienerPath wp{quad_grid, w};
            const BridgePath bp = bridge_from_wiener(wp);
            detail::BridgeQuad quad(bp, v, sigma);
            const ImplicitRoot root = detail::solve_root(quad, b, sigma, 1e-10);
            if (!root.converged || root.overflowed) {
                ++discards[c];
                continue;
            }
            double f, k;
            quad.FK(root.a, f, k);
            const double phi = normal_pdf(root.a);
            stats[c].add(c_q * phi / k);
        }
    });
    RunningStat total;
    std::int64_t discarded = 0;
    for (int c = 0; c < chunks; ++c) {
        total.merge(stats[c]);
        discarded += discards[c];
    }
    if (discarded > 1e-3 * static_cast<double>(density_bridges))
        throw std::runtime_error("g_dyy: discarded sample fraction exceeds threshold");
    out.value = total.mean();
    out.se = total.se();
    out.samples = total.count();
    return out;
}

OptionCost option_cost(const MarketParams& params, RngSeed seed, const PricingConfig& cfg) {
    params.validate();
    const GEstimate g = g_value(0.0, 0.0, params.s0, params.strike, params.sigma, seed, cfg);
    OptionCost out;
    out.c0 = g.value;
    out.se = g.se;
    out.sigma = params.sigma;
    out.s0 = params.s0;
    out.strike = params.strike;
    out.samples = g.samples;
    out.n_inner = cfg.n_inner;
    return out;
}

OptionCost modified_option_cost(const MarketParams& params, const CostSchedule& schedule,
                                RngSeed seed, const PricingConfig& cfg) {
    params.validate();
    MarketParams adjusted = params;
    adjusted.sigma = modified_volatility(params.sigma, schedule).sigma_hat;
    return option_cost(adjusted, seed, cfg);
}

EtaPool::EtaPool(int pool_size, int n_inner, RngSeed seed) {
    if (pool_size < 1) throw std::invalid_argument("EtaPool: pool size must be >= 1");
    if (n_inner < 1) throw std::invalid_argument("EtaPool: n_inner must be >= 1");
    NormalStream rng(seed);
    increments_.resize(pool_size, std::max(n_inner - 1, 0));
    for (int i = 0; i < pool_size; ++i)
        for (int k = 0; k + 1 < n_inner; ++k)
            increments_(i, k) = static_cast<float>(rng());
}

EtaPool::View EtaPool::view(double sigma, double v, int threads) const {
    const int p = pool_size();
    const int n = n_inner();
    const double du = v / n;
    const double sd = std::sqrt(du);
    View view;
    view.v = v;
    view.sorted.resize(p);
    const int chunk_rows = 4096;
    const int chunks = (p + chunk_rows - 1) / chunk_rows;
    parallel_chunks(chunks, threads, [&](int c) {
        const int lo = c * chunk_rows;
        const int rows = std::min(chunk_rows, p - lo);
        Eigen::ArrayXd wsum = Eigen::ArrayXd::Zero(rows);
        Eigen::ArrayXd acc = Eigen::ArrayXd::Constant(rows, 1.0);
        for (int k = 1; k < n; ++k) {
            wsum += sd * increments_.col(k - 1).segment(lo, rows).cast<double>().array();
            acc += (sigma * wsum - 0.5 * sigma * sigma * k * du).exp();
        }
        view.sorted.segment(lo, rows) = (acc * du).matrix();
    });
    std::sort(view.sorted.begin(), view.sorted.end());
    view.suffix.resize(p + 1);
    view.suffix[p] = 0.0;
    for (int i = p - 1; i >= 0; --i) view.suffix[i] = view.suffix[i + 1] + view.sorted[i];
    view.mean = view.suffix[0] / p;
    return view;
}

double EtaPool::View::g(double x, double y, double strike) const {
    const Eigen::Index p = sorted.size();
    const double b = (strike - x) / y;
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), b);
    const Eigen::Index i = it - sorted.begin();
    return (static_cast<double>(p - i) * (x - strike) + y * suffix[i]) /
           static_cast<double>(p);
}

double EtaPool::View::g_dy_exact(double x, double y, double strike) const {
    const Eigen::Index p = sorted.size();
    const double b = (strike - x) / y;
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), b);
    return suffix[it - sorted.begin()] / static_cast<double>(p);
}

double EtaPool::View::g_dy(double x, double y, double strike, double bump) const {
    return (g(x, y + bump, strike) - g(x, y, strike)) / bump;
}

double EtaPool::View::g_dyy(double x, double y, double strike, double bump) const {
    return (g(x, y + bump, strike) - 2.0 * g(x, y, strike) + g(x, y - bump, strike)) /
           (bump * bump);
}

}  // namespace asianmc
