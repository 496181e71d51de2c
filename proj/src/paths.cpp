#include "asianmc/paths.hpp"

#include <cmath>
#include <ostream>

namespace asianmc {

TimeGrid make_grid(int n) {
    if (n < 1) throw std::invalid_argument("make_grid: n must be >= 1");
    return TimeGrid{n};
}

WienerPath sample_wiener(const TimeGrid& grid, RngSeed seed) {
    NormalStream rng(seed);
    const double sd = std::sqrt(grid.dt());
    Eigen::VectorXd w(grid.points());
    w[0] = 0.0;
    for (int j = 1; j <= grid.n; ++j) w[j] = w[j - 1] + sd * rng();
    return {grid, std::move(w)};
}

WienerPath refine_wiener(const WienerPath& w, RngSeed seed) {
    NormalStream rng(seed);
    const int n = w.grid.n;
    // bridge midpoint: mean of the endpoints plus N(0, dt/4) noise
    const double sd = std::sqrt(w.grid.dt() / 4.0);
    Eigen::VectorXd out(2 * n + 1);
    for (int j = 0; j < n; ++j) {
        out[2 * j] = w.values[j];
        out[2 * j + 1] = 0.5 * (w.values[j] + w.values[j + 1]) + sd * rng();
    }
    out[2 * n] = w.values[n];
    return {TimeGrid{2 * n}, std::move(out)};
}

AssetPath gbm_path(const MarketParams& params, const WienerPath& w, Quadrature quad) {
    const auto& grid = w.grid;
    const double sigma = params.sigma;
    Eigen::VectorXd s(grid.points()), xi(grid.points());
    for (int j = 0; j <= grid.n; ++j)
        s[j] = params.s0 * std::exp(sigma * w.values[j] - 0.5 * sigma * sigma * grid.time(j));
    xi[0] = 0.0;
    const double dt = grid.dt();
    for (int j = 1; j <= grid.n; ++j) {
        const double inc = quad == Quadrature::LeftPoint
                               ? s[j - 1]
                               : 0.5 * (s[j - 1] + s[j]);
        xi[j] = xi[j - 1] + dt * inc;
    }
    return {grid, std::move(s), std::move(xi)};
}

double asian_payoff(const AssetPath& path, double strike) {
    return std::max(path.xi[path.grid.n] - strike, 0.0);
}

MomentEstimate abs_increment_moment(std::int64_t samples, RngSeed seed) {
    if (samples < 1) throw std::invalid_argument("abs_increment_moment: samples must be >= 1");
    NormalStream rng(seed);
    double sum = 0.0, sum2 = 0.0;
    for (std::int64_t i = 0; i < samples; ++i) {
        const double a = std::abs(rng());
        sum += a;
        sum2 += a * a;
    }
    const double mean = sum / static_cast<double>(samples);
    const double var = samples > 1
                           ? (sum2 - mean * sum) / static_cast<double>(samples - 1)
                           : 0.0;
    return {mean, std::sqrt(std::max(var, 0.0) / static_cast<double>(samples)), samples};
}

void write_path_csv(std::ostream& os, const AssetPath& path, const WienerPath& w) {
    os << "t,W,S,xi\n";
    for (int j = 0; j <= path.grid.n; ++j)
        os << path.grid.time(j) << ',' << w.values[j] << ',' << path.s[j] << ','
           << path.xi[j] << '\n';
}

}  // namespace asianmc
