#pragma once

#include <iosfwd>
#include <stdexcept>

#include <Eigen/Core>

#include "asianmc/rng.hpp"

namespace asianmc {

/// Uniform grid t_j = j/n on [0,1].
struct TimeGrid {
    int n = 1;

    double dt() const { return 1.0 / n; }
    double time(int j) const { return static_cast<double>(j) / n; }
    int points() const { return n + 1; }
};

TimeGrid make_grid(int n);

/// Driftless Black-Scholes market on [0,1] with unit bond.
/// sigma == 0 is tolerated by the simulators for degenerate test cases;
/// pricing entry points call validate() and reject it.
struct MarketParams {
    double sigma = 0.0;
    double s0 = 0.0;
    double strike = 0.0;

    void validate() const {
        if (!(sigma > 0.0)) throw std::invalid_argument("MarketParams: sigma must be > 0");
        if (!(s0 > 0.0)) throw std::invalid_argument("MarketParams: s0 must be > 0");
        if (strike < 0.0) throw std::invalid_argument("MarketParams: strike must be >= 0");
    }
};

struct WienerPath {
    TimeGrid grid;
    Eigen::VectorXd values;  // W at each node, W_0 = 0
};

WienerPath sample_wiener(const TimeGrid& grid, RngSeed seed);

/// Doubles the grid by inserting Brownian-bridge midpoints; the original
/// nodes keep their values exactly.
WienerPath refine_wiener(const WienerPath& w, RngSeed seed);

enum class Quadrature { LeftPoint, Trapezoid };

struct AssetPath {
    TimeGrid grid;
    Eigen::VectorXd s;   // S_j = s0 exp(sigma W_j - sigma^2 t_j / 2)
    Eigen::VectorXd xi;  // running integral of S over [0, t_j]
};

AssetPath gbm_path(const MarketParams& params, const WienerPath& w,
                   Quadrature quad = Quadrature::LeftPoint);

double asian_payoff(const AssetPath& path, double strike);

struct MomentEstimate {
    double value = 0.0;
    double se = 0.0;
    std::int64_t samples = 0;
};

/// Monte Carlo estimate of E|Z|, Z standard normal (= sqrt(2/pi)).
MomentEstimate abs_increment_moment(std::int64_t samples, RngSeed seed);

/// Columns t, W, S, xi with a header row and '.' decimal separator.
void write_path_csv(std::ostream& os, const AssetPath& path, const WienerPath& w);

}  // namespace asianmc
