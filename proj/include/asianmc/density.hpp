#pragma once

#include <iosfwd>

#include <Eigen/Core>

#include "asianmc/bridge.hpp"
#include "asianmc/paths.hpp"

namespace asianmc {

struct DensityConfig {
    int quad_nodes = 512;          // inner quadrature grid for F, K, P
    double tol = 1e-10;            // F-residual tolerance for the implicit root
    int threads = 1;
    int chunks = 64;               // fixed work decomposition, independent of threads
    double max_discard_frac = 1e-3;
};

struct DensityEstimate {
    double v = 0.0;
    double sigma = 0.0;
    Eigen::VectorXd z_grid;
    Eigen::VectorXd q, se;
    Eigen::VectorXd q_z, se_qz;  // empty unless derivatives were requested
    Eigen::VectorXd q_v, se_qv;
    std::int64_t bridges = 0;
    std::int64_t discarded = 0;

    bool has_derivatives() const { return q_z.size() > 0; }
};

/// Monte Carlo estimate of the density q(v,z) of the exponential
/// functional, averaging phi(a(v,z)) / K(v,a(v,z)) over bridge samples.
DensityEstimate density_q(double v, const Eigen::VectorXd& z_grid, double sigma,
                          std::int64_t bridges, RngSeed seed, DensityConfig cfg = {});

/// Same sampling with the q_z and q_v estimators filled in.
DensityEstimate density_derivatives(double v, const Eigen::VectorXd& z_grid, double sigma,
                                    std::int64_t bridges, RngSeed seed,
                                    DensityConfig cfg = {});

/// Single-point density value and z-derivative (used by the closed-form
/// second-derivative route).
struct DensityPoint {
    double q = 0.0, se_q = 0.0;
    double q_z = 0.0, se_qz = 0.0;
};

DensityPoint density_point(double v, double z, double sigma, std::int64_t bridges,
                           RngSeed seed, DensityConfig cfg = {});

/// E[ int_b^inf z q(v,z) dz ] with a per-bridge variance estimate;
/// the z quadrature grid is shared across bridges.
MomentEstimate tail_first_moment(double v, double b, double sigma, std::int64_t bridges,
                                 const Eigen::VectorXd& z_grid, RngSeed seed,
                                 DensityConfig cfg = {});

/// L independent left-Riemann samples of the exponential functional on an
/// n_inner grid of [0, v].
Eigen::VectorXd direct_eta_samples(double v, double sigma, std::int64_t L, int n_inner,
                                   RngSeed seed);

/// CDF implied by a density table (trapezoid accumulation, zero below the grid).
Eigen::VectorXd density_implied_cdf(const Eigen::VectorXd& z_grid, const Eigen::VectorXd& q);

/// Empirical CDF of `samples` evaluated on `z_grid` (samples need not be sorted).
Eigen::VectorXd empirical_cdf(Eigen::VectorXd samples, const Eigen::VectorXd& z_grid);

/// Least-squares fit of log q against -(ln(z/v))^2/(sigma^2 v) on z > v.
struct BoundFit {
    double kappa_hat = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    int points = 0;
    bool pass = false;  // kappa_hat > 0 and r2 >= 0.9
};

BoundFit bound_diagnostic(double v, double sigma, const DensityEstimate& estimate);

/// Columns v,z,q,se[,q_z,q_v].
void write_density_csv(std::ostream& os, const DensityEstimate& estimate);

}  // namespace asianmc
