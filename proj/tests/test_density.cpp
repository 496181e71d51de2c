#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "asianmc/density.hpp"
#include "asianmc/stats.hpp"

using namespace asianmc;

namespace {

const RngSeed kSeed{20240801, 0};

Eigen::VectorXd log_grid(double v, double sigma, int m, double width = 3.5) {
    const double lo = std::log(v) - width * sigma * std::sqrt(v);
    const double hi = std::log(v) + width * sigma * std::sqrt(v);
    Eigen::VectorXd z(m);
    for (int i = 0; i < m; ++i)
        z[i] = std::exp(lo + (hi - lo) * i / (m - 1));
    return z;
}

}  // namespace

TEST_CASE("density estimate: normalization, mean, oracle CDF, KDE, tail fit") {
    const double sigma = 0.5, v = 1.0;
    const Eigen::VectorXd z = log_grid(v, sigma, 100);
    const DensityEstimate est = density_q(v, z, sigma, 8000, kSeed);

    CHECK(est.bridges == 8000);
    CHECK(est.discarded <= 8);
    CHECK(est.q.minCoeff() >= 0.0);
    CHECK(est.se.minCoeff() >= 0.0);

    const double mass = trapezoid(z, est.q);
    const double mean = trapezoid(z, (z.array() * est.q.array()).matrix());
    CHECK(mass == doctest::Approx(1.0).epsilon(0.01));
    CHECK(mean == doctest::Approx(v).epsilon(0.01));

    // two-route CDF comparison against direct simulation of the functional
    const Eigen::VectorXd samples = direct_eta_samples(v, sigma, 100000, 100,
                                                       kSeed.next_stream(50));
    const Eigen::VectorXd cdf_q = density_implied_cdf(z, est.q);
    const Eigen::VectorXd cdf_emp = empirical_cdf(samples, z);
    CHECK(kolmogorov_distance(cdf_q, cdf_emp) <= 0.02);

    // kernel density estimate from the direct samples, central quantile range
    Eigen::VectorXd sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    const double q15 = sorted[static_cast<int>(0.15 * sorted.size())];
    const double q85 = sorted[static_cast<int>(0.85 * sorted.size())];
    const double sd = std::sqrt((sorted.array() - sorted.mean()).square().mean());
    const double iqr = sorted[static_cast<int>(0.75 * sorted.size())] -
                       sorted[static_cast<int>(0.25 * sorted.size())];
    const double bw = 0.9 * std::min(sd, iqr / 1.34) *
                      std::pow(static_cast<double>(sorted.size()), -0.2);
    const double peak = est.q.maxCoeff();
    double sup = 0.0;
    for (int i = 0; i < z.size(); ++i) {
        if (z[i] < q15 || z[i] > q85) continue;
        const double kde =
            ((sorted.array() - z[i]) / bw).square().unaryExpr([](double u) {
                return std::exp(-0.5 * u);
            }).mean() /
            (bw * std::sqrt(2.0 * std::numbers::pi));
        sup = std::max(sup, std::abs(kde - est.q[i]));
    }
    CHECK(sup <= 0.05 * peak);

    // tail decay fit on z > v only
    const BoundFit fit = bound_diagnostic(v, sigma, est);
    CHECK(fit.pass);
    CHECK(fit.kappa_hat > 0.0);
    CHECK(fit.r2 >= 0.9);
    int tail_points = 0;
    for (int i = 0; i < z.size(); ++i)
        if (z[i] > v) ++tail_points;
    CHECK(fit.points == tail_points);
}

TEST_CASE("density derivatives match common-random-number finite differences") {
    const double sigma = 0.5, v = 1.0;
    const int m = 41;
    Eigen::VectorXd z(m);
    for (int i = 0; i < m; ++i) z[i] = 0.5 + 1.5 * i / (m - 1);
    const DensityEstimate est = density_derivatives(v, z, sigma, 4000, kSeed.next_stream(60));
    REQUIRE(est.has_derivatives());

    // q_z against centered differences of q from the same bridges
    const double h = z[1] - z[0];
    for (int i = 1; i + 1 < m; ++i) {
        const double fd = (est.q[i + 1] - est.q[i - 1]) / (2.0 * h);
        const double tol = 3.0 * (est.se_qz[i] + (est.se[i + 1] + est.se[i - 1]) / (2.0 * h)) +
                           0.05 * std::abs(est.q_z[i]) + 0.02;
        CHECK(std::abs(est.q_z[i] - fd) <= tol);
    }

    // integral of q_z over a wide grid is the boundary difference, near zero
    const Eigen::VectorXd zw = log_grid(v, sigma, 60);
    const DensityEstimate wide =
        density_derivatives(v, zw, sigma, 4000, kSeed.next_stream(61));
    CHECK(std::abs(trapezoid(zw, wide.q_z)) <= 0.05);
}

TEST_CASE("q_v matches a centered difference in v on shared seeds") {
    const double sigma = 0.5, v = 0.5, h = 0.02;
    Eigen::VectorXd z(5);
    z << 0.35, 0.45, 0.5, 0.55, 0.7;
    const RngSeed s = kSeed.next_stream(70);
    const DensityEstimate mid = density_derivatives(v, z, sigma, 4000, s);
    const DensityEstimate up = density_q(v + h, z, sigma, 4000, s);
    const DensityEstimate dn = density_q(v - h, z, sigma, 4000, s);
    for (int i = 0; i < z.size(); ++i) {
        const double fd = (up.q[i] - dn.q[i]) / (2.0 * h);
        const double tol = 3.0 * (mid.se_qv[i] + (up.se[i] + dn.se[i]) / (2.0 * h)) +
                           0.05 * std::abs(mid.q_v[i]) + 0.05;
        CHECK(std::abs(mid.q_v[i] - fd) <= tol);
    }
}

TEST_CASE("direct_eta_samples mean and small-noise limit") {
    for (double v : {0.25, 0.5, 1.0}) {
        const Eigen::VectorXd s =
            direct_eta_samples(v, 0.5, 20000, 100, kSeed.next_stream(80));
        RunningStat stat;
        for (double x : s) stat.add(x);
        CHECK(std::abs(stat.mean() - v) < 3.0 * stat.se());
    }

    const Eigen::VectorXd tiny =
        direct_eta_samples(0.5, 1e-3, 2000, 100, kSeed.next_stream(81));
    CHECK(((tiny.array() - 0.5).abs() / 0.5).maxCoeff() < 0.01);
}

TEST_CASE("standard errors shrink like the square root of the bridge count") {
    const double sigma = 0.5, v = 1.0;
    const Eigen::VectorXd z = log_grid(v, sigma, 9, 2.0);
    const DensityEstimate a = density_q(v, z, sigma, 3000, kSeed.next_stream(90));
    const DensityEstimate b = density_q(v, z, sigma, 6000, kSeed.next_stream(91));
    const double ratio = b.se.mean() / a.se.mean();
    CHECK(ratio >= 0.6);
    CHECK(ratio <= 0.85);
}

TEST_CASE("density_point agrees with the grid estimator") {
    const double sigma = 0.5, v = 1.0, z = 1.1;
    const DensityPoint p = density_point(v, z, sigma, 3000, kSeed.next_stream(95));
    Eigen::VectorXd zg(1);
    zg << z;
    const DensityEstimate g = density_derivatives(v, zg, sigma, 3000, kSeed.next_stream(96));
    CHECK(std::abs(p.q - g.q[0]) <= 3.0 * (p.se_q + g.se[0]));
    CHECK(std::abs(p.q_z - g.q_z[0]) <= 3.0 * (p.se_qz + g.se_qz[0]));
}

TEST_CASE("bound fit is shape-stable across remaining times") {
    const double sigma = 0.5;
    for (double v : {0.25, 0.5, 1.0}) {
        const Eigen::VectorXd z = log_grid(v, sigma, 80);
        const DensityEstimate est =
            density_q(v, z, sigma, 5000, kSeed.next_stream(100 + static_cast<int>(8 * v)));
        const BoundFit fit = bound_diagnostic(v, sigma, est);
        CHECK(fit.kappa_hat > 0.0);
    }
}

TEST_CASE("empirical_cdf counts correctly on a tiny sample") {
    Eigen::VectorXd s(3);
    s << 2.0, 1.0, 3.0;
    Eigen::VectorXd z(4);
    z << 0.5, 1.5, 2.5, 3.5;
    const Eigen::VectorXd cdf = empirical_cdf(s, z);
    CHECK(cdf[0] == 0.0);
    CHECK(cdf[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(cdf[2] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(cdf[3] == doctest::Approx(1.0).epsilon(1e-14));
}
