#include "asianmc/density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "asianmc/stats.hpp"

namespace asianmc {

namespace {

double normal_pdf(double a) {
    return std::exp(-0.5 * a * a) / std::sqrt(2.0 * std::numbers::pi);
}

// Warm start: on a fixed bridge a(v,z) is increasing in z, so the
// previous root seeds the solve at the next grid point from below.
ImplicitRoot solve_with_hint(const detail::BridgeQuad& quad, double z, double sigma,
                             double tol, bool have_prev, double prev_a) {
    return detail::solve_root(quad, z, sigma, tol,
                              have_prev ? prev_a
                                        : std::numeric_limits<double>::quiet_NaN());
}

struct Accumulator {
    Eigen::ArrayXd q, q2, qz, qz2, qv, qv2;
    std::int64_t used = 0;
    std::int64_t discarded = 0;

    explicit Accumulator(Eigen::Index m)
        : q(Eigen::ArrayXd::Zero(m)),
          q2(Eigen::ArrayXd::Zero(m)),
          qz(Eigen::ArrayXd::Zero(m)),
          qz2(Eigen::ArrayXd::Zero(m)),
          qv(Eigen::ArrayXd::Zero(m)),
          qv2(Eigen::ArrayXd::Zero(m)) {}
};

DensityEstimate estimate_impl(double v, const Eigen::VectorXd& z_grid, double sigma,
                              std::int64_t bridges, RngSeed seed, const DensityConfig& cfg,
                              bool want_derivatives) {
    if (bridges < 1) throw std::invalid_argument("density_q: bridge count must be >= 1");
    if (!(sigma > 0.0)) throw std::invalid_argument("density_q: sigma must be > 0");
    const Eigen::Index m = z_grid.size();
    if (m == 0) throw std::invalid_argument("density_q: empty z grid");
    for (Eigen::Index i = 0; i < m; ++i) {
        if (!(z_grid[i] > 0.0)) throw std::invalid_argument("density_q: z grid must be positive");
        if (i > 0 && z_grid[i] <= z_grid[i - 1])
            throw std::invalid_argument("density_q: z grid must be strictly increasing");
    }

    const int chunks = std::max(1, cfg.chunks);
    const TimeGrid quad_grid = make_grid(cfg.quad_nodes);
    std::vector<Accumulator> acc(chunks, Accumulator(m));

    parallel_chunks(chunks, cfg.threads, [&](int c) {
        const std::int64_t lo = bridges * c / chunks;
        const std::int64_t hi = bridges * (c + 1) / chunks;
        NormalStream rng(seed.next_stream(static_cast<std::uint64_t>(c)));
        Accumulator& a = acc[c];
        const double sd = std::sqrt(quad_grid.dt());
        Eigen::VectorXd w(quad_grid.points());
        std::vector<double> sq(m), sqz(m), sqv(m);
        for (std::int64_t i = lo; i < hi; ++i) {
            w[0] = 0.0;
            for (int j = 1; j <= quad_grid.n; ++j) w[j] = w[j - 1] + sd * rng();
            WienerPath wp{quad_grid, w};
            const BridgePath bp = bridge_from_wiener(wp);
            detail::BridgeQuad quad(bp, v, sigma);
            bool ok = true;
            double prev_a = 0.0;
            bool have_prev = false;
            for (Eigen::Index iz = 0; iz < m && ok; ++iz) {
                quad.clear_overflow();
                const ImplicitRoot root =
                    solve_with_hint(quad, z_grid[iz], sigma, cfg.tol, have_prev, prev_a);
                if (!root.converged) {
                    ok = false;
                    break;
                }
                prev_a = root.a;
                have_prev = true;
                const double phi = normal_pdf(root.a);
                if (!want_derivatives) {
                    double f, k;
                    quad.FK(root.a, f, k);
                    sq[iz] = phi / k;
                } else {
                    double f, k, ka;
                    quad.FKKa(root.a, f, k, ka);
                    const double p = quad.P(root.a);
                    const double k3 = k * k * k;
                    sq[iz] = phi / k;
                    sqz[iz] = (-root.a * phi * k - phi * ka) / k3;
                    sqv[iz] = p * phi * (-sigma * v * k + root.a * k + ka) / k3;
                }
            }
            if (!ok) {
                ++a.discarded;
                continue;
            }
            ++a.used;
            for (Eigen::Index iz = 0; iz < m; ++iz) {
                a.q[iz] += sq[iz];
                a.q2[iz] += sq[iz] * sq[iz];
                if (want_derivatives) {
                    a.qz[iz] += sqz[iz];
                    a.qz2[iz] += sqz[iz] * sqz[iz];
                    a.qv[iz] += sqv[iz];
                    a.qv2[iz] += sqv[iz] * sqv[iz];
                }
            }
        }
    });

    Accumulator total(m);
    for (const auto& a : acc) {
        total.q += a.q;
        total.q2 += a.q2;
        total.qz += a.qz;
        total.qz2 += a.qz2;
        total.qv += a.qv;
        total.qv2 += a.qv2;
        total.used += a.used;
        total.discarded += a.discarded;
    }
    if (total.discarded > cfg.max_discard_frac * static_cast<double>(bridges))
        throw std::runtime_error("density_q: discarded sample fraction exceeds threshold");
    if (total.used == 0) throw std::runtime_error("density_q: no usable bridge samples");

    const double L = static_cast<double>(total.used);
    auto finalize = [&](const Eigen::ArrayXd& s, const Eigen::ArrayXd& s2,
                        Eigen::VectorXd& mean, Eigen::VectorXd& se) {
        mean = (s / L).matrix();
        se = (((s2 / L - (s / L).square()).max(0.0)) / L).sqrt().matrix();
    };

    DensityEstimate out;
    out.v = v;
    out.sigma = sigma;
    out.z_grid = z_grid;
    out.bridges = total.used;
    out.discarded = total.discarded;
    finalize(total.q, total.q2, out.q, out.se);
    if (want_derivatives) {
        finalize(total.qz, total.qz2, out.q_z, out.se_qz);
        finalize(total.qv, total.qv2, out.q_v, out.se_qv);
    }
    return out;
}

}  // namespace

DensityEstimate density_q(double v, const Eigen::VectorXd& z_grid, double sigma,
                          std::int64_t bridges, RngSeed seed, DensityConfig cfg) {
    return estimate_impl(v, z_grid, sigma, bridges, seed, cfg, false);
}

DensityEstimate density_derivatives(double v, const Eigen::VectorXd& z_grid, double sigma,
                                    std::int64_t bridges, RngSeed seed, DensityConfig cfg) {
    return estimate_impl(v, z_grid, sigma, bridges, seed, cfg, true);
}

DensityPoint density_point(double v, double z, double sigma, std::int64_t bridges,
                           RngSeed seed, DensityConfig cfg) {
    Eigen::VectorXd grid(1);
    grid[0] = z;
    const DensityEstimate est = estimate_impl(v, grid, sigma, bridges, seed, cfg, true);
    return {est.q[0], est.se[0], est.q_z[0], est.se_qz[0]};
}

MomentEstimate tail_first_moment(double v, double b, double sigma, std::int64_t bridges,
                                 const Eigen::VectorXd& z_grid, RngSeed seed,
                                 DensityConfig cfg) {
    const Eigen::Index m = z_grid.size();
    if (m < 2) throw std::invalid_argument("tail_first_moment: need at least two z nodes");
    if (z_grid[0] < b - 1e-12)
        throw std::invalid_argument("tail_first_moment: z grid must start at or above b");
    // trapezoid weights times z, fixed across bridges
    Eigen::VectorXd wz = Eigen::VectorXd::Zero(m);
    for (Eigen::Index i = 1; i < m; ++i) {
        const double h = z_grid[i] - z_grid[i - 1];
        wz[i - 1] += 0.5 * h * z_grid[i - 1];
        wz[i] += 0.5 * h * z_grid[i];
    }

    const int chunks = std::max(1, cfg.chunks);
    const TimeGrid quad_grid = make_grid(cfg.quad_nodes);
    std::vector<RunningStat> stats(chunks);
    std::vector<std::int64_t> discards(chunks, 0);

    parallel_chunks(chunks, cfg.threads, [&](int c) {
        const std::int64_t lo = bridges * c / chunks;
        const std::int64_t hi = bridges * (c + 1) / chunks;
        NormalStream rng(seed.next_stream(static_cast<std::uint64_t>(c)));
        const double sd = std::sqrt(quad_grid.dt());
        Eigen::VectorXd w(quad_grid.points());
        for (std::int64_t i = lo; i < hi; ++i) {
            w[0] = 0.0;
            for (int j = 1; j <= quad_grid.n; ++j) w[j] = w[j - 1] + sd * rng();
            WienerPath wp{quad_grid, w};
            const BridgePath bp = bridge_from_wiener(wp);
            detail::BridgeQuad quad(bp, v, sigma);
            double integral = 0.0;
            bool ok = true;
            double prev_a = 0.0;
            bool have_prev = false;
            for (Eigen::Index iz = 0; iz < m; ++iz) {
                quad.clear_overflow();
                const ImplicitRoot root =
                    solve_with_hint(quad, z_grid[iz], sigma, cfg.tol, have_prev, prev_a);
                if (!root.converged) {
                    ok = false;
                    break;
                }
                prev_a = root.a;
                have_prev = true;
                double f, k;
                quad.FK(root.a, f, k);
                integral += wz[iz] * normal_pdf(root.a) / k;
            }
            if (ok)
                stats[c].add(integral);
            else
                ++discards[c];
        }
    });

    RunningStat total;
    std::int64_t discarded = 0;
    for (int c = 0; c < chunks; ++c) {
        total.merge(stats[c]);
        discarded += discards[c];
    }
    if (discarded > cfg.max_discard_frac * static_cast<double>(bridges))
        throw std::runtime_error("tail_first_moment: discarded sample fraction exceeds threshold");
    return {total.mean(), total.se(), total.count()};
}

Eigen::VectorXd direct_eta_samples(double v, double sigma, std::int64_t L, int n_inner,
                                   RngSeed seed) {
    if (L < 1) throw std::invalid_argument("direct_eta_samples: L must be >= 1");
    if (n_inner < 1) throw std::invalid_argument("direct_eta_samples: n_inner must be >= 1");
    NormalStream rng(seed);
    const double du = v / n_inner;
    const double sd = std::sqrt(du);
    Eigen::VectorXd out(L);
    for (std::int64_t i = 0; i < L; ++i) {
        double wsum = 0.0, acc = 1.0;  // left node u=0 contributes exp(0)
        for (int k = 1; k < n_inner; ++k) {
            wsum += sd * rng();
            acc += std::exp(sigma * wsum - 0.5 * sigma * sigma * k * du);
        }
        out[i] = acc * du;
    }
    return out;
}

Eigen::VectorXd density_implied_cdf(const Eigen::VectorXd& z_grid, const Eigen::VectorXd& q) {
    Eigen::VectorXd cdf(z_grid.size());
    cdf[0] = 0.0;
    for (Eigen::Index i = 1; i < z_grid.size(); ++i)
        cdf[i] = cdf[i - 1] + 0.5 * (q[i] + q[i - 1]) * (z_grid[i] - z_grid[i - 1]);
    return cdf;
}

Eigen::VectorXd empirical_cdf(Eigen::VectorXd samples, const Eigen::VectorXd& z_grid) {
    std::sort(samples.begin(), samples.end());
    Eigen::VectorXd cdf(z_grid.size());
    for (Eigen::Index i = 0; i < z_grid.size(); ++i) {
        const auto it = std::upper_bound(samples.begin(), samples.end(), z_grid[i]);
        cdf[i] = static_cast<double>(it - samples.begin()) / static_cast<double>(samples.size());
    }
    return cdf;
}

BoundFit bound_diagnostic(double v, double sigma, const DensityEstimate& estimate) {
    std::vector<double> xs, ys;
    for (Eigen::Index i = 0; i < estimate.z_grid.size(); ++i) {
        const double z = estimate.z_grid[i];
        if (z <= v || estimate.q[i] <= 0.0) continue;
        const double lr = std::log(z / v);
        xs.push_back(-lr * lr / (sigma * sigma * v));
        ys.push_back(std::log(estimate.q[i]));
    }
    if (xs.size() < 5) throw std::runtime_error("bound_diagnostic: insufficient tail points");
    const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(xs.data(), xs.size());
    const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(ys.data(), ys.size());
    const LinearFit fit = fit_line(x, y);
    BoundFit out;
    out.kappa_hat = fit.slope;
    out.intercept = fit.intercept;
    out.r2 = fit.r2;
    out.points = static_cast<int>(xs.size());
    out.pass = out.kappa_hat > 0.0 && out.r2 >= 0.9;
    return out;
}

void write_density_csv(std::ostream& os, const DensityEstimate& e) {
    os << (e.has_derivatives() ? "v,z,q,se,q_z,q_v\n" : "v,z,q,se\n");
    for (Eigen::Index i = 0; i < e.z_grid.size(); ++i) {
        os << e.v << ',' << e.z_grid[i] << ',' << e.q[i] << ',' << e.se[i];
        if (e.has_derivatives()) os << ',' << e.q_z[i] << ',' << e.q_v[i];
        os << '\n';
    }
}

}  // namespace asianmc
