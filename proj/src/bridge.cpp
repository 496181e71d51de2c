#include "asianmc/bridge.hpp"

#include <cmath>
#include <stdexcept>

namespace asianmc {

BridgePath bridge_from_wiener(const WienerPath& w) {
    const int n = w.grid.n;
    if (w.grid.time(n) != 1.0)
        throw std::invalid_argument("bridge_from_wiener: path must span [0,1]");
    const double w1 = w.values[n];
    Eigen::VectorXd b(n + 1);
    for (int j = 0; j <= n; ++j) b[j] = w.values[j] - w.grid.time(j) * w1;
    b[0] = 0.0;
    b[n] = 0.0;
    return {w.grid, std::move(b)};
}

namespace detail {

namespace {
constexpr double kExpClamp = 700.0;
}

BridgeQuad::BridgeQuad(const BridgePath& bridge, double v, double sigma)
    : v_(v), sigma_(sigma), du_(bridge.grid.dt()) {
    if (!(v > 0.0) || v > 1.0) throw std::invalid_argument("BridgeQuad: v must lie in (0,1]");
    const int n = bridge.grid.n;
    // left nodes with u_k < v
    int m = static_cast<int>(v * n + 0.5);
    m = std::min(std::max(m, 1), n);
    u_.resize(m);
    base_.resize(m);
    for (int k = 0; k < m; ++k) {
        const double u = bridge.grid.time(k);
        u_[k] = u;
        base_[k] = sigma * bridge.values[k] - 0.5 * sigma * sigma * u;
    }
    const int jv = std::min(m, n);
    v_node_u_ = bridge.grid.time(jv);
    v_node_base_ = sigma * bridge.values[jv] - 0.5 * sigma * sigma * v_node_u_;
}

Eigen::ArrayXd BridgeQuad::evaluate(double a) const {
    Eigen::ArrayXd e = base_ + sigma_ * a * u_;
    if ((e > kExpClamp).any() || (e < -kExpClamp).any()) {
        overflow_ = true;
        e = e.min(kExpClamp).max(-kExpClamp);
    }
    return e.exp();
}

double BridgeQuad::F(double a) const { return evaluate(a).sum() * du_; }

void BridgeQuad::FK(double a, double& f, double& k) const {
    const Eigen::ArrayXd e = evaluate(a);
    f = e.sum() * du_;
    k = sigma_ * (u_ * e).sum() * du_;
}

void BridgeQuad::FKKa(double a, double& f, double& k, double& ka) const {
    const Eigen::ArrayXd e = evaluate(a);
    f = e.sum() * du_;
    k = sigma_ * (u_ * e).sum() * du_;
    ka = sigma_ * sigma_ * (u_ * u_ * e).sum() * du_;
}

double BridgeQuad::P(double a) const {
    double e = v_node_base_ + sigma_ * a * v_node_u_;
    if (e > kExpClamp || e < -kExpClamp) {
        overflow_ = true;
        e = std::clamp(e, -kExpClamp, kExpClamp);
    }
    return std::exp(e);
}

ImplicitRoot solve_root(const BridgeQuad& quad, double z, double sigma, double tol,
                        double guess) {
    ImplicitRoot root;
    root.v = quad.v();
    root.z = z;
    if (!(z > 0.0)) throw std::invalid_argument("solve_a: z must be > 0");
    if (!(tol > 0.0)) throw std::invalid_argument("solve_a: tol must be > 0");

    // Newton with a lazily established bracket. F is increasing and
    // convex in a, so once the root is straddled the safeguarded steps
    // cannot escape; until then the bracket grows exponentially. The
    // seed is exact on the zero bridge.
    const double a0 = std::log(z / quad.v()) / (sigma * quad.v()) + 0.5 * sigma;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    double a = std::isfinite(guess) ? guess : a0;
    double f = 0.0;
    double width = 1.0;
    for (int it = 0; it < 160; ++it) {
        double k;
        quad.FK(a, f, k);
        ++root.iterations;
        if (std::abs(f - z) <= tol) break;
        if (f < z)
            lo = a;
        else
            hi = a;
        if (hi - lo < 1e-15 * (1.0 + std::abs(a))) break;
        double next = k > 0.0 ? a + (z - f) / k : std::numeric_limits<double>::quiet_NaN();
        if (!(next > lo) || !(next < hi)) {
            if (std::isfinite(lo) && std::isfinite(hi))
                next = 0.5 * (lo + hi);
            else if (std::isfinite(lo))
                next = lo + width;
            else
                next = hi - width;
            width *= 2.0;
        }
        a = next;
    }
    root.a = a;
    root.residual = std::abs(f - z);
    root.bracket_lo = lo;
    root.bracket_hi = hi;
    root.overflowed = quad.overflow_hit();
    root.converged =
        !root.overflowed &&
        (root.residual <= tol ||
         (std::isfinite(lo) && std::isfinite(hi) && hi - lo < 1e-12 * (1.0 + std::abs(a))));
    return root;
}

}  // namespace detail

double functional_F(const BridgePath& bridge, double v, double a, double sigma) {
    return detail::BridgeQuad(bridge, v, sigma).F(a);
}

double functional_K(const BridgePath& bridge, double v, double a, double sigma) {
    double f, k;
    detail::BridgeQuad(bridge, v, sigma).FK(a, f, k);
    return k;
}

double functional_P(const BridgePath& bridge, double v, double a, double sigma) {
    return detail::BridgeQuad(bridge, v, sigma).P(a);
}

ImplicitRoot solve_a(const BridgePath& bridge, double v, double z, double sigma, double tol) {
    detail::BridgeQuad quad(bridge, v, sigma);
    return detail::solve_root(quad, z, sigma, tol);
}

}  // namespace asianmc
