#pragma once

#include <limits>

#include <Eigen/Core>

#include "asianmc/paths.hpp"

namespace asianmc {

/// Brownian bridge values W_u - u W_1 on the grid of the driving path.
/// Both endpoints are exactly zero.
struct BridgePath {
    TimeGrid grid;
    Eigen::VectorXd values;
};

BridgePath bridge_from_wiener(const WienerPath& w);

/// Left-Riemann value of F(v,a) = int_0^v exp{sigma Wt_u - sigma^2 u/2 + sigma u a} du.
/// Strictly increasing in a.
double functional_F(const BridgePath& bridge, double v, double a, double sigma);

/// K = dF/da = sigma int_0^v u exp{...} du, positive for v > 0.
double functional_K(const BridgePath& bridge, double v, double a, double sigma);

/// P = dF/dv, the integrand of F evaluated at the node nearest v.
double functional_P(const BridgePath& bridge, double v, double a, double sigma);

struct ImplicitRoot {
    double v = 0.0;
    double z = 0.0;
    double a = 0.0;
    double residual = 0.0;     // |F(v,a) - z| at the returned root
    double bracket_lo = 0.0;   // monotonicity certificate: F(lo) <= z <= F(hi)
    double bracket_hi = 0.0;
    int iterations = 0;
    bool converged = false;
    bool overflowed = false;   // exponent clamp was hit; caller should discard
};

/// Solves z = F(v,a) for a by bisection on an exponentially expanded
/// bracket seeded at a0 = ln(z/v)/(sigma v) + sigma/2 (exact on the zero
/// bridge).
ImplicitRoot solve_a(const BridgePath& bridge, double v, double z, double sigma,
                     double tol = 1e-10);

namespace detail {

/// Quadrature cache for one bridge: fixed nodes u_k < v with base exponent
/// c_k = sigma Wt_k - sigma^2 u_k / 2.  F/K/K_a share one exp() sweep.
class BridgeQuad {
public:
    BridgeQuad(const BridgePath& bridge, double v, double sigma);

    double F(double a) const;
    void FK(double a, double& f, double& k) const;
    void FKKa(double a, double& f, double& k, double& ka) const;
    double P(double a) const;
    bool overflow_hit() const { return overflow_; }
    void clear_overflow() { overflow_ = false; }
    double v() const { return v_; }

private:
    Eigen::ArrayXd evaluate(double a) const;

    double v_, sigma_, du_;
    Eigen::ArrayXd u_;     // left nodes < v
    Eigen::ArrayXd base_;  // sigma Wt - sigma^2 u / 2 at nodes
    double v_node_base_;   // base exponent at the node nearest v
    double v_node_u_;
    mutable bool overflow_ = false;
};

/// Safeguarded Newton on z = F(a): bracketed, with K = F'_a from the
/// shared quadrature sweep. `guess` (if finite) seeds the iteration, e.g.
/// the root at the previous grid point when sweeping z in ascending order.
ImplicitRoot solve_root(const BridgeQuad& quad, double z, double sigma, double tol,
                        double guess = std::numeric_limits<double>::quiet_NaN());

}  // namespace detail

}  // namespace asianmc
