#include "asianmc/stats.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace asianmc {

void RunningStat::merge(const RunningStat& o) {
    if (o.n_ == 0) return;
    if (n_ == 0) {
        *this = o;
        return;
    }
    const double na = static_cast<double>(n_), nb = static_cast<double>(o.n_);
    const double delta = o.mean_ - mean_;
    const double nt = na + nb;
    mean_ += delta * nb / nt;
    m2_ += o.m2_ + delta * delta * na * nb / nt;
    n_ += o.n_;
}

double RunningStat::se() const {
    return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

LinearFit fit_line(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_line: need two equally sized samples");
    const double n = static_cast<double>(x.size());
    const double mx = x.mean(), my = y.mean();
    const Eigen::VectorXd dx = x.array() - mx;
    const Eigen::VectorXd dy = y.array() - my;
    const double sxx = dx.squaredNorm();
    if (sxx == 0.0) throw std::invalid_argument("fit_line: degenerate abscissa");
    LinearFit fit;
    fit.slope = dx.dot(dy) / sxx;
    fit.intercept = my - fit.slope * mx;
    const double ss_res = (dy - fit.slope * dx).squaredNorm();
    const double ss_tot = dy.squaredNorm();
    fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    (void)n;
    return fit;
}

double kolmogorov_distance(const Eigen::VectorXd& f, const Eigen::VectorXd& g) {
    if (f.size() != g.size())
        throw std::invalid_argument("kolmogorov_distance: size mismatch");
    return (f - g).cwiseAbs().maxCoeff();
}

double trapezoid(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("trapezoid: need at least two nodes");
    double acc = 0.0;
    for (Eigen::Index i = 1; i < x.size(); ++i)
        acc += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
    return acc;
}

void parallel_chunks(int chunk_count, int threads, const std::function<void(int)>& body) {
    if (threads <= 1 || chunk_count <= 1) {
        for (int c = 0; c < chunk_count; ++c) body(c);
        return;
    }
    std::atomic<int> next{0};
    auto worker = [&] {
        for (;;) {
            const int c = next.fetch_add(1);
            if (c >= chunk_count) return;
            body(c);
        }
    };
    std::vector<std::thread> pool;
    const int k = std::min(threads, chunk_count);
    pool.reserve(k);
    for (int i = 0; i < k; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

}  // namespace asianmc
