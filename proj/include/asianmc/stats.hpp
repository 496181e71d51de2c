#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Core>

namespace asianmc {

/// Streaming mean / standard error (Welford).
class RunningStat {
public:
    void add(double x) {
        ++n_;
        const double d = x - mean_;
        mean_ += d / static_cast<double>(n_);
        m2_ += d * (x - mean_);
    }

    void merge(const RunningStat& o);

    std::int64_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
    double se() const;

private:
    std::int64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

LinearFit fit_line(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// sup_i |F(x_i) - G(x_i)| over the common evaluation grid.
double kolmogorov_distance(const Eigen::VectorXd& f, const Eigen::VectorXd& g);

/// Trapezoid rule on an arbitrary ascending grid.
double trapezoid(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// Runs chunks 0..chunk_count-1 on up to `threads` workers. Chunk
/// decomposition is fixed, so results depend only on the chunk index,
/// never on the thread count.
void parallel_chunks(int chunk_count, int threads, const std::function<void(int)>& body);

}  // namespace asianmc
