#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace asianmc {

/// Seed plus stream index; identical (seed, stream) reproduces draws
/// bit-identically. Streams partition the index space for batch work.
struct RngSeed {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    RngSeed next_stream(std::uint64_t offset = 1) const { return {seed, stream + offset}; }
};

/// Standard normal generator on a counter-based stream.
class NormalStream {
public:
    explicit NormalStream(RngSeed s) {
        std::seed_seq seq{s.seed, s.stream, std::uint64_t{0x9e3779b97f4a7c15ULL}};
        gen_.seed(seq);
    }

    double operator()() { return dist_(gen_); }

    Eigen::VectorXd draw(Eigen::Index count) {
        Eigen::VectorXd out(count);
        for (Eigen::Index i = 0; i < count; ++i) out[i] = dist_(gen_);
        return out;
    }

private:
    std::mt19937_64 gen_;
    std::normal_distribution<double> dist_;
};

}  // namespace asianmc
