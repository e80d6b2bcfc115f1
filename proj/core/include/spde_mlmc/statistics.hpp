#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "spde_mlmc/fem.hpp"

namespace spde_mlmc {

/// Running mean and sum of squared deviations (Welford), mergeable in a fixed
/// order (Chan et al.) so chunked accumulation is deterministic.
class ScalarAccumulator {
public:
    void add(double x);
    void merge(const ScalarAccumulator& other);

    [[nodiscard]] std::uint64_t count() const { return count_; }
    [[nodiscard]] double mean() const { return mean_; }
    /// Unbiased sample variance; 0 for fewer than two samples.
    [[nodiscard]] double variance() const;

private:
    std::uint64_t count_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

/// Hilbert-space analogue of ScalarAccumulator: the variance is the trace
/// E||X - E X||^2 measured in the L2 norm induced by `mass`.
class FieldAccumulator {
public:
    FieldAccumulator() = default;
    explicit FieldAccumulator(const TridiagonalMatrix* mass);

    void add(std::span<const double> x);
    void merge(const FieldAccumulator& other);

    [[nodiscard]] std::uint64_t count() const { return count_; }
    [[nodiscard]] const std::vector<double>& mean() const { return mean_; }
    [[nodiscard]] double variance() const;

private:
    const TridiagonalMatrix* mass_ = nullptr;
    std::uint64_t count_ = 0;
    std::vector<double> mean_;
    double m2_ = 0.0;
};

}  // namespace spde_mlmc
