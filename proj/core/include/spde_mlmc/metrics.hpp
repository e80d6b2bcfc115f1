#pragma once

#include <span>
#include <utility>
#include <vector>

#include "spde_mlmc/grid.hpp"
#include "spde_mlmc/noise.hpp"

namespace spde_mlmc {

/// Nodal values of exp(-pi^2 t) sin(pi x), the mean of the heat equation
/// driven by additive noise from sin(pi x).
[[nodiscard]] NodalField exact_mean(double t, const LevelGeometry& level);

/// exp(-pi^2 t) sin(pi x) at a point.
[[nodiscard]] double exact_mean_at(double t, double x);

/// Continuous L2(0,1) error between a P1 field and exp(-pi^2 t) sin(pi x),
/// integrated with 5-point Gauss-Legendre on every element.
[[nodiscard]] double l2_error_to_exact_mean(const NodalField& field, double t);

/// E||X(t)||^2 for the linear equation with noise eigenvalues q_j:
/// exp(-2 pi^2 t)/2 + sum_j q_j (1 - exp(-2 j^2 pi^2 t)) / (2 j^2 pi^2),
/// summed over all modes. Requires spectrum.decay > -1.
[[nodiscard]] double expected_squared_norm(double t, const NoiseSpectrum& spectrum);

/// Smallest admissible reference grid size 2^r + 1 with r >= level and
/// r >= default_exponent.
[[nodiscard]] std::size_t reference_grid_size(int level, int default_exponent = 5);

/// Root-mean-square deviation from the exact mean at t = 1 over the m = 2^r + 1
/// points k / 2^r, k = 0..2^r (boundary points included). The estimate is
/// evaluated by its P1 interpolant. Throws UsageError unless m = 2^r + 1 with
/// r >= estimate level.
[[nodiscard]] double e1(const NodalField& estimate, std::size_t m);

/// sqrt(mean(e_i^2)). Throws UsageError for an empty list.
[[nodiscard]] double eN(std::span<const double> e1_values);

/// Least-squares slope of y against x. Throws UsageError for fewer than two
/// points or when all x coincide.
[[nodiscard]] double fit_slope(std::span<const std::pair<double, double>> points);

struct ErrorReport {
    int level = 0;
    std::size_t m = 0;
    std::vector<double> e1_values;
    double eN = 0.0;
    std::vector<std::uint64_t> level_work;
};

}  // namespace spde_mlmc
