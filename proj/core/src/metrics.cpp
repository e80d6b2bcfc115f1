#include "spde_mlmc/metrics.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numbers>
#include <string>

#include "spde_mlmc/error.hpp"

namespace spde_mlmc {

double exact_mean_at(double t, double x) {
    return std::exp(-std::numbers::pi * std::numbers::pi * t) * std::sin(std::numbers::pi * x);
}

NodalField exact_mean(double t, const LevelGeometry& level) {
    if (!(t >= 0.0 && t <= 1.0)) throw UsageError("exact_mean: t must lie in [0, 1]");
    NodalField f(level);
    for (std::size_t i = 0; i < level.dofs; ++i) f[i] = exact_mean_at(t, level.node(i));
    return f;
}

double l2_error_to_exact_mean(const NodalField& field, double t) {
    static constexpr std::array<double, 5> nodes = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                                    0.9061798459386640};
    static constexpr std::array<double, 5> weights = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                                      0.4786286704993665, 0.2369268850561891};
    const LevelGeometry& g = field.geometry();
    const std::size_t elements = g.dofs + 1;
    const double h = g.mesh_width;
    double sum = 0.0;
    for (std::size_t e = 0; e < elements; ++e) {
        const double left = e == 0 ? 0.0 : field[e - 1];
        const double right = e == g.dofs ? 0.0 : field[e];
        const double x0 = static_cast<double>(e) * h;
        for (std::size_t q = 0; q < nodes.size(); ++q) {
            const double s = 0.5 * (nodes[q] + 1.0);
            const double uh = (1.0 - s) * left + s * right;
            const double diff = uh - exact_mean_at(t, x0 + s * h);
            sum += 0.5 * h * weights[q] * diff * diff;
        }
    }
    return std::sqrt(sum);
}

double expected_squared_norm(double t, const NoiseSpectrum& spectrum) {
    if (!(t >= 0.0 && t <= 1.0)) throw UsageError("expected_squared_norm: t must lie in [0, 1]");
    if (!(spectrum.decay > -1.0)) throw UsageError("expected_squared_norm: series diverges for decay <= -1");
    constexpr double pi2 = std::numbers::pi * std::numbers::pi;
    const double mean_part = 0.5 * std::exp(-2.0 * pi2 * t);
    if (t == 0.0) return mean_part;
    // Direct summation until exp(-2 j^2 pi^2 t) underflows; beyond that the
    // terms are q_j / (2 j^2 pi^2) and the tail is a zeta remainder.
    const double cutoff = std::ceil(std::sqrt(800.0 / (2.0 * pi2 * t)));
    const auto K = static_cast<std::size_t>(std::min(cutoff, 1e7));
    double noise_part = 0.0;
    double plain = 0.0;
    for (std::size_t j = K; j >= 1; --j) {
        const double lambda = pi2 * static_cast<double>(j) * static_cast<double>(j);
        const double q = spectrum.eigenvalue(j);
        noise_part += q * -std::expm1(-2.0 * lambda * t) / (2.0 * lambda);
        plain += q / (2.0 * lambda);
    }
    noise_part += std::riemann_zeta(spectrum.decay + 2.0) / (2.0 * pi2) - plain;
    return mean_part + noise_part;
}

std::size_t reference_grid_size(int level, int default_exponent) {
    const int r = std::max(level, default_exponent);
    if (r < 0 || r > kMaxLevel) throw CapacityError("reference_grid_size: exponent out of range");
    return (std::size_t{1} << r) + 1;
}

double e1(const NodalField& estimate, std::size_t m) {
    if (m < 2 || !std::has_single_bit(m - 1)) {
        throw UsageError("e1: m = " + std::to_string(m) + " is not of the form 2^r + 1");
    }
    const int r = std::countr_zero(m - 1);
    if (r < estimate.level()) {
        throw UsageError("e1: reference grid 2^" + std::to_string(r) + " + 1 is coarser than the estimate level " +
                         std::to_string(estimate.level()));
    }
    const NodalField fine = prolong_to(estimate, r);
    const double h = fine.geometry().mesh_width;
    double sum = 0.0;
    // Boundary points contribute (0 - 0)^2.
    for (std::size_t i = 0; i < fine.size(); ++i) {
        const double d = exact_mean_at(1.0, static_cast<double>(i + 1) * h) - fine[i];
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(m));
}

double eN(std::span<const double> e1_values) {
    if (e1_values.empty()) throw UsageError("eN: empty list of replicate errors");
    double s = 0.0;
    for (double e : e1_values) s += e * e;
    return std::sqrt(s / static_cast<double>(e1_values.size()));
}

double fit_slope(std::span<const std::pair<double, double>> points) {
    if (points.size() < 2) throw UsageError("fit_slope: need at least two points");
    const double n = static_cast<double>(points.size());
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : points) {
        mx += x;
        my += y;
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [x, y] : points) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if (sxx == 0.0) throw UsageError("fit_slope: all x values coincide");
    return sxy / sxx;
}

}  // namespace spde_mlmc
