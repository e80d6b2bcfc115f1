#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "spde_mlmc/grid.hpp"
#include "spde_mlmc/rng.hpp"

namespace spde_mlmc {

/// Number of Karhunen-Loeve modes kept on a level. The count depends on the
/// level alone, so a level-l path has the same law whether it is the fine or
/// the coarse member of a coupled pair.
struct TruncationRule {
    enum class Kind { MatchDofs, Fixed };
    Kind kind = Kind::MatchDofs;
    std::size_t fixed_modes = 0;

    [[nodiscard]] std::size_t modes(const LevelGeometry& level) const;

    [[nodiscard]] static TruncationRule match_dofs() { return {}; }
    [[nodiscard]] static TruncationRule fixed(std::size_t modes);
};

/// Eigenvalues q_j = j^-decay of the covariance in the sine basis; decay = 0
/// is space-time white noise.
struct NoiseSpectrum {
    double decay = 0.0;

    [[nodiscard]] double eigenvalue(std::size_t j) const;
};

/// Brownian increments of the first J KL coordinates over every time step of
/// a level. Stored step-major so that one step's increments are contiguous.
class KLBlock {
public:
    KLBlock() = default;
    KLBlock(const LevelGeometry& level, std::size_t modes);

    [[nodiscard]] const LevelGeometry& geometry() const { return level_; }
    [[nodiscard]] std::size_t modes() const { return modes_; }
    [[nodiscard]] std::uint64_t steps() const { return level_.steps; }

    /// Increment of mode j (1-based) over step k (1-based).
    [[nodiscard]] double operator()(std::size_t j, std::uint64_t k) const { return data_[(k - 1) * modes_ + (j - 1)]; }
    double& operator()(std::size_t j, std::uint64_t k) { return data_[(k - 1) * modes_ + (j - 1)]; }

    /// All J increments of step k (1-based).
    [[nodiscard]] std::span<const double> step(std::uint64_t k) const {
        return {data_.data() + (k - 1) * modes_, modes_};
    }

    [[nodiscard]] std::span<double> data() { return data_; }
    [[nodiscard]] std::span<const double> data() const { return data_; }

    [[nodiscard]] bool all_finite() const;

    friend bool operator==(const KLBlock&, const KLBlock&) = default;

private:
    LevelGeometry level_{};
    std::size_t modes_ = 0;
    std::vector<double> data_;
};

/// Entry (j, i) = (e_j, phi_i) in L2(0,1) with e_j = sqrt(2) sin(j pi x) and
/// phi_i the hat function of interior node i.
class ProjectionMatrix {
public:
    ProjectionMatrix() = default;
    ProjectionMatrix(const LevelGeometry& level, std::size_t modes, std::vector<double> entries);

    [[nodiscard]] const LevelGeometry& geometry() const { return level_; }
    [[nodiscard]] std::size_t modes() const { return modes_; }
    [[nodiscard]] std::size_t dofs() const { return level_.dofs; }

    /// j 1-based mode, i 0-based node.
    [[nodiscard]] double operator()(std::size_t j, std::size_t i) const { return entries_[(j - 1) * level_.dofs + i]; }
    [[nodiscard]] std::span<const double> row(std::size_t j) const {
        return {entries_.data() + (j - 1) * level_.dofs, level_.dofs};
    }

private:
    LevelGeometry level_{};
    std::size_t modes_ = 0;
    std::vector<double> entries_;
};

/// Closed form sqrt(2) * 4 / (j^2 pi^2 h) * sin^2(j pi h / 2) * sin(j pi x_i).
[[nodiscard]] ProjectionMatrix projection_matrix(const LevelGeometry& level, std::size_t modes);

/// Increments ~ Normal(0, q_j dt), independent across modes and steps, drawn
/// from the counter-based stream at `coord`.
[[nodiscard]] KLBlock sample_kl_block(const StreamCoordinate& coord, const LevelGeometry& level, std::size_t modes,
                                      const NoiseSpectrum& spectrum = {});

/// Coupled coarse increments: each coarse step sums four consecutive fine
/// steps (ascending order) of the first `coarse_modes` modes.
[[nodiscard]] KLBlock coarsen_block(const KLBlock& fine, std::size_t coarse_modes);

/// Load vector (dW_k, phi_i) = sum_j dW_{j,k} (e_j, phi_i) for step k (1-based).
void noise_load(const KLBlock& block, std::uint64_t k, const ProjectionMatrix& proj, std::span<double> load);
[[nodiscard]] std::vector<double> noise_load(const KLBlock& block, std::uint64_t k, const ProjectionMatrix& proj);

}  // namespace spde_mlmc
