#include "spde_mlmc/noise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "spde_mlmc/error.hpp"

namespace spde_mlmc {

std::size_t TruncationRule::modes(const LevelGeometry& level) const {
    switch (kind) {
        case Kind::MatchDofs: return level.dofs;
        case Kind::Fixed: return fixed_modes;
    }
    return level.dofs;
}

TruncationRule TruncationRule::fixed(std::size_t modes) {
    if (modes == 0) throw UsageError("TruncationRule: fixed mode count must be positive");
    return {Kind::Fixed, modes};
}

double NoiseSpectrum::eigenvalue(std::size_t j) const {
    return decay == 0.0 ? 1.0 : std::pow(static_cast<double>(j), -decay);
}

KLBlock::KLBlock(const LevelGeometry& level, std::size_t modes) : level_(level), modes_(modes) {
    if (modes != 0 && level.steps > NormalStream::kCapacity / modes) {
        throw CapacityError("KLBlock: " + std::to_string(modes) + " modes x " + std::to_string(level.steps) +
                            " steps exceeds capacity");
    }
    data_.assign(static_cast<std::size_t>(level.steps) * modes, 0.0);
}

bool KLBlock::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

ProjectionMatrix::ProjectionMatrix(const LevelGeometry& level, std::size_t modes, std::vector<double> entries)
    : level_(level), modes_(modes), entries_(std::move(entries)) {
    if (entries_.size() != modes * level.dofs) throw UsageError("ProjectionMatrix: entry count mismatch");
}

ProjectionMatrix projection_matrix(const LevelGeometry& level, std::size_t modes) {
    if (modes == 0) throw UsageError("projection_matrix: need at least one mode");
    if (level.dofs == 0) throw UsageError("projection_matrix: empty space at level 0");
    const double h = level.mesh_width;
    std::vector<double> entries(modes * level.dofs);
    for (std::size_t j = 1; j <= modes; ++j) {
        const double w = static_cast<double>(j) * std::numbers::pi;
        const double s = std::sin(0.5 * w * h);
        const double scale = std::numbers::sqrt2 * 4.0 * s * s / (w * w * h);
        for (std::size_t i = 0; i < level.dofs; ++i) {
            // j * (i + 1) is an integer multiple of 2^level exactly when the sine vanishes.
            const std::uint64_t phase = static_cast<std::uint64_t>(j) * (i + 1);
            const bool zero = (phase & ((std::uint64_t{1} << level.level) - 1)) == 0;
            entries[(j - 1) * level.dofs + i] = zero ? 0.0 : scale * std::sin(w * level.node(i));
        }
    }
    return ProjectionMatrix(level, modes, std::move(entries));
}

KLBlock sample_kl_block(const StreamCoordinate& coord, const LevelGeometry& level, std::size_t modes,
                        const NoiseSpectrum& spectrum) {
    KLBlock block(level, modes);
    NormalStream stream(coord);
    auto data = block.data();
    stream.fill(0, data);

    std::vector<double> scale(modes);
    for (std::size_t j = 1; j <= modes; ++j) scale[j - 1] = std::sqrt(spectrum.eigenvalue(j) * level.time_step);
    for (std::size_t e = 0; e < data.size(); e += modes) {
        for (std::size_t j = 0; j < modes; ++j) data[e + j] *= scale[j];
    }
    return block;
}

KLBlock coarsen_block(const KLBlock& fine, std::size_t coarse_modes) {
    if (fine.geometry().level < 1) throw UsageError("coarsen_block: fine block is already on level 0");
    if (coarse_modes > fine.modes()) {
        throw UsageError("coarsen_block: requested " + std::to_string(coarse_modes) + " modes from a block with " +
                         std::to_string(fine.modes()));
    }
    if (fine.steps() % 4 != 0) throw UsageError("coarsen_block: fine step count not divisible by 4");

    KLBlock coarse(make_level(fine.geometry().level - 1), coarse_modes);
    for (std::uint64_t K = 1; K <= coarse.steps(); ++K) {
        for (std::size_t j = 1; j <= coarse_modes; ++j) {
            double s = fine(j, 4 * K - 3);
            s += fine(j, 4 * K - 2);
            s += fine(j, 4 * K - 1);
            s += fine(j, 4 * K);
            coarse(j, K) = s;
        }
    }
    return coarse;
}

void noise_load(const KLBlock& block, std::uint64_t k, const ProjectionMatrix& proj, std::span<double> load) {
    if (block.modes() != proj.modes() || block.geometry().level != proj.geometry().level) {
        throw UsageError("noise_load: block and projection disagree on modes or level");
    }
    if (k < 1 || k > block.steps()) throw UsageError("noise_load: step index " + std::to_string(k) + " out of range");
    if (load.size() != proj.dofs()) throw UsageError("noise_load: output has wrong length");

    std::fill(load.begin(), load.end(), 0.0);
    const auto dw = block.step(k);
    const std::size_t n = proj.dofs();
    for (std::size_t j = 1; j <= proj.modes(); ++j) {
        const double c = dw[j - 1];
        const double* row = proj.row(j).data();
        for (std::size_t i = 0; i < n; ++i) load[i] += c * row[i];
    }
}

std::vector<double> noise_load(const KLBlock& block, std::uint64_t k, const ProjectionMatrix& proj) {
    std::vector<double> load(proj.dofs());
    noise_load(block, k, proj, load);
    return load;
}

}  // namespace spde_mlmc
