#include "spde_mlmc/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spde_mlmc/error.hpp"

namespace spde_mlmc {

LevelGeometry make_level(int level) {
    if (level < 0) throw UsageError("make_level: level must be nonnegative, got " + std::to_string(level));
    if (level > kMaxLevel) {
        throw CapacityError("make_level: level " + std::to_string(level) + " exceeds capacity (max " +
                            std::to_string(kMaxLevel) + ")");
    }
    LevelGeometry g;
    g.level = level;
    g.mesh_width = std::ldexp(1.0, -level);
    g.time_step = std::ldexp(1.0, -2 * level);
    g.dofs = (std::size_t{1} << level) - 1;
    g.steps = std::uint64_t{1} << (2 * level);
    return g;
}

NodalField::NodalField(const LevelGeometry& geometry) : geometry_(geometry), values_(geometry.dofs, 0.0) {}

NodalField::NodalField(const LevelGeometry& geometry, std::vector<double> values)
    : geometry_(geometry), values_(std::move(values)) {
    if (values_.size() != geometry_.dofs) {
        throw UsageError("NodalField: expected " + std::to_string(geometry_.dofs) + " values, got " +
                         std::to_string(values_.size()));
    }
}

namespace {
void require_same_level(const NodalField& a, const NodalField& b, const char* op) {
    if (a.level() != b.level()) {
        throw UsageError(std::string("NodalField ") + op + ": level mismatch (" + std::to_string(a.level()) +
                         " vs " + std::to_string(b.level()) + ")");
    }
}
}  // namespace

NodalField& NodalField::operator+=(const NodalField& other) {
    require_same_level(*this, other, "+=");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    return *this;
}

NodalField& NodalField::operator-=(const NodalField& other) {
    require_same_level(*this, other, "-=");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
    return *this;
}

NodalField& NodalField::operator*=(double factor) {
    for (double& v : values_) v *= factor;
    return *this;
}

bool NodalField::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

NodalField NodalField::flipped() const {
    NodalField out(geometry_);
    std::reverse_copy(values_.begin(), values_.end(), out.values_.begin());
    return out;
}

NodalField operator+(NodalField lhs, const NodalField& rhs) { return lhs += rhs; }
NodalField operator-(NodalField lhs, const NodalField& rhs) { return lhs -= rhs; }
NodalField operator*(double factor, NodalField field) { return field *= factor; }

NodalField prolong(const NodalField& coarse) {
    const LevelGeometry fine_geometry = make_level(coarse.level() + 1);
    NodalField fine(fine_geometry);
    const auto c = coarse.values();
    const std::size_t nc = c.size();
    // Coarse node i (0-based) sits at fine index 2i+1; fine index 2i is the
    // midpoint between coarse nodes i-1 and i (boundary values are zero).
    for (std::size_t i = 0; i < nc; ++i) fine[2 * i + 1] = c[i];
    for (std::size_t i = 0; i <= nc; ++i) {
        const double left = i == 0 ? 0.0 : c[i - 1];
        const double right = i == nc ? 0.0 : c[i];
        fine[2 * i] = 0.5 * (left + right);
    }
    return fine;
}

NodalField prolong(const NodalField& coarse, const LevelGeometry& fine) {
    if (fine.level != coarse.level() + 1) {
        throw UsageError("prolong: field at level " + std::to_string(coarse.level()) +
                         " cannot be prolonged onto level " + std::to_string(fine.level));
    }
    return prolong(coarse);
}

NodalField prolong_to(const NodalField& field, int target_level) {
    if (target_level < field.level()) {
        throw UsageError("prolong_to: target level " + std::to_string(target_level) + " below field level " +
                         std::to_string(field.level()));
    }
    NodalField out = field;
    while (out.level() < target_level) out = prolong(out);
    return out;
}

}  // namespace spde_mlmc
