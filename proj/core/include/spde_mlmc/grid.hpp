#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace spde_mlmc {

/// One member of the dyadic hierarchy on (0,1) with terminal time T = 1.
///
/// Space and time are coupled so that the time step equals the squared mesh
/// width exactly: h = 2^-level, dt = 4^-level, 2^level - 1 interior nodes and
/// 4^level steps.
struct LevelGeometry {
    int level = 0;
    double mesh_width = 1.0;
    double time_step = 1.0;
    std::size_t dofs = 0;
    std::uint64_t steps = 1;

    /// Coordinate of interior node i (0-based), i.e. (i + 1) * h.
    [[nodiscard]] double node(std::size_t i) const {
        return static_cast<double>(i + 1) * mesh_width;
    }

    friend bool operator==(const LevelGeometry&, const LevelGeometry&) = default;
};

/// Largest level whose step count and nodal counters stay representable.
inline constexpr int kMaxLevel = 30;

/// Throws CapacityError for negative or too-deep levels.
[[nodiscard]] LevelGeometry make_level(int level);

/// Coefficients of a P1 function in the hat basis of a level's interior nodes.
class NodalField {
public:
    NodalField() = default;
    explicit NodalField(const LevelGeometry& geometry);
    NodalField(const LevelGeometry& geometry, std::vector<double> values);

    [[nodiscard]] const LevelGeometry& geometry() const { return geometry_; }
    [[nodiscard]] int level() const { return geometry_.level; }
    [[nodiscard]] std::size_t size() const { return values_.size(); }

    [[nodiscard]] std::span<double> values() { return values_; }
    [[nodiscard]] std::span<const double> values() const { return values_; }

    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }

    NodalField& operator+=(const NodalField& other);
    NodalField& operator-=(const NodalField& other);
    NodalField& operator*=(double factor);

    [[nodiscard]] bool all_finite() const;

    /// Reflection x -> 1 - x of the represented function.
    [[nodiscard]] NodalField flipped() const;

    friend bool operator==(const NodalField&, const NodalField&) = default;

private:
    LevelGeometry geometry_{};
    std::vector<double> values_;
};

[[nodiscard]] NodalField operator+(NodalField lhs, const NodalField& rhs);
[[nodiscard]] NodalField operator-(NodalField lhs, const NodalField& rhs);
[[nodiscard]] NodalField operator*(double factor, NodalField field);

/// Exact injection of the level-(l-1) P1 space into level l: shared nodes keep
/// their coefficient, new midpoints take the mean of their two neighbours.
[[nodiscard]] NodalField prolong(const NodalField& coarse);

/// As above, checking that `fine` is the level directly above the field.
[[nodiscard]] NodalField prolong(const NodalField& coarse, const LevelGeometry& fine);

/// Repeated prolongation up to `target_level` (no-op when already there).
[[nodiscard]] NodalField prolong_to(const NodalField& field, int target_level);

}  // namespace spde_mlmc
