#pragma once

#include <functional>
#include <span>
#include <vector>

#include "spde_mlmc/grid.hpp"

namespace spde_mlmc {

/// Tridiagonal matrix stored by bands. `sub[i]` couples row i+1 to column i,
/// `super[i]` couples row i to column i+1.
struct TridiagonalMatrix {
    std::vector<double> sub;
    std::vector<double> diag;
    std::vector<double> super;

    TridiagonalMatrix() = default;
    explicit TridiagonalMatrix(std::size_t n, double d = 0.0, double off = 0.0);

    [[nodiscard]] std::size_t size() const { return diag.size(); }
    [[nodiscard]] bool is_symmetric() const { return sub == super; }

    /// Throws UsageError if band lengths are inconsistent.
    void validate() const;

    /// y = A x
    void multiply(std::span<const double> x, std::span<double> y) const;
    [[nodiscard]] std::vector<double> multiply(std::span<const double> x) const;

    friend bool operator==(const TridiagonalMatrix&, const TridiagonalMatrix&) = default;
};

/// a * A + b * B for matrices of the same size.
[[nodiscard]] TridiagonalMatrix combine(double a, const TridiagonalMatrix& A, double b, const TridiagonalMatrix& B);

/// max_i |(A x - rhs)_i|
[[nodiscard]] double residual_max_norm(const TridiagonalMatrix& A, std::span<const double> x,
                                       std::span<const double> rhs);

/// Forward-elimination coefficients of the Thomas algorithm, reusable across
/// right-hand sides. Solving through a cached factorization is bitwise
/// identical to `thomas_solve` on the same matrix.
class ThomasFactorization {
public:
    ThomasFactorization() = default;
    /// Throws NumericalError on a zero (or non-finite) pivot.
    explicit ThomasFactorization(const TridiagonalMatrix& m);

    [[nodiscard]] std::size_t size() const { return pivot_.size(); }

    /// Solves in place: `x` holds the right-hand side on entry.
    void solve_in_place(std::span<double> x) const;

private:
    std::vector<double> sub_;
    std::vector<double> pivot_;
    std::vector<double> upper_;  // super[i] / pivot[i]
};

[[nodiscard]] std::vector<double> thomas_solve(const TridiagonalMatrix& m, std::span<const double> rhs);

struct LevelOperators {
    TridiagonalMatrix mass;
    TridiagonalMatrix stiffness;
};

/// P1 mass and stiffness matrices with homogeneous Dirichlet conditions.
/// Throws UsageError for the empty level-0 space.
[[nodiscard]] LevelOperators assemble(const LevelGeometry& level);

/// u^T M v with the level's mass matrix, i.e. the L2(0,1) inner product.
[[nodiscard]] double mass_inner(const TridiagonalMatrix& mass, std::span<const double> u, std::span<const double> v);

/// Nodewise drift F applied to the state. The function must be globally
/// Lipschitz; this is a documented contract and is not checked.
struct DriftSpec {
    std::function<double(double)> function;

    [[nodiscard]] bool is_zero() const { return !function; }
    [[nodiscard]] static DriftSpec zero() { return {}; }
};

/// Nodal interpolant of sin(pi x).
[[nodiscard]] NodalField initial_field(const LevelGeometry& level);

/// Semi-implicit Euler-Maruyama step on one level:
///   (M + dt K) x_k = M x_{k-1} + dt M F(x_{k-1}) + load
/// with the system matrix factored once at construction.
class SemiImplicitStepper {
public:
    SemiImplicitStepper(const LevelGeometry& level, const LevelOperators& ops);

    [[nodiscard]] const LevelGeometry& geometry() const { return level_; }
    [[nodiscard]] const TridiagonalMatrix& mass() const { return mass_; }
    [[nodiscard]] const TridiagonalMatrix& system() const { return system_; }

    /// Advances `state` by one step. `noise_load` may be empty (no noise);
    /// otherwise it must have one entry per interior node. `scratch` is reused
    /// between calls to avoid allocation.
    void step(std::span<double> state, const DriftSpec& drift, std::span<const double> noise_load,
              std::vector<double>& scratch) const;

private:
    LevelGeometry level_;
    TridiagonalMatrix mass_;
    TridiagonalMatrix system_;
    ThomasFactorization factor_;
};

/// One step from `state`, assembling and factoring on the fly.
[[nodiscard]] NodalField euler_step(const LevelGeometry& level, const TridiagonalMatrix& mass,
                                    const TridiagonalMatrix& stiffness, const NodalField& state,
                                    const DriftSpec& drift, std::span<const double> noise_load);

/// Noise-free, drift-free solution at T = 1 starting from `initial_field`.
[[nodiscard]] NodalField run_deterministic(const LevelGeometry& level);

}  // namespace spde_mlmc
