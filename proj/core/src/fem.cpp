#include "spde_mlmc/fem.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "spde_mlmc/error.hpp"

namespace spde_mlmc {

TridiagonalMatrix::TridiagonalMatrix(std::size_t n, double d, double off)
    : sub(n > 0 ? n - 1 : 0, off), diag(n, d), super(n > 0 ? n - 1 : 0, off) {}

void TridiagonalMatrix::validate() const {
    const std::size_t off = diag.empty() ? 0 : diag.size() - 1;
    if (sub.size() != off || super.size() != off) {
        throw UsageError("TridiagonalMatrix: band lengths inconsistent with size " + std::to_string(diag.size()));
    }
}

void TridiagonalMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    const std::size_t n = diag.size();
    if (x.size() != n || y.size() != n) throw UsageError("TridiagonalMatrix::multiply: size mismatch");
    if (n == 0) return;
    if (n == 1) {
        y[0] = diag[0] * x[0];
        return;
    }
    y[0] = diag[0] * x[0] + super[0] * x[1];
    for (std::size_t i = 1; i + 1 < n; ++i) y[i] = sub[i - 1] * x[i - 1] + diag[i] * x[i] + super[i] * x[i + 1];
    y[n - 1] = sub[n - 2] * x[n - 2] + diag[n - 1] * x[n - 1];
}

std::vector<double> TridiagonalMatrix::multiply(std::span<const double> x) const {
    std::vector<double> y(diag.size());
    multiply(x, y);
    return y;
}

TridiagonalMatrix combine(double a, const TridiagonalMatrix& A, double b, const TridiagonalMatrix& B) {
    if (A.size() != B.size()) throw UsageError("combine: size mismatch");
    TridiagonalMatrix out(A.size());
    for (std::size_t i = 0; i < A.diag.size(); ++i) out.diag[i] = a * A.diag[i] + b * B.diag[i];
    for (std::size_t i = 0; i < A.sub.size(); ++i) {
        out.sub[i] = a * A.sub[i] + b * B.sub[i];
        out.super[i] = a * A.super[i] + b * B.super[i];
    }
    return out;
}

double residual_max_norm(const TridiagonalMatrix& A, std::span<const double> x, std::span<const double> rhs) {
    const std::vector<double> ax = A.multiply(x);
    double r = 0.0;
    for (std::size_t i = 0; i < ax.size(); ++i) r = std::max(r, std::abs(ax[i] - rhs[i]));
    return r;
}

ThomasFactorization::ThomasFactorization(const TridiagonalMatrix& m) {
    m.validate();
    const std::size_t n = m.size();
    sub_ = m.sub;
    pivot_.resize(n);
    upper_.resize(n > 0 ? n - 1 : 0);
    for (std::size_t i = 0; i < n; ++i) {
        double p = m.diag[i];
        if (i > 0) p -= m.sub[i - 1] * upper_[i - 1];
        if (p == 0.0 || !std::isfinite(p)) {
            throw NumericalError("thomas_solve: zero pivot at row " + std::to_string(i));
        }
        pivot_[i] = p;
        if (i + 1 < n) upper_[i] = m.super[i] / p;
    }
}

void ThomasFactorization::solve_in_place(std::span<double> x) const {
    const std::size_t n = pivot_.size();
    if (x.size() != n) throw UsageError("thomas_solve: right-hand side has wrong length");
    if (n == 0) return;
    x[0] /= pivot_[0];
    for (std::size_t i = 1; i < n; ++i) x[i] = (x[i] - sub_[i - 1] * x[i - 1]) / pivot_[i];
    for (std::size_t i = n - 1; i-- > 0;) x[i] -= upper_[i] * x[i + 1];
}

std::vector<double> thomas_solve(const TridiagonalMatrix& m, std::span<const double> rhs) {
    ThomasFactorization f(m);
    std::vector<double> x(rhs.begin(), rhs.end());
    f.solve_in_place(x);
    return x;
}

LevelOperators assemble(const LevelGeometry& level) {
    if (level.dofs == 0) throw UsageError("assemble: level " + std::to_string(level.level) + " has no interior nodes");
    const double h = level.mesh_width;
    return {TridiagonalMatrix(level.dofs, 2.0 * h / 3.0, h / 6.0), TridiagonalMatrix(level.dofs, 2.0 / h, -1.0 / h)};
}

double mass_inner(const TridiagonalMatrix& mass, std::span<const double> u, std::span<const double> v) {
    const std::vector<double> mv = mass.multiply(v);
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * mv[i];
    return s;
}

NodalField initial_field(const LevelGeometry& level) {
    if (level.dofs == 0) throw UsageError("initial_field: empty space at level 0");
    NodalField f(level);
    for (std::size_t i = 0; i < level.dofs; ++i) f[i] = std::sin(std::numbers::pi * level.node(i));
    return f;
}

SemiImplicitStepper::SemiImplicitStepper(const LevelGeometry& level, const LevelOperators& ops)
    : level_(level),
      mass_(ops.mass),
      system_(combine(1.0, ops.mass, level.time_step, ops.stiffness)),
      factor_(system_) {
    if (mass_.size() != level.dofs) throw UsageError("SemiImplicitStepper: operators do not match level");
}

void SemiImplicitStepper::step(std::span<double> state, const DriftSpec& drift, std::span<const double> noise_load,
                               std::vector<double>& scratch) const {
    const std::size_t n = level_.dofs;
    if (state.size() != n) throw UsageError("euler_step: state does not belong to this level");
    if (!noise_load.empty() && noise_load.size() != n) throw UsageError("euler_step: noise load has wrong length");

    scratch.resize(n);
    mass_.multiply(state, scratch);
    if (!drift.is_zero()) {
        std::vector<double> f(n);
        for (std::size_t i = 0; i < n; ++i) f[i] = drift.function(state[i]);
        const std::vector<double> mf = mass_.multiply(f);
        const double dt = level_.time_step;
        for (std::size_t i = 0; i < n; ++i) scratch[i] += dt * mf[i];
    }
    if (!noise_load.empty()) {
        for (std::size_t i = 0; i < n; ++i) scratch[i] += noise_load[i];
    }
    factor_.solve_in_place(scratch);
    std::copy(scratch.begin(), scratch.end(), state.begin());
}

NodalField euler_step(const LevelGeometry& level, const TridiagonalMatrix& mass, const TridiagonalMatrix& stiffness,
                      const NodalField& state, const DriftSpec& drift, std::span<const double> noise_load) {
    if (state.level() != level.level) throw UsageError("euler_step: state level mismatch");
    const SemiImplicitStepper stepper(level, LevelOperators{mass, stiffness});
    NodalField next = state;
    std::vector<double> scratch;
    stepper.step(next.values(), drift, noise_load, scratch);
    return next;
}

NodalField run_deterministic(const LevelGeometry& level) {
    const SemiImplicitStepper stepper(level, assemble(level));
    NodalField state = initial_field(level);
    std::vector<double> scratch;
    const DriftSpec none = DriftSpec::zero();
    for (std::uint64_t k = 0; k < level.steps; ++k) stepper.step(state.values(), none, {}, scratch);
    return state;
}

}  // namespace spde_mlmc
