#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "spde_mlmc/fem.hpp"
#include "spde_mlmc/grid.hpp"
#include "spde_mlmc/noise.hpp"
#include "spde_mlmc/rng.hpp"

namespace spde_mlmc {

// ---------------------------------------------------------------------------
// Sample schedules
// ---------------------------------------------------------------------------

enum class ScheduleMode { Singlelevel, Strong, Weak, General };

[[nodiscard]] std::string_view to_string(ScheduleMode mode);
/// Throws UsageError for unknown names.
[[nodiscard]] ScheduleMode parse_schedule_mode(std::string_view name);

/// Refinement sequence a_0 > a_1 > ... > a_L > 0 and variance order eta for
/// the general schedule.
struct GeneralSequence {
    std::vector<double> a;
    double eta = 1.0;

    /// a_l = 2^(-rate * l), l = 0..top_level.
    [[nodiscard]] static GeneralSequence geometric(int top_level, double rate, double eta);
};

struct ScheduleParams {
    double gamma = 0.5;
    double eps = 1.0;
    /// Multiplies every count before rounding up; 1 reproduces the bare formulas.
    double constant = 1.0;
    std::optional<GeneralSequence> general;
};

/// Which count drives the term on the coarsest mesh of a hierarchy.
/// Level: N_{min_level}, reading mesh 0 (no interior nodes) as Y_0 = 0 so the
/// first nonempty mesh is an ordinary difference term Y_1 - 0.
/// Coarsest: N_0, i.e. E_{N_0}[Y_{min_level}].
enum class BaseCount { Level, Coarsest };

[[nodiscard]] std::string_view to_string(BaseCount rule);
[[nodiscard]] BaseCount parse_base_count(std::string_view name);

/// Per-level sample counts N_0..N_L for the multilevel modes.
/// A singlelevel schedule holds the single count N for its top level.
struct SampleSchedule {
    ScheduleMode mode = ScheduleMode::Weak;
    int top_level = 1;
    ScheduleParams params;
    std::vector<std::uint64_t> counts;

    /// Count used for mesh `level` of a hierarchy whose coarsest mesh is
    /// `min_level`. Above the base term this is always N_level.
    [[nodiscard]] std::uint64_t count_for(int level, int min_level, BaseCount rule = BaseCount::Level) const;

    /// eps = 0 lies outside the convergence theory for the multilevel modes.
    [[nodiscard]] bool outside_theory() const;

    /// Convergence rate a_l and variance order eta backing the counts.
    [[nodiscard]] double refinement(int level) const;
    [[nodiscard]] double eta() const;
};

/// Strong:  N_0 = ceil(h_L^-2g),  N_l = ceil(h_L^-2g h_l^2g l^(1+eps))
/// Weak:    N_0 = ceil(h_L^-4g),  N_l = ceil(h_L^-4g h_l^2g l^(1+eps))
/// General: N_0 = ceil(a_L^-2),   N_l = ceil(a_L^-2 a_l^(2 eta) l^(1+eps))
/// Singlelevel: N = ceil(h_L^-4g)
/// with h_l = 2^-l. Throws UsageError for L < 1, gamma outside (0,1) or eps < 0.
[[nodiscard]] SampleSchedule build_schedule(ScheduleMode mode, int top_level, const ScheduleParams& params);
[[nodiscard]] SampleSchedule build_schedule(ScheduleMode mode, int top_level, double gamma, double eps);

// ---------------------------------------------------------------------------
// Functionals
// ---------------------------------------------------------------------------

struct FunctionalSpec {
    enum class Kind { Identity, SquaredNorm, Custom };
    Kind kind = Kind::Identity;
    std::function<double(const NodalField&)> custom;

    [[nodiscard]] bool is_scalar() const { return kind != Kind::Identity; }

    [[nodiscard]] static FunctionalSpec identity() { return {}; }
    [[nodiscard]] static FunctionalSpec squared_norm() { return {Kind::SquaredNorm, {}}; }
    [[nodiscard]] static FunctionalSpec scalar(std::function<double(const NodalField&)> f) {
        return {Kind::Custom, std::move(f)};
    }
};

using FunctionalValue = std::variant<NodalField, double>;

/// Identity returns the field; squared norm is u^T M u.
[[nodiscard]] FunctionalValue apply_functional(const FunctionalSpec& spec, const NodalField& field);
[[nodiscard]] double squared_l2_norm(const NodalField& field);

// ---------------------------------------------------------------------------
// Path sampling
// ---------------------------------------------------------------------------

struct SamplerOptions {
    DriftSpec drift;
    TruncationRule truncation;
    NoiseSpectrum spectrum;
    /// Drop the stochastic forcing entirely (deterministic oracle runs).
    bool zero_noise = false;
};

struct SamplePair {
    NodalField fine;
    std::optional<NodalField> coarse;
};

/// Cached per-level operators (assembly, factored step matrix, KL projection)
/// for levels 1..max_level. Immutable after construction, so one sampler can
/// be shared by all workers.
class PathSampler {
public:
    PathSampler(int max_level, SamplerOptions options = {});

    [[nodiscard]] int max_level() const { return max_level_; }
    [[nodiscard]] const SamplerOptions& options() const { return options_; }
    [[nodiscard]] std::size_t modes(int level) const;
    [[nodiscard]] const LevelGeometry& geometry(int level) const;
    [[nodiscard]] const TridiagonalMatrix& mass(int level) const;

    /// Path on `level` driven by `block` (nullptr: no noise). The block must
    /// carry exactly modes(level) modes.
    [[nodiscard]] NodalField simulate(int level, const KLBlock* block) const;

    /// Fine path on `level`; if level > min_level also the coarse path on
    /// level - 1, driven by the coarsened increments of the same block.
    [[nodiscard]] SamplePair sample_pair(int level, int min_level, const StreamCoordinate& coord) const;

    /// Operation count of one path: dofs x steps.
    [[nodiscard]] static std::uint64_t path_work(int level);

private:
    struct LevelContext {
        LevelGeometry geometry;
        LevelOperators ops;
        SemiImplicitStepper stepper;
        ProjectionMatrix projection;
    };
    [[nodiscard]] const LevelContext& context(int level) const;

    int max_level_;
    SamplerOptions options_;
    std::vector<LevelContext> levels_;
};

// ---------------------------------------------------------------------------
// Estimators
// ---------------------------------------------------------------------------

struct ScalarEstimate {
    double mean = 0.0;
    double variance = 0.0;
    std::uint64_t samples = 0;
};

/// Plain Monte Carlo mean of sampler(0..n-1) with unbiased sample variance.
[[nodiscard]] ScalarEstimate mc_estimate(const std::function<double(std::uint64_t)>& sampler, std::uint64_t n,
                                         unsigned workers = 1);

struct FieldEstimate {
    NodalField mean;
    /// E||Y - E Y||^2 in L2(0,1).
    double variance = 0.0;
    std::uint64_t samples = 0;
};

[[nodiscard]] FieldEstimate mc_estimate_field(const std::function<NodalField(std::uint64_t)>& sampler,
                                              std::uint64_t n, const LevelGeometry& level, unsigned workers = 1);

struct LevelStat {
    int level = 0;
    std::uint64_t samples = 0;
    FunctionalValue mean;
    /// Var[Y_l - Y_{l-1}]; Var[Y_l] for the base term.
    double variance_of_difference = 0.0;
    /// Var[Y_l] of the fine member alone.
    double variance_of_level = 0.0;
    std::uint64_t op_work = 0;
    double wall_seconds = 0.0;
};

struct MlmcResult {
    FunctionalValue estimate;
    std::vector<LevelStat> levels;
    std::uint64_t sample_work = 0;
    std::uint64_t summation_work = 0;
    std::uint64_t total_work = 0;
    SampleSchedule schedule;
    std::uint64_t seed = 0;
    double wall_seconds = 0.0;

    [[nodiscard]] const NodalField& field() const { return std::get<NodalField>(estimate); }
    [[nodiscard]] double scalar() const { return std::get<double>(estimate); }
};

struct MlmcOptions {
    int min_level = 1;
    FunctionalSpec functional;
    std::uint64_t seed = 0;
    std::uint32_t replicate = 0;
    /// Study tag folded into every stream coordinate.
    std::uint32_t stream = 0;
    unsigned workers = 1;
    BaseCount base_count = BaseCount::Level;
};

/// E^L = E_{N_b}[Y_{min}] + sum_{l > min} E_{N_l}[Y_l - Y_{l-1}], with N_b
/// chosen by options.base_count and each
/// level term prolonged to level L in identity mode. Samples for level l use
/// coordinates (seed, l, i, replicate, stream), i = 0..N_l-1. Singlelevel
/// schedules estimate E_N[Y_L] directly.
[[nodiscard]] MlmcResult mlmc_estimate(const PathSampler& sampler, const SampleSchedule& schedule,
                                       const MlmcOptions& options);

/// Statistics of coupled pairs on one level, as used for variance-decay studies.
struct PairStatistics {
    int level = 0;
    std::uint64_t pairs = 0;
    double variance_of_difference = 0.0;
    double variance_of_level = 0.0;
};

[[nodiscard]] PairStatistics pair_statistics(const PathSampler& sampler, int level, int min_level,
                                             std::uint64_t pairs, const MlmcOptions& options);

// ---------------------------------------------------------------------------
// Work model
// ---------------------------------------------------------------------------

struct WorkModelConstants {
    double per_sample = 1.0;
    double summation = 1.0;
};

/// Asymptotic work exponents of the error tolerance eps_L:
/// work ~ eps_L^exponent (times |log2 eps_L| for the multilevel entries).
struct ComplexityExponents {
    double monte_carlo = 0.0;
    double mlmc_strong = 0.0;
    double mlmc_weak = 0.0;
};

[[nodiscard]] ComplexityExponents complexity_exponents(double gamma, double d);

struct WorkPrediction {
    std::vector<int> level_index;
    std::vector<double> per_level;
    double sampling = 0.0;
    double summation = 0.0;
    double total = 0.0;
    ComplexityExponents exponents;
    /// Work bound W_L = O(a_L^-bound_exponent L^log_power).
    bool kappa_below_two_eta = false;
    double bound_exponent = 0.0;
    double log_power = 0.0;
    /// zeta(1 + eps) from the error bound; +inf at eps = 0.
    double zeta = 0.0;
};

/// W_L = sum_l N_l c h_l^-(d+2) + c' h_L^-delta for the levels of a hierarchy
/// starting at `min_level`, plus the asymptotic exponents and the bound branch
/// selected by kappa versus 2 eta.
[[nodiscard]] WorkPrediction predict_work(const SampleSchedule& schedule, int min_level, double d, double kappa,
                                          double delta, const WorkModelConstants& constants = {},
                                          BaseCount rule = BaseCount::Level);

}  // namespace spde_mlmc
