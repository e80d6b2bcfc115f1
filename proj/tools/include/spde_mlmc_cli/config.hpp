#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spde_mlmc/mlmc.hpp"

namespace spde_mlmc::cli {

/// Inclusive level range "a..b" or a single level "a".
struct LevelRange {
    int first = 1;
    int last = 1;

    [[nodiscard]] std::vector<int> levels() const;
    [[nodiscard]] std::string str() const;
    bool operator==(const LevelRange&) const = default;
};

/// Throws UsageError for malformed text, first > last or levels outside
/// [lo, hi].
[[nodiscard]] LevelRange parse_level_range(std::string_view text, int lo = 1, int hi = kMaxLevel);

enum class Command { DetConv, Variance, Run, Compare };

[[nodiscard]] std::string_view to_string(Command c);

/// Every setting that can influence an output file, plus the execution-only
/// settings (workers, output directory) that must not.
struct RunConfig {
    Command command = Command::Run;

    LevelRange levels;          // det-conv, variance
    LevelRange top_levels;      // run, compare (weak side)
    LevelRange strong_levels;   // compare (strong side)
    int min_level = 1;

    std::vector<ScheduleMode> modes;
    double gamma = 0.5;
    double eps = 1.0;
    double constant = 1.0;
    BaseCount base_count = BaseCount::Level;

    // Refinement sequence of the general mode: either explicit values or
    // a_l = 2^(-rate l).
    std::vector<double> general_sequence;
    double general_rate = 0.5;
    double general_eta = 1.0;

    std::uint32_t reps = 10;
    std::uint64_t pairs = 1000;
    std::optional<std::uint64_t> seed;

    TruncationRule truncation;
    double spectrum_decay = 0.0;
    FunctionalSpec::Kind functional = FunctionalSpec::Kind::Identity;
    /// Reference grid size for e1; 0 selects 2^max(L,5) + 1 per run.
    std::size_t m = 0;
    /// Drift F(u) = drift * sin(u); 0 leaves the equation linear.
    double drift = 0.0;
    bool zero_noise = false;

    unsigned workers = 1;
    std::string out_dir = ".";

    /// Throws UsageError on any inconsistency, including a missing seed.
    void validate() const;

    /// Sorted key=value lines of every output-relevant setting. Workers and
    /// the output directory are excluded.
    [[nodiscard]] std::vector<std::pair<std::string, std::string>> canonical() const;

    /// 64-bit FNV-1a of the canonical lines, as 16 hex digits.
    [[nodiscard]] std::string hash() const;

    [[nodiscard]] SamplerOptions sampler_options() const;
    [[nodiscard]] ScheduleParams schedule_params(ScheduleMode mode, int top_level) const;
    [[nodiscard]] FunctionalSpec functional_spec() const;
};

[[nodiscard]] TruncationRule parse_truncation(std::string_view text);
[[nodiscard]] std::string to_string(const TruncationRule& rule);
[[nodiscard]] std::vector<ScheduleMode> parse_modes(std::string_view text);
[[nodiscard]] std::vector<double> parse_real_list(std::string_view text);

/// Shortest round-trip representation.
[[nodiscard]] std::string format_real(double x);

}  // namespace spde_mlmc::cli
