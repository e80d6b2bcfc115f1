#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spde_mlmc_cli/config.hpp"

namespace spde_mlmc::cli {

inline constexpr int kSchemaVersion = 1;

/// One generated artifact: file name relative to the output directory and
/// its full contents.
struct OutputFile {
    std::string name;
    std::string contents;
};

struct DetConvRow {
    int level = 0;
    double h = 0.0;
    double dt = 0.0;
    double l2_error = 0.0;
};

struct DetConvReport {
    std::vector<DetConvRow> rows;
    std::optional<double> slope;
    std::vector<OutputFile> files;
};

struct VarianceRow {
    int level = 0;
    std::uint64_t pairs = 0;
    double variance_of_difference = 0.0;
    double variance_of_level = 0.0;
};

struct VarianceReport {
    std::vector<VarianceRow> rows;
    std::optional<double> slope;
    std::vector<OutputFile> files;
};

struct LevelSummary {
    int level = 0;
    std::uint64_t samples = 0;
    std::uint64_t op_work = 0;
    double mean_variance_of_difference = 0.0;
    double mean_variance_of_level = 0.0;
};

/// Replicated MLMC runs for one (mode, L).
struct RunRow {
    ScheduleMode mode = ScheduleMode::Weak;
    int L = 0;
    /// e1 per replicate for the identity functional; |estimate - E||X(1)||^2|
    /// for the squared norm.
    std::vector<double> errors;
    double eN = 0.0;
    /// Work of one replicate (identical for all replicates).
    std::uint64_t op_work = 0;
    std::uint64_t sample_work = 0;
    std::uint64_t summation_work = 0;
    std::vector<LevelSummary> levels;
    double wall_seconds = 0.0;
};

struct ModeSlope {
    ScheduleMode mode = ScheduleMode::Weak;
    double error_slope = 0.0;
};

struct RunReport {
    std::vector<RunRow> rows;
    std::vector<ModeSlope> slopes;
    std::vector<OutputFile> files;
};

/// Weak-schedule result paired with the smallest strong L' whose eN is not
/// larger.
struct MatchRow {
    int weak_L = 0;
    double weak_eN = 0.0;
    std::uint64_t weak_work = 0;
    std::optional<int> strong_L;
    double strong_eN = 0.0;
    std::uint64_t strong_work = 0;

    [[nodiscard]] bool weak_cheaper() const { return strong_L && weak_work < strong_work; }
};

struct CompareReport {
    std::vector<RunRow> rows;
    std::vector<MatchRow> matches;
    std::vector<OutputFile> files;
};

[[nodiscard]] DetConvReport cmd_det_conv(const RunConfig& config);
[[nodiscard]] VarianceReport cmd_variance(const RunConfig& config);
[[nodiscard]] RunReport cmd_run(const RunConfig& config);
[[nodiscard]] CompareReport cmd_compare(const RunConfig& config);

/// For every weak row, the smallest strong L with eN <= the weak eN.
[[nodiscard]] std::vector<MatchRow> match_accuracy(const std::vector<RunRow>& rows);

/// Stream tag separating the studies: (mode << 8) | L for MLMC runs.
[[nodiscard]] std::uint32_t run_stream_tag(ScheduleMode mode, int L);
inline constexpr std::uint32_t kVarianceStreamTag = 0x400;

/// Creates the directory if needed; throws UsageError when it cannot be written.
void write_outputs(const std::vector<OutputFile>& files, const std::string& dir);

}  // namespace spde_mlmc::cli
