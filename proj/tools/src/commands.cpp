#include "spde_mlmc_cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "spde_mlmc/error.hpp"
#include "spde_mlmc/metrics.hpp"

#ifndef SPDE_MLMC_VERSION
#define SPDE_MLMC_VERSION "0.0.0"
#endif

namespace spde_mlmc::cli {

namespace {

std::string metadata(const RunConfig& config) {
    std::ostringstream os;
    os << "# spde-mlmc " << SPDE_MLMC_VERSION << "\n";
    os << "# schema: " << kSchemaVersion << "\n";
    os << "# command: " << to_string(config.command) << "\n";
    os << "# seed: " << *config.seed << "\n";
    os << "# config_hash: " << config.hash() << "\n";
    for (const auto& [k, v] : config.canonical()) os << "# config." << k << "=" << v << "\n";
    if ((config.command == Command::Run || config.command == Command::Compare) && config.eps == 0.0) {
        os << "# outside_theory: eps = 0 is the border case not covered by the convergence theory\n";
    }
    if (config.drift != 0.0 && config.command != Command::DetConv && config.command != Command::Variance) {
        os << "# reference: closed-form mean of the linear equation; the drift is not reflected in it\n";
    }
    return os.str();
}

std::string join_counts(const std::vector<LevelSummary>& levels) {
    std::string s;
    for (const auto& l : levels) s += (s.empty() ? "" : ";") + std::to_string(l.samples);
    return s;
}

std::string mode_name(ScheduleMode m) { return std::string(spde_mlmc::to_string(m)); }

std::optional<double> log2_slope(const std::vector<std::pair<double, double>>& raw) {
    if (raw.size() < 2) return std::nullopt;
    std::vector<std::pair<double, double>> pts;
    for (const auto& [x, y] : raw) {
        if (!(y > 0.0)) return std::nullopt;
        pts.emplace_back(x, std::log2(y));
    }
    return fit_slope(pts);
}

/// Replicated MLMC runs of one mode over a range of top levels.
std::vector<RunRow> run_mode(const RunConfig& config, const PathSampler& sampler, ScheduleMode mode,
                             const LevelRange& range) {
    const FunctionalSpec functional = config.functional_spec();
    const bool scalar = functional.is_scalar();
    const double scalar_reference = config.zero_noise
                                        ? 0.5 * std::exp(-2.0 * std::numbers::pi * std::numbers::pi)
                                        : expected_squared_norm(1.0, NoiseSpectrum{config.spectrum_decay});
    std::vector<RunRow> rows;
    for (int L : range.levels()) {
        const SampleSchedule schedule = build_schedule(mode, L, config.schedule_params(mode, L));
        const std::size_t m = config.m == 0 ? reference_grid_size(L) : config.m;
        RunRow row;
        row.mode = mode;
        row.L = L;
        for (std::uint32_t r = 0; r < config.reps; ++r) {
            MlmcOptions o;
            o.min_level = config.min_level;
            o.functional = functional;
            o.seed = *config.seed;
            o.replicate = r;
            o.stream = run_stream_tag(mode, L);
            o.workers = config.workers;
            o.base_count = config.base_count;
            const MlmcResult res = mlmc_estimate(sampler, schedule, o);
            row.errors.push_back(scalar ? std::abs(res.scalar() - scalar_reference) : e1(res.field(), m));
            row.wall_seconds += res.wall_seconds;
            if (r == 0) {
                row.op_work = res.total_work;
                row.sample_work = res.sample_work;
                row.summation_work = res.summation_work;
                for (const LevelStat& s : res.levels) row.levels.push_back({s.level, s.samples, s.op_work, 0.0, 0.0});
            }
            for (std::size_t i = 0; i < res.levels.size(); ++i) {
                row.levels[i].mean_variance_of_difference += res.levels[i].variance_of_difference / config.reps;
                row.levels[i].mean_variance_of_level += res.levels[i].variance_of_level / config.reps;
            }
        }
        row.eN = eN(row.errors);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string result_line(const RunRow& r) {
    return "result," + mode_name(r.mode) + "," + std::to_string(r.L) + "," + format_real(r.eN) + "," +
           std::to_string(r.op_work);
}

std::string timing_csv(const RunConfig& config, const std::vector<RunRow>& rows) {
    std::ostringstream os;
    os << metadata(config);
    os << "# wall-clock seconds are machine-dependent and not part of the reproducible outputs\n";
    os << "mode,L,replicates,wall_seconds\n";
    for (const auto& r : rows) {
        os << mode_name(r.mode) << "," << r.L << "," << r.errors.size() << "," << format_real(r.wall_seconds) << "\n";
    }
    return os.str();
}

std::string plot_script() {
    return R"(# gnuplot script: gnuplot run_plot.gp (writes run_error.png and run_work.png)
set datafile separator ','
set logscale y 2
set key top right
set xlabel 'L'
set terminal pngcairo size 800,600
modes = "weak strong singlelevel general"
set output 'run_error.png'
set ylabel 'e_N'
plot for [m in modes] 'run.csv' using (strcol(1) eq "result" && strcol(2) eq m ? $3 : 1/0):4 with linespoints title m
set output 'run_work.png'
set ylabel 'operation count'
plot for [m in modes] 'run.csv' using (strcol(1) eq "result" && strcol(2) eq m ? $3 : 1/0):5 with linespoints title m
)";
}

}  // namespace

std::uint32_t run_stream_tag(ScheduleMode mode, int L) {
    return (static_cast<std::uint32_t>(mode) << 8) | static_cast<std::uint32_t>(L);
}

DetConvReport cmd_det_conv(const RunConfig& config) {
    config.validate();
    DetConvReport report;
    std::vector<std::pair<double, double>> pts;
    for (int l : config.levels.levels()) {
        const LevelGeometry g = make_level(l);
        const NodalField u = run_deterministic(g);
        if (!u.all_finite()) throw NumericalError("det-conv: non-finite solution on level " + std::to_string(l));
        report.rows.push_back({l, g.mesh_width, g.time_step, l2_error_to_exact_mean(u, 1.0)});
        pts.emplace_back(l, report.rows.back().l2_error);
    }
    report.slope = log2_slope(pts);

    std::ostringstream os;
    os << metadata(config) << "level,h,dt,l2_error\n";
    for (const auto& r : report.rows) {
        os << r.level << "," << format_real(r.h) << "," << format_real(r.dt) << "," << format_real(r.l2_error) << "\n";
    }
    if (report.slope) os << "fitted_slope,,," << format_real(*report.slope) << "\n";
    report.files.push_back({"det_conv.csv", os.str()});
    return report;
}

VarianceReport cmd_variance(const RunConfig& config) {
    config.validate();
    const PathSampler sampler(config.levels.last, config.sampler_options());
    MlmcOptions o;
    o.min_level = config.min_level;
    o.functional = config.functional_spec();
    o.seed = *config.seed;
    o.stream = kVarianceStreamTag;
    o.workers = config.workers;

    VarianceReport report;
    std::vector<std::pair<double, double>> pts;
    for (int l : config.levels.levels()) {
        const PairStatistics s = pair_statistics(sampler, l, config.min_level, config.pairs, o);
        report.rows.push_back({l, s.pairs, s.variance_of_difference, s.variance_of_level});
        pts.emplace_back(l, s.variance_of_difference);
    }
    report.slope = log2_slope(pts);

    std::ostringstream os;
    os << metadata(config);
    os << "# recommended: --pairs >= 100 for stable variance estimates\n";
    os << "level,pairs,est_variance_of_difference,est_variance_of_level\n";
    for (const auto& r : report.rows) {
        os << r.level << "," << r.pairs << "," << format_real(r.variance_of_difference) << ","
           << format_real(r.variance_of_level) << "\n";
    }
    if (report.slope) os << "fitted_slope,," << format_real(*report.slope) << ",\n";
    report.files.push_back({"variance.csv", os.str()});
    return report;
}

RunReport cmd_run(const RunConfig& config) {
    config.validate();
    const PathSampler sampler(config.top_levels.last, config.sampler_options());
    RunReport report;
    for (ScheduleMode mode : config.modes) {
        auto rows = run_mode(config, sampler, mode, config.top_levels);
        std::vector<std::pair<double, double>> pts;
        for (const auto& r : rows) pts.emplace_back(r.L, r.eN);
        if (const auto s = log2_slope(pts)) report.slopes.push_back({mode, *s});
        for (auto& r : rows) report.rows.push_back(std::move(r));
    }

    const std::string meta = metadata(config);
    std::ostringstream summary, reps, levels;
    summary << meta << "row_type,mode,L,eN,op_work,sample_work,summation_work,counts\n";
    for (const auto& r : report.rows) {
        summary << result_line(r) << "," << r.sample_work << "," << r.summation_work << "," << join_counts(r.levels)
                << "\n";
    }
    for (const auto& s : report.slopes) {
        summary << "fitted_slope," << mode_name(s.mode) << ",," << format_real(s.error_slope) << ",,,,\n";
    }

    reps << meta << "mode,L,replicate,error\n";
    levels << meta << "mode,L,level,samples,op_work,mean_variance_of_difference,mean_variance_of_level\n";
    for (const auto& r : report.rows) {
        for (std::size_t i = 0; i < r.errors.size(); ++i) {
            reps << mode_name(r.mode) << "," << r.L << "," << i << "," << format_real(r.errors[i]) << "\n";
        }
        for (const auto& l : r.levels) {
            levels << mode_name(r.mode) << "," << r.L << "," << l.level << "," << l.samples << "," << l.op_work << ","
                   << format_real(l.mean_variance_of_difference) << "," << format_real(l.mean_variance_of_level)
                   << "\n";
        }
    }
    report.files.push_back({"run.csv", summary.str()});
    report.files.push_back({"run_replicates.csv", reps.str()});
    report.files.push_back({"run_levels.csv", levels.str()});
    report.files.push_back({"run_timing.csv", timing_csv(config, report.rows)});
    report.files.push_back({"run_plot.gp", plot_script()});
    return report;
}

std::vector<MatchRow> match_accuracy(const std::vector<RunRow>& rows) {
    std::vector<const RunRow*> strong;
    for (const auto& r : rows) {
        if (r.mode == ScheduleMode::Strong) strong.push_back(&r);
    }
    std::sort(strong.begin(), strong.end(), [](const RunRow* a, const RunRow* b) { return a->L < b->L; });
    std::vector<MatchRow> out;
    for (const auto& w : rows) {
        if (w.mode != ScheduleMode::Weak) continue;
        MatchRow m{w.L, w.eN, w.op_work, std::nullopt, 0.0, 0};
        for (const RunRow* s : strong) {
            if (s->eN <= w.eN) {
                m.strong_L = s->L;
                m.strong_eN = s->eN;
                m.strong_work = s->op_work;
                break;
            }
        }
        out.push_back(m);
    }
    return out;
}

CompareReport cmd_compare(const RunConfig& config) {
    config.validate();
    const PathSampler sampler(std::max(config.top_levels.last, config.strong_levels.last), config.sampler_options());
    CompareReport report;
    for (auto& r : run_mode(config, sampler, ScheduleMode::Weak, config.top_levels)) {
        report.rows.push_back(std::move(r));
    }
    for (auto& r : run_mode(config, sampler, ScheduleMode::Strong, config.strong_levels)) {
        report.rows.push_back(std::move(r));
    }
    report.matches = match_accuracy(report.rows);

    std::ostringstream os;
    os << metadata(config) << "row_type,mode,L,eN,op_work,pair_L,pair_eN,pair_op_work,verdict\n";
    for (const auto& r : report.rows) os << result_line(r) << ",,,,\n";
    for (const auto& m : report.matches) {
        os << "match,weak," << m.weak_L << "," << format_real(m.weak_eN) << "," << m.weak_work << ",";
        if (m.strong_L) {
            os << *m.strong_L << "," << format_real(m.strong_eN) << "," << m.strong_work << ","
               << (m.weak_cheaper() ? "weak_cheaper" : "strong_cheaper") << "\n";
        } else {
            os << ",,,unmatched\n";
        }
    }
    report.files.push_back({"compare.csv", os.str()});
    report.files.push_back({"compare_timing.csv", timing_csv(config, report.rows)});
    return report;
}

void write_outputs(const std::vector<OutputFile>& files, const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw UsageError("cannot create output directory '" + dir + "': " + ec.message());
    for (const auto& f : files) {
        const auto path = std::filesystem::path(dir) / f.name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << f.contents;
        if (!out) throw UsageError("cannot write '" + path.string() + "'");
    }
}

}  // namespace spde_mlmc::cli
