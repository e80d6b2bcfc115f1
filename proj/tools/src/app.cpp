#include "spde_mlmc_cli/app.hpp"

#include <CLI11.hpp>

#include <ostream>

#include "spde_mlmc/error.hpp"
#include "spde_mlmc_cli/commands.hpp"

namespace spde_mlmc::cli {

namespace {

std::string join(const std::vector<std::string>& parts) {
    std::string s;
    for (const auto& p : parts) s += (s.empty() ? "" : ",") + p;
    return s;
}

struct RawOptions {
    std::string levels;
    std::string top_levels = "1..5";
    std::string strong_levels;
    std::vector<std::string> modes;
    std::string base_count = "level";
    std::vector<std::string> a_seq;
    std::string truncation = "dofs";
    std::string functional = "identity";
    std::uint64_t seed = 0;
};

RunConfig resolve(Command command, const RawOptions& raw, RunConfig config, bool have_seed) {
    config.command = command;
    if (have_seed) config.seed = raw.seed;
    switch (command) {
        case Command::DetConv: config.levels = parse_level_range(raw.levels.empty() ? "3..7" : raw.levels); break;
        case Command::Variance: config.levels = parse_level_range(raw.levels.empty() ? "2..6" : raw.levels); break;
        case Command::Run:
        case Command::Compare:
            config.top_levels = parse_level_range(raw.top_levels);
            config.strong_levels = raw.strong_levels.empty() ? config.top_levels : parse_level_range(raw.strong_levels);
            if (command == Command::Run && !raw.strong_levels.empty()) {
                throw UsageError("--strong-L only applies to compare");
            }
            if (raw.modes.empty()) {
                config.modes = parse_modes(command == Command::Run ? "weak" : "weak,strong");
            } else {
                config.modes = parse_modes(join(raw.modes));
            }
            break;
    }
    config.base_count = parse_base_count(raw.base_count);
    if (!raw.a_seq.empty()) config.general_sequence = parse_real_list(join(raw.a_seq));
    config.truncation = parse_truncation(raw.truncation);
    if (raw.functional == "identity") {
        config.functional = FunctionalSpec::Kind::Identity;
    } else if (raw.functional == "sqnorm") {
        config.functional = FunctionalSpec::Kind::SquaredNorm;
    } else {
        throw UsageError("--functional must be identity or sqnorm");
    }
    return config;
}

void describe(std::ostream& out, const DetConvReport& r) {
    for (const auto& row : r.rows) out << "level " << row.level << "  l2_error " << format_real(row.l2_error) << "\n";
    if (r.slope) out << "fitted log2 slope " << format_real(*r.slope) << "\n";
}

void describe(std::ostream& out, const VarianceReport& r) {
    for (const auto& row : r.rows) {
        out << "level " << row.level << "  var_diff " << format_real(row.variance_of_difference) << "\n";
    }
    if (r.slope) out << "fitted log2 slope " << format_real(*r.slope) << "\n";
}

void describe_rows(std::ostream& out, const std::vector<RunRow>& rows) {
    for (const auto& row : rows) {
        out << to_string(row.mode) << " L=" << row.L << "  eN " << format_real(row.eN) << "  op_work " << row.op_work
            << "\n";
    }
}

void describe(std::ostream& out, const RunReport& r) {
    describe_rows(out, r.rows);
    for (const auto& s : r.slopes) {
        out << to_string(s.mode) << " fitted log2 slope " << format_real(s.error_slope) << "\n";
    }
}

void describe(std::ostream& out, const CompareReport& r) {
    describe_rows(out, r.rows);
    for (const auto& m : r.matches) {
        out << "weak L=" << m.weak_L << " vs ";
        if (m.strong_L) {
            out << "strong L=" << *m.strong_L << ": " << (m.weak_cheaper() ? "weak cheaper" : "strong cheaper") << "\n";
        } else {
            out << "no strong level reaches its accuracy\n";
        }
    }
}

template <typename Report>
void finish(std::ostream& out, const Report& report, const RunConfig& config) {
    write_outputs(report.files, config.out_dir);
    describe(out, report);
    for (const auto& f : report.files) out << "wrote " << config.out_dir << "/" << f.name << "\n";
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multilevel Monte Carlo for the stochastic heat equation", "spde-mlmc"};
    app.set_version_flag("--version", SPDE_MLMC_VERSION);
    app.set_config("--config", "", "key=value file; command-line flags override it");
    app.require_subcommand(1);
    app.fallthrough();

    RawOptions raw;
    RunConfig config;
    app.add_option("--seed", raw.seed, "Master seed (mandatory)");
    app.add_option("--levels", raw.levels, "Level range a..b (det-conv default 3..7, variance 2..6)");
    app.add_option("--L", raw.top_levels, "Top levels a..b for run and compare")->capture_default_str();
    app.add_option("--strong-L", raw.strong_levels, "Strong-mode top levels for compare (default: --L)");
    app.add_option("--min-level", config.min_level, "Coarsest mesh of every hierarchy")->capture_default_str();
    app.add_option("--mode", raw.modes, "Comma list of weak, strong, singlelevel, general")->delimiter(',');
    app.add_option("--gamma", config.gamma, "Rate parameter in (0,1)")->capture_default_str();
    app.add_option("--eps", config.eps, "Level exponent offset >= 0")->capture_default_str();
    app.add_option("--constant", config.constant, "Factor applied to every sample count")->capture_default_str();
    app.add_option("--base-count", raw.base_count, "Count for the coarsest term: level (N_lmin) or coarsest (N_0)")
        ->capture_default_str();
    app.add_option("--a-seq", raw.a_seq, "General mode: comma list a_0..a_L")->delimiter(',');
    app.add_option("--rate", config.general_rate, "General mode: a_l = 2^(-rate l) when --a-seq is absent")
        ->capture_default_str();
    app.add_option("--eta", config.general_eta, "General mode: variance order in [0,1]")->capture_default_str();
    app.add_option("--reps", config.reps, "Independent replicates per (mode, L)")->capture_default_str();
    app.add_option("--pairs", config.pairs, "Coupled pairs per level for variance")->capture_default_str();
    app.add_option("--truncation", raw.truncation, "KL modes per level: dofs or fixed:J")->capture_default_str();
    app.add_option("--spectrum-decay", config.spectrum_decay, "Noise eigenvalues q_j = j^-decay")
        ->capture_default_str();
    app.add_option("--functional", raw.functional, "identity or sqnorm")->capture_default_str();
    app.add_option("--m", config.m, "Reference grid size 2^r + 1 for e1 (default 2^max(L,5) + 1)");
    app.add_option("--drift", config.drift, "Drift F(u) = c sin(u)")->capture_default_str();
    app.add_flag("--zero-noise", config.zero_noise, "Drop the stochastic forcing");
    app.add_option("--workers", config.workers, "Worker threads (results do not depend on it)")
        ->capture_default_str();
    app.add_option("--out", config.out_dir, "Output directory")->capture_default_str();

    auto* det = app.add_subcommand("det-conv", "Deterministic convergence of the discretization");
    auto* var = app.add_subcommand("variance", "Decay of coupled level-difference variances");
    auto* run = app.add_subcommand("run", "Replicated MLMC error and work per schedule");
    auto* cmp = app.add_subcommand("compare", "Weak versus strong schedules at matched accuracy");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    try {
        const bool have_seed = app.count("--seed") > 0;
        if (det->parsed()) {
            const RunConfig c = resolve(Command::DetConv, raw, config, have_seed);
            finish(out, cmd_det_conv(c), c);
        } else if (var->parsed()) {
            const RunConfig c = resolve(Command::Variance, raw, config, have_seed);
            finish(out, cmd_variance(c), c);
        } else if (run->parsed()) {
            const RunConfig c = resolve(Command::Run, raw, config, have_seed);
            finish(out, cmd_run(c), c);
        } else if (cmp->parsed()) {
            const RunConfig c = resolve(Command::Compare, raw, config, have_seed);
            finish(out, cmd_compare(c), c);
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        err << "failure: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitSuccess;
}

}  // namespace spde_mlmc::cli
