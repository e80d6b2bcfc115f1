#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "spde_mlmc/error.hpp"
#include "spde_mlmc_cli/app.hpp"
#include "spde_mlmc_cli/commands.hpp"
#include "spde_mlmc_cli/config.hpp"

using namespace spde_mlmc;
using namespace spde_mlmc::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::path(SPDE_MLMC_TEST_TMP) / "cli" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run(std::vector<std::string> args, std::string* err_text = nullptr) {
    args.insert(args.begin(), "spde-mlmc");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    if (err_text) *err_text = err.str();
    return code;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST(LevelRange, Parse) {
    EXPECT_EQ(parse_level_range("3..7"), (LevelRange{3, 7}));
    EXPECT_EQ(parse_level_range("4"), (LevelRange{4, 4}));
    EXPECT_EQ(parse_level_range("2..4").levels(), (std::vector<int>{2, 3, 4}));
    EXPECT_EQ(parse_level_range("2..4").str(), "2..4");
    EXPECT_THROW((void)parse_level_range("5..3"), UsageError);
    EXPECT_THROW((void)parse_level_range("0..3"), UsageError);
    EXPECT_THROW((void)parse_level_range("a..3"), UsageError);
    EXPECT_THROW((void)parse_level_range("3.."), UsageError);
    EXPECT_THROW((void)parse_level_range("1..31"), CapacityError);
}

TEST(Config, Parsers) {
    EXPECT_EQ(parse_modes("weak,strong"), (std::vector<ScheduleMode>{ScheduleMode::Weak, ScheduleMode::Strong}));
    EXPECT_THROW((void)parse_modes("weak,weak"), UsageError);
    EXPECT_EQ(parse_truncation("fixed:12").modes(make_level(2)), 12u);
    EXPECT_EQ(to_string(parse_truncation("dofs")), "dofs");
    EXPECT_THROW((void)parse_truncation("fixed:"), UsageError);
    EXPECT_EQ(parse_real_list("1,0.5,0.25"), (std::vector<double>{1.0, 0.5, 0.25}));
    EXPECT_EQ(format_real(0.1), "0.1");
    EXPECT_EQ(format_real(2.0), "2");
}

TEST(Config, HashIgnoresExecutionSettings) {
    RunConfig a;
    a.seed = 1;
    a.modes = {ScheduleMode::Weak};
    RunConfig b = a;
    b.workers = 8;
    b.out_dir = "/elsewhere";
    EXPECT_EQ(a.hash(), b.hash());
    EXPECT_EQ(a.hash().size(), 16u);
    b.seed = 2;
    EXPECT_NE(a.hash(), b.hash());
}

TEST(Config, Validation) {
    RunConfig c;
    c.modes = {ScheduleMode::Weak};
    EXPECT_THROW(c.validate(), UsageError);  // no seed
    c.seed = 1;
    EXPECT_NO_THROW(c.validate());
    c.workers = 0;
    EXPECT_THROW(c.validate(), UsageError);
    c.workers = 1;
    c.m = 20;
    EXPECT_THROW(c.validate(), UsageError);
    c.top_levels = {1, 5};
    c.m = 9;  // coarser than L = 5
    EXPECT_THROW(c.validate(), UsageError);
}

TEST(Cli, ExitCodes) {
    const fs::path dir = scratch("exit");
    std::string err;
    EXPECT_EQ(run({"det-conv", "--out", dir.string()}, &err), kExitUsage);
    EXPECT_NE(err.find("seed"), std::string::npos);
    EXPECT_EQ(run({"det-conv", "--seed", "1", "--levels", "7..3", "--out", dir.string()}), kExitUsage);
    EXPECT_EQ(run({"compare", "--seed", "1", "--mode", "weak", "--out", dir.string()}), kExitUsage);
    EXPECT_EQ(run({"variance", "--seed", "1", "--levels", "1..3", "--out", dir.string()}), kExitUsage);
    EXPECT_EQ(run({"run", "--seed", "1", "--L", "1..31", "--out", dir.string()}), kExitUsage);
    EXPECT_EQ(run({"frobnicate"}), kExitUsage);
    EXPECT_EQ(run({}), kExitUsage);
    EXPECT_EQ(run({"--help"}), kExitSuccess);
    EXPECT_EQ(run({"--version"}), kExitSuccess);
    EXPECT_EQ(run({"det-conv", "--seed", "1", "--levels", "2..3", "--out", dir.string()}), kExitSuccess);
    EXPECT_TRUE(fs::exists(dir / "det_conv.csv"));
}

TEST(Cli, RerunsAreByteIdenticalAndWorkerIndependent) {
    const fs::path a = scratch("rerun_a"), b = scratch("rerun_b"), c = scratch("rerun_c");
    const std::vector<std::string> base = {"run", "--seed", "9", "--L", "1..3", "--reps", "3", "--mode", "weak,strong"};
    auto with = [&](const fs::path& d, const std::string& workers) {
        auto v = base;
        v.insert(v.end(), {"--workers", workers, "--out", d.string()});
        return v;
    };
    ASSERT_EQ(run(with(a, "1")), kExitSuccess);
    ASSERT_EQ(run(with(b, "1")), kExitSuccess);
    ASSERT_EQ(run(with(c, "3")), kExitSuccess);
    for (const char* f : {"run.csv", "run_replicates.csv", "run_levels.csv"}) {
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
        EXPECT_EQ(slurp(a / f), slurp(c / f)) << f;
    }
    EXPECT_TRUE(fs::exists(a / "run_timing.csv"));
    EXPECT_NE(slurp(a / "run.csv").find("# seed: 9"), std::string::npos);
}

TEST(Cli, ConfigFileOverriddenByFlags) {
    const fs::path dir = scratch("config");
    {
        std::ofstream cfg(dir / "study.ini");
        cfg << "seed=5\nlevels=2..4\n";
    }
    ASSERT_EQ(run({"det-conv", "--config", (dir / "study.ini").string(), "--levels", "2..3", "--out", dir.string()}),
              kExitSuccess);
    const std::string csv = slurp(dir / "det_conv.csv");
    EXPECT_NE(csv.find("# seed: 5"), std::string::npos);
    EXPECT_NE(csv.find("\n3,"), std::string::npos);
    EXPECT_EQ(csv.find("\n4,"), std::string::npos);
}

TEST(Commands, DetConvSingleLevelHasNoSlope) {
    RunConfig c;
    c.command = Command::DetConv;
    c.seed = 1;
    c.levels = {3, 3};
    const DetConvReport r = cmd_det_conv(c);
    EXPECT_EQ(r.rows.size(), 1u);
    EXPECT_FALSE(r.slope.has_value());
    ASSERT_EQ(r.files.size(), 1u);
    EXPECT_EQ(r.files[0].contents.find("fitted_slope"), std::string::npos);
}

TEST(Commands, DetConvHeader) {
    RunConfig c;
    c.command = Command::DetConv;
    c.seed = 1;
    c.levels = {2, 4};
    const DetConvReport r = cmd_det_conv(c);
    const std::string& s = r.files[0].contents;
    EXPECT_EQ(s.rfind("# spde-mlmc ", 0), 0u);
    EXPECT_NE(s.find("# schema: 1"), std::string::npos);
    EXPECT_NE(s.find("# config_hash: " + c.hash()), std::string::npos);
    EXPECT_NE(s.find("level,h,dt,l2_error"), std::string::npos);
    ASSERT_TRUE(r.slope.has_value());
    EXPECT_LT(*r.slope, -1.5);
}

TEST(Commands, ZeroNoiseVarianceVanishes) {
    RunConfig c;
    c.command = Command::Variance;
    c.seed = 1;
    c.levels = {2, 3};
    c.pairs = 20;
    c.zero_noise = true;
    const VarianceReport r = cmd_variance(c);
    for (const auto& row : r.rows) EXPECT_EQ(row.variance_of_difference, 0.0);
    EXPECT_FALSE(r.slope.has_value());
}

TEST(Commands, EpsZeroIsFlagged) {
    RunConfig c;
    c.command = Command::Run;
    c.seed = 1;
    c.top_levels = {1, 2};
    c.modes = {ScheduleMode::Strong};
    c.reps = 2;
    c.eps = 0.0;
    const RunReport r = cmd_run(c);
    EXPECT_NE(r.files[0].contents.find("# outside_theory"), std::string::npos);
    c.eps = 1.0;
    EXPECT_EQ(cmd_run(c).files[0].contents.find("# outside_theory"), std::string::npos);
}

TEST(Commands, RunTotals) {
    RunConfig c;
    c.command = Command::Run;
    c.seed = 4;
    c.top_levels = {1, 3};
    c.modes = {ScheduleMode::Weak};
    c.reps = 4;
    const RunReport r = cmd_run(c);
    ASSERT_EQ(r.rows.size(), 3u);
    for (const auto& row : r.rows) {
        EXPECT_EQ(row.errors.size(), 4u);
        EXPECT_EQ(row.op_work, row.sample_work + row.summation_work);
        EXPECT_GT(row.eN, 0.0);
    }
    ASSERT_EQ(r.slopes.size(), 1u);
    EXPECT_LT(r.slopes[0].error_slope, 0.0);
}

TEST(Commands, SquaredNormFunctional) {
    RunConfig c;
    c.command = Command::Run;
    c.seed = 4;
    c.top_levels = {2, 2};
    c.modes = {ScheduleMode::Weak};
    c.reps = 3;
    c.functional = FunctionalSpec::Kind::SquaredNorm;
    const RunReport r = cmd_run(c);
    ASSERT_EQ(r.rows.size(), 1u);
    EXPECT_LT(r.rows[0].eN, 0.1);
}

TEST(Commands, MatchAccuracy) {
    auto row = [](ScheduleMode m, int L, double e, std::uint64_t w) {
        RunRow r;
        r.mode = m;
        r.L = L;
        r.eN = e;
        r.op_work = w;
        return r;
    };
    const std::vector<RunRow> rows = {row(ScheduleMode::Weak, 1, 0.1, 10),     row(ScheduleMode::Weak, 2, 0.01, 50),
                                      row(ScheduleMode::Weak, 3, 0.0001, 900), row(ScheduleMode::Strong, 1, 0.2, 5),
                                      row(ScheduleMode::Strong, 2, 0.05, 20),  row(ScheduleMode::Strong, 3, 0.008, 60)};
    const auto m = match_accuracy(rows);
    ASSERT_EQ(m.size(), 3u);
    EXPECT_EQ(m[0].strong_L, 2);
    EXPECT_TRUE(m[0].weak_cheaper());
    EXPECT_EQ(m[1].strong_L, 3);
    EXPECT_TRUE(m[1].weak_cheaper());
    EXPECT_FALSE(m[2].strong_L.has_value());
    EXPECT_FALSE(m[2].weak_cheaper());
}

TEST(Commands, StreamTagsDistinct) {
    EXPECT_NE(run_stream_tag(ScheduleMode::Weak, 3), run_stream_tag(ScheduleMode::Strong, 3));
    EXPECT_NE(run_stream_tag(ScheduleMode::Weak, 3), run_stream_tag(ScheduleMode::Weak, 4));
    EXPECT_NE(run_stream_tag(ScheduleMode::General, 30), kVarianceStreamTag);
}

TEST(Commands, WriteOutputsFailsOnUnwritableTarget) {
    const fs::path dir = scratch("unwritable");
    {
        std::ofstream blocker(dir / "file");
        blocker << "x";
    }
    EXPECT_THROW(write_outputs({{"a.csv", "x"}}, (dir / "file" / "sub").string()), UsageError);
    write_outputs({{"a.csv", "hello"}}, (dir / "new").string());
    EXPECT_EQ(slurp(dir / "new" / "a.csv"), "hello");
}
