#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string output;  // stdout and stderr
};

Run run(const std::string& args) {
    const std::string cmd = std::string(TGML_CLI_PATH) + " " + args + " 2>&1";
    Run r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) return r;
    std::array<char, 4096> buf{};
    while (fgets(buf.data(), static_cast<int>(buf.size()), pipe) != nullptr) r.output += buf.data();
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("tgml_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }
    static std::string config(const std::string& name) { return std::string(TGML_CONFIG_DIR) + "/" + name; }

    fs::path dir_;
};

}  // namespace

TEST_F(Cli, HelpExitsZero) {
    const auto r = run("--help");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.output.find("simulate"), std::string::npos);
}

TEST_F(Cli, MissingConfigIsUsageError) {
    const auto r = run("simulate --config " + path("nope.json") + " --out " + path("o"));
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.output.find("config not found"), std::string::npos) << r.output;
}

TEST_F(Cli, BadCaseIsUsageError) {
    EXPECT_EQ(run("gen --case 4 --size 2 --out " + path("d.csv")).code, 2);
    EXPECT_EQ(run("gen --case 1 --size 0 --out " + path("d.csv")).code, 2);
    EXPECT_EQ(run("frobnicate").code, 2);
}

TEST_F(Cli, InertIsothermalConfigHasZeroKpis) {
    const auto r = run("simulate --config " + config("inert_isothermal.json") + " --out " + path("sim"));
    ASSERT_EQ(r.code, 0) << r.output;
    const std::string kpis = slurp(path("sim/kpis.csv"));
    EXPECT_NE(kpis.find("steady_state_lag,0,K"), std::string::npos) << kpis;
    EXPECT_NE(kpis.find("max_transient_lag,0,K"), std::string::npos) << kpis;
    EXPECT_NE(kpis.find("exotherm,0,K"), std::string::npos) << kpis;
}

TEST_F(Cli, CureCycleHistoryIsTimeOrdered) {
    const auto r = run("simulate --config " + config("cure_cycle.json") + " --out " + path("sim"));
    ASSERT_EQ(r.code, 0) << r.output;
    std::ifstream in(path("sim/history.csv"));
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line.substr(0, 8), "t,T_air,");
    double prev = -1.0;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        const double t = std::stod(line.substr(0, line.find(',')));
        EXPECT_GT(t, prev);
        prev = t;
        ++rows;
    }
    EXPECT_GT(rows, 100u);
    EXPECT_NE(slurp(path("sim/kpis.csv")).find("final_min_part_cure"), std::string::npos);
}

TEST_F(Cli, HeatingRateOverride) {
    const auto slow = run("simulate --config " + config("cure_cycle.json") + " --heating-rate 1 --out " + path("a"));
    const auto fast = run("simulate --config " + config("cure_cycle.json") + " --heating-rate 4 --out " + path("b"));
    ASSERT_EQ(slow.code, 0);
    ASSERT_EQ(fast.code, 0);
    EXPECT_NE(slurp(path("a/kpis.csv")), slurp(path("b/kpis.csv")));
}

TEST_F(Cli, GenIsDeterministic) {
    ASSERT_EQ(run("gen --case 1 --size 6 --seed 5 --out " + path("a.csv")).code, 0);
    ASSERT_EQ(run("--jobs 2 gen --case 1 --size 6 --seed 5 --out " + path("b.csv")).code, 0);
    EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
    EXPECT_EQ(slurp(path("a.csv")).rfind("# case=1 seed=5 ", 0), 0u);
}

TEST_F(Cli, SeedFromEnvironment) {
    ASSERT_EQ(run("gen --case 2 --approx --size 4 --out " + path("a.csv")).code, 0);
    const auto r = run("gen --case 2 --approx --size 4 --out " + path("b.csv"));
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
    const std::string env = "TGML_SEED=9 ";
    const std::string cmd = env + TGML_CLI_PATH + " gen --case 2 --approx --size 4 --out " + path("c.csv");
    ASSERT_EQ(std::system(cmd.c_str()), 0);
    EXPECT_EQ(slurp(path("c.csv")).rfind("# case=2 seed=9 solver_dx=0.0005 solver_dt=1 labels=closed_form", 0), 0u);
}

TEST_F(Cli, TrainEvalSweepBench) {
    ASSERT_EQ(run("gen --case 1 --size 30 --seed 3 --out " + path("d.csv")).code, 0);
    auto r = run("train --dataset " + path("d.csv") + " --arch 2x5 --iters 300 --seed 1 --out-model " +
                 path("m.json") + " --report " + path("train.csv"));
    ASSERT_EQ(r.code, 0) << r.output;
    EXPECT_NE(r.output.find("overfit check: "), std::string::npos);
    EXPECT_EQ(slurp(path("train.csv")).substr(0, 30), "partition,n,rmse,nrmse,max_err");

    r = run("eval --model " + path("m.json") + " --dataset " + path("d.csv"));
    ASSERT_EQ(r.code, 0) << r.output;
    EXPECT_NE(r.output.find("n=30"), std::string::npos);

    r = run("sweep --model " + path("m.json") + " --points 3 --out " + path("s.csv"));
    ASSERT_EQ(r.code, 0) << r.output;
    const std::string sweep = slurp(path("s.csv"));
    EXPECT_EQ(sweep.substr(0, sweep.find('\n')), "swept_value,prediction,solver_truth");
    EXPECT_EQ(std::count(sweep.begin(), sweep.end(), '\n'), 4);

    r = run("bench --model " + path("m.json") + " --n 1000");
    ASSERT_EQ(r.code, 0) << r.output;
    EXPECT_NE(r.output.find("speedup:"), std::string::npos);
}

TEST_F(Cli, TrainRejectsBadRecipeAndOptions) {
    ASSERT_EQ(run("gen --case 2 --approx --size 20 --out " + path("d.csv")).code, 0);
    auto r = run("train --dataset " + path("d.csv") + " --features nondimensional --iters 5 --out-model " +
                 path("m.json"));
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.output.find("case 1"), std::string::npos) << r.output;
    EXPECT_EQ(run("train --dataset " + path("d.csv") + " --optimizer adam --reg lasso --iters 5 --out-model " +
                  path("m.json"))
                  .code,
              2);
    EXPECT_EQ(run("train --dataset " + path("d.csv") + " --arch 3y5 --out-model " + path("m.json")).code, 2);
    EXPECT_EQ(run("train --dataset " + path("missing.csv") + " --out-model " + path("m.json")).code, 2);
}

TEST_F(Cli, EvalRejectsCorruptModel) {
    {
        std::ofstream(path("m.json")) << "{\"format_version\": 1, \"layer_sizes\": [3, 2";
    }
    ASSERT_EQ(run("gen --case 1 --size 2 --out " + path("d.csv")).code, 0);
    EXPECT_EQ(run("eval --model " + path("m.json") + " --dataset " + path("d.csv")).code, 2);
}

TEST_F(Cli, CaseStudyWritesReports) {
    const auto r = run("case --case 1 --size 20 --seeds 2 --iteration-scale 0.001 --no-sweeps --out " +
                       path("case1"));
    ASSERT_EQ(r.code, 0) << r.output;
    const std::string report = slurp(path("case1/report.csv"));
    EXPECT_EQ(std::count(report.begin(), report.end(), '\n'), 9);  // header + 4 variants x 2 seeds
    for (const char* v : {"small_nn,", "medium_nn,", "large_nn,", "small_nn_physics_features,"}) {
        EXPECT_NE(report.find(v), std::string::npos) << v;
    }
    EXPECT_TRUE(fs::exists(path("case1/dataset.csv")));
}
