#include <dwlab/cli.hpp>

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace dwlab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "dwlab");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("dwlab-test-" + name);
    fs::remove_all(p);
    return p;
}

std::string config(const std::string& name) { return std::string(DWLAB_CONFIG_DIR) + "/" + name; }

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Classify, ReportsClassAndExitsZero) {
    auto r = run_cli({"classify", "affine(0.5,0)"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("class: InteriorDW"), std::string::npos);
    r = run_cli({"classify", "mobius(3,1,1,3)"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("class: BoundaryDW"), std::string::npos);
    r = run_cli({"classify", "mobius(e^{i/7},0,0,1)"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("class: EllipticInfiniteOrder"), std::string::npos);
}

TEST(Classify, ParseErrorsExitTwo) {
    const auto r = run_cli({"classify", "mobius(1,2"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("offset 10"), std::string::npos);
    EXPECT_EQ(run_cli({"classify"}).code, 2);
    EXPECT_EQ(run_cli({"frobnicate"}).code, 2);
    EXPECT_EQ(run_cli({"classify", "identity", "--max-n", "0"}).code, 2);
}

TEST(Simulate, DivergentExampleExitsFour) {
    const fs::path out = scratch("harmonic");
    const auto r = run_cli({"simulate", "--config", config("harmonic_rotations.json"), "--out", out.string()});
    EXPECT_EQ(r.code, 4) << r.out << r.err;
    EXPECT_NE(r.out.find("verdict: divergent"), std::string::npos);
    ASSERT_TRUE(fs::exists(out / "trajectory.csv"));
    ASSERT_TRUE(fs::exists(out / "report.json"));
    std::ifstream csv(out / "trajectory.csv");
    const auto traj = read_trajectory_csv(csv);
    EXPECT_EQ(traj.header.at("steps"), 100000);
    EXPECT_EQ(traj.n.back(), 100000u);
    const auto report = json::parse(slurp(out / "report.json"));
    EXPECT_EQ(report.at("verdict"), "divergent");
    EXPECT_EQ(report.at("criteria").at("steps"), 100000);
    EXPECT_GE(report.at("witnesses").size(), 2u);
}

TEST(Simulate, ConvergentConfigsExitZero) {
    for (const char* name : {"perturbed_contraction.json", "constant_half.json", "rotation_normalized.json", "hg_right.json"}) {
        const fs::path out = scratch(name);
        const auto r = run_cli({"simulate", "--config", config(name), "--out", out.string()});
        EXPECT_EQ(r.code, 0) << name << "\n" << r.out << r.err;
        EXPECT_TRUE(fs::exists(out / "config.json"));
    }
}

TEST(Simulate, EscapeExitsSix) {
    const fs::path dir = scratch("escape");
    fs::create_directories(dir);
    const fs::path cfg = dir / "escape.json";
    std::ofstream(cfg) << R"json({"sequence": {"side": "left", "schedule": {"family": "perturbed", "base": "affine(0.5,0)",
                             "kind": "additive", "amplitude": 5, "law": {"kind": "power", "exponent": 1}}}})json";
    const auto r = run_cli({"simulate", "--config", cfg.string(), "--out", (dir / "out").string()});
    EXPECT_EQ(r.code, 6) << r.err;
}

TEST(Verify, JsonOnStdoutTableOnStderr) {
    const fs::path out = scratch("verify");
    const auto r = run_cli({"verify", "thm5", "--out", out.string()});
    EXPECT_EQ(r.code, 0) << r.err;
    const auto doc = json::parse(r.out);
    EXPECT_EQ(doc.at("seed"), 42);
    EXPECT_TRUE(doc.at("pass").get<bool>());
    ASSERT_EQ(doc.at("results").size(), 1u);
    EXPECT_EQ(doc.at("results")[0].at("id"), "thm5");
    EXPECT_NE(r.err.find("thm5"), std::string::npos);
    EXPECT_EQ(slurp(out / "verify.json"), r.out);
    EXPECT_EQ(run_cli({"verify", "nope"}).code, 2);
}

TEST(Sweep, DeltaGridProducesOneRowPerValue) {
    const fs::path out = scratch("sweep");
    const auto r = run_cli({"sweep", "--config", config("oscillating_blocks_delta_sweep.json"), "--out", out.string()});
    EXPECT_EQ(r.code, 0) << r.err;
    std::istringstream lines(r.out);
    std::string line;
    std::getline(lines, line);
    EXPECT_EQ(line, "parameter,verdict,limit,deviation_sum");
    std::size_t rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
        if (line.rfind("0,", 0) == 0) EXPECT_NE(line.find("constant_limit"), std::string::npos);
        else EXPECT_NE(line.find("divergent"), std::string::npos) << line;
    }
    EXPECT_EQ(rows, 8u);
    EXPECT_EQ(slurp(out / "sweep.csv"), r.out);
}

TEST(Sweep, EmptyGridWritesHeaderOnly) {
    const fs::path dir = scratch("sweep-empty");
    fs::create_directories(dir);
    const fs::path cfg = dir / "empty.json";
    std::ofstream(cfg) << R"json({"sequence": {"schedule": {"family": "oscillating_blocks"}}, "sweep": {"parameter": "delta", "values": []}})json";
    const auto r = run_cli({"sweep", "--config", cfg.string(), "--out", (dir / "out").string()});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "parameter,verdict,limit,deviation_sum\n");
}

TEST(Sweep, SeedGridGivesSeedDependentLimits) {
    const fs::path out = scratch("seed-sweep");
    const auto r = run_cli({"sweep", "--config", config("random_affine_seed_sweep.json"), "--out", out.string()});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 6);
    EXPECT_EQ(r.out.find("escape"), std::string::npos);
}

TEST(Binary, ExitStatusReachesTheShell) {
    const std::string cmd = std::string(DWLAB_CLI_PATH) + " classify 'mobius(1,2' >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    ASSERT_TRUE(WIFEXITED(status));
    EXPECT_EQ(WEXITSTATUS(status), 2);
}
