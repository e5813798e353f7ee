#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int status = -1;
    std::string out;
};

fs::path scratch(std::string const& name) {
    auto const dir = fs::temp_directory_path() / ("fracheat_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

Result invoke(std::string const& args, fs::path const& dir) {
    std::string const cmd = "FRACHEAT_OUTPUT_DIR='" + dir.string() + "' '" FRACHEAT_CLI "' " + args + " 2>" + (dir / "stderr.txt").string();
    Result r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    for (std::size_t n; (n = fread(buf, 1, sizeof buf, pipe)) > 0;) r.out.append(buf, n);
    int const raw = pclose(pipe);
    r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return r;
}

std::string slurp(fs::path const& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST(Cli, NoArgumentsIsUsageError) {
    auto const dir = scratch("noargs");
    EXPECT_EQ(invoke("", dir).status, 2);
    EXPECT_NE(slurp(dir / "stderr.txt").find("Subcommands"), std::string::npos);
    EXPECT_EQ(invoke("verify", dir).status, 2);
    EXPECT_EQ(invoke("exponents --bogus 1", dir).status, 2);
}

TEST(Cli, ExponentsWorkedExample) {
    auto const dir = scratch("exponents");
    auto const r = invoke("exponents --N 3 --s 0.5 --lambda 0.5", dir);
    ASSERT_EQ(r.status, 0);
    auto const j = json::parse(r.out);
    EXPECT_NEAR(j.at("p_plus").get<double>(), 3.0, 1e-12);
    EXPECT_NEAR(j.at("fujita").get<double>(), 1.4, 1e-12);
    EXPECT_TRUE(fs::exists(dir / "exponents.manifest.json"));
}

TEST(Cli, Lemma21Passes) {
    auto const dir = scratch("lemma");
    auto const r = invoke("verify lemma21 --N 3 --s 0.5 --alpha 0.5", dir);
    ASSERT_EQ(r.status, 0);
    EXPECT_LE(json::parse(r.out).at("max_error").get<double>(), 1e-3);
}

TEST(Cli, DomainErrorStatus) {
    auto const dir = scratch("domain");
    EXPECT_EQ(invoke("exponents --N 3 --s 0.5 --lambda 5", dir).status, 3);
    EXPECT_EQ(invoke("verify supersolution --p 1.2", dir).status, 3);
}

TEST(Cli, CertificationFailureStatus) {
    auto const dir = scratch("cert");
    auto const r = invoke("verify energy --p 2 --amplitude 1", dir);
    EXPECT_EQ(r.status, 4);
    EXPECT_FALSE(json::parse(r.out).at("holds").get<bool>());
    EXPECT_EQ(invoke("verify energy --p 2 --amplitude 12", dir).status, 0);
}

TEST(Cli, KernelBuildIsDeterministic) {
    auto const a = scratch("kernel_a"), b = scratch("kernel_b");
    ASSERT_EQ(invoke("kernel build --N 1 --s 0.5 --points 201", a).status, 0);
    ASSERT_EQ(invoke("kernel build --N 1 --s 0.5 --points 201", b).status, 0);
    for (auto const* f : {"profile.csv", "profile.json", "kernel-build.manifest.json"}) EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    EXPECT_EQ(invoke("kernel check", a).status, 0);
    EXPECT_EQ(invoke("kernel check --envelope-max 3", a).status, 4);
}

TEST(Cli, ConfigFileUnderFlags) {
    auto const dir = scratch("config");
    std::ofstream(dir / "run.ini") << "# instance\nN = 3\ns=0.5\nlambda = 0.25\n";
    auto const cfg = json::parse(invoke("exponents --config " + (dir / "run.ini").string(), dir).out);
    EXPECT_DOUBLE_EQ(cfg.at("lambda").get<double>(), 0.25);
    auto const flag = json::parse(invoke("exponents --lambda 0.5 --config " + (dir / "run.ini").string(), dir).out);
    EXPECT_DOUBLE_EQ(flag.at("lambda").get<double>(), 0.5);
}

TEST(Cli, SeededSimulationReproduces) {
    auto const a = scratch("sim_a"), b = scratch("sim_b");
    std::string const args = "simulate --datum random --seed 5 --p 2 --n 81 --r-min 1e-2 --r-max 1e3 --t-max 0.5";
    ASSERT_EQ(invoke(args, a).status, 0);
    ASSERT_EQ(invoke(args, b).status, 0);
    EXPECT_EQ(slurp(a / "trajectory.csv"), slurp(b / "trajectory.csv"));
    EXPECT_EQ(slurp(a / "verdict.json"), slurp(b / "verdict.json"));
    EXPECT_EQ(slurp(a / "trajectory.csv").substr(0, 40), "t,weighted_mass,critical_norm,l2,energy\n");
}

TEST(Cli, SweepIndependentOfJobs) {
    auto const a = scratch("sweep_a"), b = scratch("sweep_b");
    std::string const args = "sweep --p-count 2 --lambda-count 2 --n 81 --r-min 1e-2 --r-max 1e3 --dt 0.1 --t-max 5";
    ASSERT_EQ(invoke(args + " --jobs 1", a).status, 0);
    ASSERT_EQ(invoke(args + " --jobs 3", b).status, 0);
    auto const csv = slurp(a / "sweep.csv");
    EXPECT_EQ(csv, slurp(b / "sweep.csv"));
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
}
