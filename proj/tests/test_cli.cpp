#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hhw/harness.hpp"

namespace hhw {
namespace {

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult run(std::vector<std::string> args) {
    args.insert(args.begin(), "hhw_bench");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

TEST(Cli, NoArgumentsPrintsUsageAndFails) {
    const CliResult r = run({});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("--experiment"), std::string::npos);
}

TEST(Cli, RejectsUnknownValues) {
    EXPECT_EQ(run({"--experiment", "fourier"}).code, 2);
    EXPECT_EQ(run({"--experiment", "temporal", "--case", "G"}).code, 2);
    EXPECT_EQ(run({"--experiment", "temporal", "--scheme", "cn"}).code, 2);
    EXPECT_EQ(run({"--experiment", "temporal", "--damping", "maybe"}).code, 2);
}

TEST(Cli, InconsistentConfigurationIsARuntimeError) {
    const CliResult r = run({"--experiment", "spatial", "--case", "A", "--m", "6"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("error:"), std::string::npos);
}

TEST(Cli, TemporalToStdoutWithSummaryOnStderr) {
    const CliResult r = run({"--experiment", "temporal", "--case", "A", "--m", "6", "--scheme",
                             "do", "--dt-sweep", "0.5,0.25,0.125", "--ref-steps", "32"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.rfind("dt,error\n", 0), 0u);
    EXPECT_NE(r.err.find("experiment=temporal case=A order="), std::string::npos);
    EXPECT_NE(r.err.find("wall_s="), std::string::npos);
}

TEST(Cli, OutFileIsByteIdenticalAcrossRuns) {
    const auto dir = std::filesystem::temp_directory_path() / "hhw_cli_test";
    std::filesystem::create_directories(dir);
    const auto a = dir / "a.csv", b = dir / "b.csv";
    const std::vector<std::string> base{"--experiment", "price", "--case", "B", "--m", "6",
                                        "--scheme", "hv", "--steps", "10", "--seed", "9"};
    auto with_out = [&](const std::filesystem::path& p) {
        std::vector<std::string> args = base;
        args.push_back("--out");
        args.push_back(p.string());
        return run(args);
    };
    const CliResult ra = with_out(a);
    const CliResult rb = with_out(b);
    ASSERT_EQ(ra.code, 0) << ra.err;
    ASSERT_EQ(rb.code, 0) << rb.err;
    EXPECT_NE(ra.out.find("experiment=price case=B order=n/a"), std::string::npos);
    const std::string ca = slurp(a);
    EXPECT_EQ(ca.rfind("s,v,r,value\n", 0), 0u);
    EXPECT_EQ(ca, slurp(b));
    std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace hhw
