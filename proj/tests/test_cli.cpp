#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "golden_runner.hpp"

using namespace hadamard;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run invoke(std::vector<std::string> args) {
    for (auto& a : args) {
        if (a.rfind("@/", 0) == 0) a = std::string(HADAMARD_TEST_DATA) + a.substr(1);
    }
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST(CliGrid, ParsesBoundsAndM) {
    EXPECT_EQ(cli::parse_grid("1:3:3", 5), (std::vector<double>{1, 2, 3}));
    EXPECT_EQ(cli::parse_grid("1:m:3", 3), (std::vector<double>{1, 2, 3}));
    EXPECT_EQ(cli::parse_grid("2:2:1", 1), (std::vector<double>{2}));
    EXPECT_THROW(cli::parse_grid("1:3", 1), contract_error);
    EXPECT_THROW(cli::parse_grid("1:x:3", 1), contract_error);
    EXPECT_THROW(cli::parse_grid("1:3:-2", 1), contract_error);
    EXPECT_THROW(cli::parse_grid("1:3:2:1", 1), contract_error);
}

TEST(CliGrid, ParsesSizeRange) {
    EXPECT_EQ(cli::parse_n_range("3"), (std::pair<std::size_t, std::size_t>{3, 3}));
    EXPECT_EQ(cli::parse_n_range("2:5"), (std::pair<std::size_t, std::size_t>{2, 5}));
    EXPECT_THROW(cli::parse_n_range("a"), contract_error);
    EXPECT_THROW(cli::parse_n_range("2:"), contract_error);
}

TEST(CliExit, HoldingChainIsZero) {
    const auto r = invoke({"check", "--chain", "huang", "--in", "@/a.json", "--in", "@/b.json"});
    EXPECT_EQ(r.code, 0);
    const auto j = json::parse(r.out);
    EXPECT_TRUE(j.at("holds").get<bool>());
    EXPECT_EQ(j.at("terms").size(), 2u);
}

TEST(CliExit, NegativeEntryIsUsageError) {
    const auto r = invoke({"spectral", "--fn", "rho", "--in", "@/bad.json"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("(1,2)"), std::string::npos);
    EXPECT_TRUE(r.out.empty());
}

TEST(CliExit, UnknownChainListsValidIds) {
    const auto r = invoke({"check", "--chain", "nope", "--in", "@/a.json"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("huang"), std::string::npos);
    EXPECT_NE(r.err.find("power_series"), std::string::npos);
}

TEST(CliExit, ContractViolationsAreUsageErrors) {
    EXPECT_EQ(invoke({"check", "--chain", "huang", "--in", "@/a.json", "--in", "@/rect.json"}).code, 2);
    EXPECT_EQ(invoke({"check", "--chain", "hpow_rho", "--in", "@/a.json", "--in", "@/b.json", "--t", "0.5"}).code, 2);
    EXPECT_EQ(invoke({"check", "--chain", "huang", "--in", "@/a.json", "--p", "1"}).code, 2);
    EXPECT_EQ(invoke({"check", "--chain", "huang", "--in", "@/missing.json"}).code, 2);
    EXPECT_EQ(invoke({"scan", "--in", "@/a.json", "--grid", "2:1:3"}).code, 2);
    EXPECT_EQ(invoke({"search", "--target", "inequivalence", "--n", "0"}).code, 2);
    EXPECT_EQ(invoke({"search", "--target", "tightness"}).code, 2);
    EXPECT_EQ(invoke({"kernel", "--formula", "x+i"}).code, 2);
}

TEST(CliExit, ParseErrorsAreUsageErrors) {
    EXPECT_EQ(invoke({}).code, 2);
    EXPECT_EQ(invoke({"frobnicate"}).code, 2);
    EXPECT_EQ(invoke({"spectral"}).code, 2);
    EXPECT_EQ(invoke({"spectral", "--in", "@/a.json", "--fn", "trace"}).code, 2);
    EXPECT_EQ(invoke({"--help"}).code, 0);
}

TEST(CliExit, SearchFindingIsOneAndExhaustedIsZero) {
    const auto hit = invoke({"search", "--target", "inequivalence", "--n", "3", "--trials", "100"});
    EXPECT_EQ(hit.code, 1);
    EXPECT_EQ(json::parse(hit.out).at("outcome"), "finding");
    const auto miss = invoke({"search", "--target", "inequivalence", "--n", "1", "--trials", "50"});
    EXPECT_EQ(miss.code, 0);
    const auto j = json::parse(miss.out);
    EXPECT_EQ(j.at("outcome"), "exhausted");
    EXPECT_EQ(j.at("exhausted").at("trials"), 50);
}

TEST(CliExit, SearchAppendsToFindingsFile) {
    const auto path = (std::filesystem::temp_directory_path() / "hadamard_cli_findings.jsonl").string();
    std::filesystem::remove(path);
    EXPECT_EQ(invoke({"search", "--target", "jordan_naive", "--n", "2", "--density", "0.5", "--findings", path}).code, 1);
    EXPECT_EQ(invoke({"search", "--target", "inequivalence", "--n", "1", "--trials", "5", "--findings", path}).code, 0);
    const auto corpus = load_corpus(path);
    EXPECT_EQ(corpus.findings.size(), 1u);
    EXPECT_EQ(corpus.exhausted.size(), 1u);
    std::filesystem::remove(path);
}

TEST(CliExit, TightnessReportsStats) {
    const auto r = invoke({"search", "--target", "tightness", "--chain", "audenaert", "--n", "2:3", "--trials", "50"});
    EXPECT_EQ(r.code, 0);
    const auto j = json::parse(r.out);
    EXPECT_EQ(j.at("stats").at("violations"), 0);
}

TEST(CliExit, DemoMatchesAllFixtures) {
    const auto r = invoke({"demo"});
    EXPECT_EQ(r.code, 0);
    const auto j = json::parse(r.out);
    EXPECT_TRUE(j.at("all_match").get<bool>());
    for (const auto& f : j.at("fixtures")) EXPECT_TRUE(f.at("match").get<bool>()) << f.at("quantity");
}

TEST(CliKernel, MatrixAndGeomean) {
    const auto m = invoke({"kernel", "--formula", "x*y", "--n", "4", "--matrix"});
    EXPECT_EQ(m.code, 0);
    const auto a = matrix_from_json(json::parse(m.out));
    EXPECT_EQ(a.rows(), 4u);
    const auto g = invoke({"kernel", "--formula", "1", "--formula", "4*x*y", "--n", "16"});
    EXPECT_EQ(g.code, 0);
    EXPECT_TRUE(json::parse(g.out).at("report").at("holds").get<bool>());
}

TEST(CliOut, WritesToFile) {
    const auto path = (std::filesystem::temp_directory_path() / "hadamard_cli_out.json").string();
    const auto r = invoke({"--out", path, "spectral", "--fn", "rho", "--in", "@/ones.json"});
    EXPECT_EQ(r.code, 0);
    EXPECT_TRUE(r.out.empty());
    EXPECT_EQ(json::parse(golden::slurp(path)).at("estimate").at("value"), 2.0);
    std::filesystem::remove(path);
}

TEST(CliGolden, OutputsAreByteIdentical) {
    const auto cases = golden::load_cases(HADAMARD_TEST_GOLDEN, HADAMARD_TEST_DATA);
    ASSERT_GE(cases.size(), 10u);
    for (const auto& c : cases) {
        const auto r = golden::run_case(c, HADAMARD_TEST_GOLDEN);
        EXPECT_TRUE(r.output_matches) << c.name;
        EXPECT_EQ(r.exit_code, c.expected_exit) << c.name << ": " << r.diagnostics;
    }
}
