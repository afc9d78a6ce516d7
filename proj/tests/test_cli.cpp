// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qalign/cli.hpp"
#include "qalign/simcore.hpp"

namespace qalign {
namespace {

namespace fs = std::filesystem;

struct Invocation {
    int code;
    std::string out;
    std::string err;
};

Invocation cli(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("qalign_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string write(const std::string& name, const std::string& text) const {
        const auto p = dir_ / name;
        std::ofstream(p) << text;
        return p.string();
    }

    fs::path dir_;
};

TEST_F(CliTest, RunFindsExactMatch) {
    const auto db = write("db.txt", "n=3\n101\n010\n");
    const Invocation r = cli({"run", "--db", db, "--target", "101", "--seed", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["match"], "101");
    EXPECT_EQ(j["distance"], 0);
    EXPECT_FALSE(r.err.empty());
}

TEST_F(CliTest, RunFindsNearestMatch) {
    const auto db = write("db.txt", "n=3\n000\n011\n");
    const Invocation r = cli({"run", "--db", db, "--target", "111"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["match"], "011");
    EXPECT_EQ(j["distance"], 1);
    EXPECT_EQ(j["d_min_classical"], 1);
}

TEST_F(CliTest, RunIsReproducibleAndWritesRecord) {
    const auto db = write("db.txt", "n=4\n0000\n0110\n1011\n1100\n");
    const auto rec = (dir_ / "rec.json").string();
    const std::vector<std::string> args{"run", "--db", db, "--target", "0111", "--seed", "3", "--fidelity", "0.7",
                                        "--out", rec};
    const Invocation a = cli(args);
    const std::string first = slurp(rec);
    const Invocation b = cli(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(first, slurp(rec));
    EXPECT_EQ(first, a.out);
    EXPECT_NEAR(nlohmann::json::parse(a.out)["loader_fidelity"].get<double>(), 0.7, 1e-4);
}

TEST_F(CliTest, RunAcceptsSymbolsWithAlphabet) {
    const auto db = write("db.txt", "n=4\n0001\n1011\n");
    const auto alphabet = write("dna.txt", "A\nT\nG\nC\n");
    const Invocation r = cli({"run", "--db", db, "--target", "GC", "--alphabet", alphabet});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(nlohmann::json::parse(r.out)["target"], "1011");
    EXPECT_EQ(cli({"run", "--db", db, "--target", "GX", "--alphabet", alphabet}).code, 1);
}

TEST_F(CliTest, StrictTurnsDegradedIntoFailure) {
    const auto db = write("db.txt", "n=4\n0000\n0110\n1011\n1100\n");
    const std::vector<std::string> args{"run", "--db", db, "--target", "0111", "--fidelity", "0.05",
                                        "--repeats", "1", "--seed", "0"};
    const Invocation relaxed = cli(args);
    ASSERT_EQ(relaxed.code, 0);
    ASSERT_TRUE(nlohmann::json::parse(relaxed.out)["degraded"].get<bool>());
    auto strict_args = args;
    strict_args.push_back("--strict");
    EXPECT_EQ(cli(strict_args).code, 2);
}

TEST_F(CliTest, UsageErrors) {
    const auto db = write("db.txt", "n=3\n101\n010\n");
    const auto bad = write("bad.txt", "n=3\n10\n");
    EXPECT_EQ(cli({}).code, 1);
    EXPECT_EQ(cli({"frobnicate"}).code, 1);
    EXPECT_EQ(cli({"run", "--target", "101"}).code, 1);
    EXPECT_EQ(cli({"run", "--db", bad, "--target", "101"}).code, 1);
    EXPECT_EQ(cli({"run", "--db", (dir_ / "missing.txt").string(), "--target", "101"}).code, 1);
    EXPECT_EQ(cli({"run", "--db", db, "--target", "1010"}).code, 1);
    EXPECT_EQ(cli({"run", "--db", db, "--target", "101", "--fidelity", "0"}).code, 1);
    EXPECT_EQ(cli({"run", "--db", db, "--target", "101", "--layer-policy", "fast"}).code, 1);
    EXPECT_EQ(cli({"run", "--db", db, "--target", "101", "--fast", "--full"}).code, 1);
    EXPECT_EQ(cli({"layers", "--n", "2"}).code, 1);
    EXPECT_EQ(cli({"verify", "--level", "medium"}).code, 1);
}

TEST_F(CliTest, HelpExitsCleanly) {
    const Invocation r = cli({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("sweep"), std::string::npos);
}

TEST_F(CliTest, SweepWritesFilesReproducibly) {
    auto sweep = [&](const std::string& sub) {
        return cli({"sweep", "--qubits", "3,4", "--fidelity-step", "0.5", "--trials", "2", "--seed", "5", "--out",
                    (dir_ / sub).string()});
    };
    const Invocation a = sweep("a");
    ASSERT_EQ(a.code, 0) << a.err;
    ASSERT_EQ(sweep("b").code, 0);
    for (const char* f : {"records.jsonl", "summary.csv", "plot_n3.dat", "plot_n4.dat"}) {
        ASSERT_TRUE(fs::exists(dir_ / "a" / f)) << f;
        EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
    }
    std::istringstream lines(slurp(dir_ / "a" / "records.jsonl"));
    std::size_t n = 0;
    for (std::string line; std::getline(lines, line);) {
        ++n;
    }
    EXPECT_EQ(n, 2U * 2U * 2U);
    EXPECT_EQ(nlohmann::json::parse(a.out)["records"], 8);
}

TEST_F(CliTest, SweepUnwritableOutputIsRuntimeFailure) {
    const auto file = write("occupied", "x");
    EXPECT_EQ(cli({"sweep", "--qubits", "3", "--fidelity-step", "1", "--trials", "1", "--out", file + "/sub"}).code, 2);
}

TEST_F(CliTest, LayersReportsClosedForm) {
    const Invocation r = cli({"layers", "--n", "5", "--p-max", "4", "--seed", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["N"], 7);
    EXPECT_EQ(j["optimal_layers"], 3);
    EXPECT_EQ(j["best_integer_layers"], 2);
    ASSERT_EQ(j["points"].size(), 5U);
    for (const auto& p : j["points"]) {
        EXPECT_NEAR(p["marked_probability"].get<double>(), p["predicted_probability"].get<double>(), 1e-9);
    }
}

TEST_F(CliTest, GaspWritesParsableCircuit) {
    const auto db = write("db.txt", "n=3\n000\n111\n");
    const auto circuit_path = (dir_ / "loader.txt").string();
    const Invocation r = cli({"gasp", "--db", db, "--seed", "4", "--out", circuit_path});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto summary = nlohmann::json::parse(r.out);
    EXPECT_TRUE(summary["converged"].get<bool>());
    std::ifstream in(circuit_path);
    const Circuit c = read_circuit(in);
    const Statevector ghz = Statevector::from_amplitudes(3, {1.0, 0, 0, 0, 0, 0, 0, 1.0});
    EXPECT_NEAR(fidelity(ghz, run(c)), summary["fidelity_to_database"].get<double>(), 1e-12);
    EXPECT_GE(summary["fidelity_to_database"].get<double>(), 0.99);
}

TEST_F(CliTest, VerifyPassesAndCatchesInjectedFaults) {
    const Invocation ok = cli({"verify"});
    EXPECT_EQ(ok.code, 0) << ok.out;
    EXPECT_EQ(ok.out.find("FAIL"), std::string::npos);
    for (const char* fault : {"popcount", "entangler", "oracle"}) {
        const Invocation bad = cli({"verify", "--inject-fault", fault});
        EXPECT_EQ(bad.code, 2) << fault;
        EXPECT_NE(bad.out.find("FAIL"), std::string::npos) << fault;
    }
    const Invocation popcount = cli({"verify", "--inject-fault", "popcount"});
    EXPECT_NE(popcount.out.find("FAIL popcount_exhaustive"), std::string::npos);
}

}  // namespace
}  // namespace qalign
