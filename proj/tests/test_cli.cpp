#include "cosub/cli/app.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace cosub;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int code;
    std::string out;
    std::string err;
};

RunResult run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

json run_json(std::vector<std::string> args, int expected_code = 0) {
    args.push_back("--format");
    args.push_back("json");
    const auto r = run_cli(args);
    EXPECT_EQ(r.code, expected_code) << r.err;
    return json::parse(r.out);
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "cosub_cli_tests";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(CliRn, IdentityValuesAreOne) {
    const auto doc = run_json({"rn", "--builtin", "identity", "--kappa", "2", "--points", "0,0;1,-2"});
    for (const auto& v : doc["body"]["values"]) EXPECT_DOUBLE_EQ(v["value"].get<double>(), 1.0);
    EXPECT_NEAR(doc["body"]["transport_mass"].get<double>(), 1.0, 1e-12);
}

TEST(CliRn, DiagonalHalfAtOrigin) {
    const auto doc = run_json({"rn", "--builtin", "diag 0.5", "--boxes", "1"});
    EXPECT_DOUBLE_EQ(doc["body"]["values"][0]["value"].get<double>(), 2.0);
}

TEST(CliRn, GeometricMatchesLibrary) {
    const auto doc = run_json({"rn", "--builtin", "ex59 q=0.5", "--kappa", "3", "--points", "0.1,0.2,0.3"});
    Vector x(3);
    x << 0.1, 0.2, 0.3;
    const double lib = RnDerivative::of(checked_inverse(BandedSymbol::geometric_tridiagonal(0.5).window(3))).log_eval(x);
    EXPECT_EQ(doc["body"]["values"][0]["log_value"].get<double>(), lib);
    for (const auto& n : doc["body"]["box_norms"]) EXPECT_TRUE(std::isfinite(n["norm_sq"].get<double>()));
}

TEST(CliRn, PointDimensionMismatchIsUsageError) {
    const auto r = run_cli({"rn", "--builtin", "identity", "--kappa", "2", "--points", "1,2,3"});
    EXPECT_EQ(r.code, 3);
}

TEST(CliCheck, Prop56GeometricHalfPasses) {
    const auto r = run_cli({"check", "prop56", "--builtin", "ex59", "--q", "0.5", "--L", "64"});
    EXPECT_EQ(r.code, 0) << r.out << r.err;
    EXPECT_NE(r.out.find("verdict: pass"), std::string::npos);
}

TEST(CliCheck, Prop56PreconditionViolation) {
    const auto r = run_cli({"check", "prop56", "--builtin", "ex59", "--q", "0.8"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.out.find("q∈(0, √2/2)"), std::string::npos);
}

TEST(CliCheck, Prop52DiagonalPasses) {
    const auto r = run_cli({"check", "prop52", "--builtin", "ex53", "--alphas", "1-2^-j"});
    EXPECT_EQ(r.code, 0) << r.out << r.err;
}

TEST(CliCheck, Thm51GeometricIsEvidenceOnly) {
    const auto r = run_cli({"check", "thm51", "--builtin", "ex59 q=0.5", "--L", "5"});
    EXPECT_EQ(r.code, 2) << r.out << r.err;
}

TEST(CliCheck, UsageErrors) {
    EXPECT_EQ(run_cli({"check", "prop56", "--builtin", "ex53"}).code, 3);
    EXPECT_EQ(run_cli({"check", "prop52", "--builtin", "nonsense"}).code, 3);
    EXPECT_EQ(run_cli({"check", "prop99", "--builtin", "identity"}).code, 3);
    EXPECT_EQ(run_cli({"check", "thm51"}).code, 3);
    EXPECT_EQ(run_cli({}).code, 3);
    EXPECT_EQ(run_cli({"--help"}).code, 0);
}

TEST(CliCheck, DeterministicBodies) {
    const auto a = scratch("det_a.json"), b = scratch("det_b.json");
    for (const auto& p : {a, b})
        EXPECT_EQ(run_cli({"check", "prop56", "--builtin", "ex59 q=0.5", "--seed", "7", "--out", p.string()}).code, 0);
    const json ja = json::parse(slurp(a)), jb = json::parse(slurp(b));
    EXPECT_EQ(ja["body"].dump(), jb["body"].dump());
    EXPECT_EQ(ja["body"]["schema_version"].get<int>(), cli::schema_version);
    EXPECT_TRUE(ja["header"].contains("timestamp"));
}

TEST(CliCheck, ConfigFileSuppliesDefaults) {
    const auto cfg = scratch("config.json");
    std::ofstream(cfg) << R"({"builtin": "ex59", "q": 0.8, "L": 16})";
    auto r = run_cli({"check", "prop56", "--config", cfg.string()});
    EXPECT_EQ(r.code, 1);
    // command-line values win over the file
    r = run_cli({"check", "prop56", "--config", cfg.string(), "--q", "0.5"});
    EXPECT_EQ(r.code, 0) << r.err;
}

TEST(CliCheck, MatrixFile) {
    const auto m = scratch("tri.txt");
    std::ofstream(m) << "banded 1\nrule geometric 0.5\n";
    const auto r = run_cli({"check", "prop52", "--matrix", m.string(), "--inverse", "--L", "4"});
    EXPECT_EQ(r.code, 2) << r.out << r.err;
}

TEST(CliExample, DiagTable) {
    const auto t = scratch("diag.csv");
    const auto doc = run_json({"example", "diag", "--table", t.string()});
    EXPECT_LT(doc["body"]["max_relative_difference"].get<double>(), 1e-8);
    const std::string csv = slurp(t);
    EXPECT_EQ(csv.rfind("i,k,l,closed_form,quadrature,relative_difference\n", 0), 0u);
}

TEST(CliExample, BandedTable) {
    const auto t = scratch("banded.csv");
    const auto doc = run_json({"example", "banded", "--q", "0.5", "--table", t.string()});
    EXPECT_TRUE(doc["body"]["within_bounds"].get<bool>());
    std::ifstream in(t);
    std::string line;
    std::size_t rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 65u);
}

TEST(CliExample, SingularWritesAllRows) {
    const auto t = scratch("singular.csv");
    const auto doc = run_json({"example", "singular", "--alpha", "0.5", "--N", "500", "--table", t.string()});
    EXPECT_TRUE(doc["body"]["q_divergence_certified"].get<bool>());
    std::ifstream in(t);
    std::string line;
    std::size_t rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 501u);
}

TEST(CliExample, OutputDirectoryFromEnvironment) {
    const auto dir = scratch("envdir");
    fs::create_directories(dir);
    ::setenv("COSUB_OUT_DIR", dir.c_str(), 1);
    const auto r = run_cli({"example", "banded", "--L", "8"});
    ::unsetenv("COSUB_OUT_DIR");
    EXPECT_EQ(r.code, 0);
    EXPECT_TRUE(fs::exists(dir / "example-banded.json"));
    EXPECT_TRUE(fs::exists(dir / "example-banded.csv"));
}
