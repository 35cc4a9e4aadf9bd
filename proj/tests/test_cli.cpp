#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "cli.hpp"
#include "qctx/geometry.hpp"
#include "qctx/satbridge.hpp"

namespace fs = std::filesystem;
using qctx::cli::run;

namespace {

struct Outcome {
    int code;
    std::string out, err;
    std::map<std::string, std::string> kv;
};

Outcome call(std::vector<std::string> args) {
    std::ostringstream out, err;
    Outcome r;
    r.code = run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    std::istringstream is(r.out);
    std::string line;
    while (std::getline(is, line)) {
        const auto eq = line.find('=');
        if (eq != std::string::npos && line.find(' ') > eq) r.kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return r;
}

class Workdir : public ::testing::Test {
protected:
    void SetUp() override {
        dir = fs::temp_directory_path() / ("qctx_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                           "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }
    std::string path(const std::string& name) const { return (dir / name).string(); }
    static std::string slurp(const std::string& p) {
        std::ifstream is(p);
        return {std::istreambuf_iterator<char>(is), {}};
    }
    fs::path dir;
};

}  // namespace

TEST(Generate, LinesOfThreeQubits) {
    const Outcome r = call({"generate", "--family", "lines", "--qubits", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.kv.at("contexts"), "315");
    EXPECT_EQ(r.kv.at("observables"), "63");
    EXPECT_EQ(r.kv.at("negative"), "90");
    EXPECT_EQ(r.kv.at("configurations"), "1");
}

TEST(Generate, CountOnlyPlanesOfFourQubits) {
    Outcome r = call({"generate", "--family", "lines", "--qubits", "4", "--count-only"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.kv.at("contexts"), "5355");
    EXPECT_EQ(r.kv.at("negative"), "1908");
    r = call({"generate", "--family", "subspaces", "--qubits", "4", "--k", "2", "--count-only"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.kv.at("contexts"), "11475");
    EXPECT_EQ(r.kv.at("negative"), "4752");
    EXPECT_EQ(r.kv.at("positive"), "6723");
}

TEST(Generate, GeneratorsAndPerpset) {
    Outcome r = call({"generate", "--family", "generators", "--qubits", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.kv.at("contexts"), "135");
    r = call({"generate", "--family", "perpset", "--qubits", "2", "--anchor", "XI"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.kv.at("contexts"), "3");
    EXPECT_EQ(r.kv.at("observables"), "7");
    r = call({"generate", "--family", "perpset", "--qubits", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.kv.at("configurations"), "63");
    EXPECT_EQ(r.kv.at("contexts"), "15");
}

TEST(Generate, QuadricsAndGrids) {
    Outcome r = call({"generate", "--family", "hyperbolic", "--qubits", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.kv.at("configurations"), "36");
    EXPECT_EQ(r.kv.at("contexts"), "105");
    EXPECT_EQ(r.kv.at("observables"), "35");
    r = call({"generate", "--family", "elliptic", "--qubits", "3"});
    EXPECT_EQ(r.kv.at("configurations"), "28");
    EXPECT_EQ(r.kv.at("contexts"), "45");
    r = call({"generate", "--family", "grid", "--qubits", "2"});
    EXPECT_EQ(r.kv.at("configurations"), "10");
    EXPECT_EQ(r.kv.at("contexts"), "6");
}

TEST_F(Workdir, GenerateWritesFiles) {
    Outcome r = call({"generate", "--family", "doily", "--qubits", "2", "--output", path("doily.txt")});
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream is(path("doily.txt"));
    const qctx::Configuration c = qctx::read_configuration(is);
    EXPECT_EQ(c.contexts.size(), 15u);

    r = call({"generate", "--family", "two-spread", "--qubits", "2", "--output", path("ts")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(dir / "ts" / "two-spread-5.txt"));

    r = call({"generate", "--family", "doily", "--qubits", "2", "--format", "incidence", "--output", path("m.txt")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(slurp(path("m.txt")).substr(0, 6), "15 15\n");
}

TEST(Degree, Doily) {
    const Outcome r = call({"degree", "--family", "doily", "--qubits", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.kv.at("summary"), "exact d=3 b=9");
    EXPECT_EQ(r.kv.at("status"), "exact");
    EXPECT_EQ(r.kv.at("d"), "3");
}

TEST(Degree, NonContextualAndFamilies) {
    Outcome r = call({"degree", "--family", "perpset", "--qubits", "3", "--anchor", "XYZ"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.kv.at("summary"), "non_contextual d=0 b=15");
    r = call({"degree", "--family", "elliptic", "--qubits", "3", "--index", "4"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.kv.at("d"), "9");
    r = call({"degree", "--family", "two-spread", "--qubits", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.kv.at("configurations"), "6");
    EXPECT_EQ(r.kv.at("summary"), "exact d=1 b=8");
}

TEST(Degree, HeuristicIsDeterministic) {
    const std::vector<std::string> args{"degree", "--family", "doily", "--qubits", "3", "--method", "heuristic",
                                        "--seed", "7", "--iters", "200"};
    const Outcome a = call(args), b = call(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.kv.at("witness"), b.kv.at("witness"));
    EXPECT_EQ(a.kv.at("summary"), "upper_bound d<=3 b=>=9");
}

TEST(Degree, GaussOnly) {
    const Outcome r = call({"degree", "--family", "doily", "--qubits", "2", "--method", "gauss"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.kv.at("status"), "upper_bound");
}

TEST_F(Workdir, DegreeFromFileWithUnsatOut) {
    ASSERT_EQ(call({"generate", "--family", "doily", "--qubits", "2", "--output", path("d.txt")}).code, 0);
    const Outcome r = call({"degree", "--input", path("d.txt"), "--unsat-out", path("u.txt"), "--output", path("r.txt")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.kv.at("summary"), "exact d=3 b=9");
    EXPECT_EQ(slurp(path("r.txt")), r.out);
    const std::string u = slurp(path("u.txt"));
    std::istringstream is(u.substr(u.find('\n') + 1));
    EXPECT_EQ(qctx::read_configuration(is).contexts.size(), 3u);
}

TEST_F(Workdir, InvalidConfigurationIsRejected) {
    {
        std::ofstream os(path("bad.txt"));
        os << "qubits=2 family=bad\nXI IZ XZ -\n";
    }
    const Outcome r = call({"degree", "--input", path("bad.txt")});
    EXPECT_EQ(r.code, 3);
    EXPECT_FALSE(r.err.empty());
}

TEST(Check, Properties) {
    Outcome r = call({"check", "perpsets", "--min-qubits", "2", "--max-qubits", "3"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("perpsets qubits=3 count=63 contextual=0 pass"), std::string::npos);
    EXPECT_EQ(r.kv.at("result"), "pass");

    r = call({"check", "positivity", "--qubits", "4", "--k", "3"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("count=2295 negative=0 pass"), std::string::npos);

    r = call({"check", "two-spreads", "--min-qubits", "2", "--max-qubits", "3"});
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("two-spreads qubits=3 count=6 degrees=1,1,1,1,1,1 pass"), std::string::npos);
}

TEST(Check, FailureExitCode) {
    const Outcome r = call({"check", "positivity", "--qubits", "3", "--k", "1"});
    EXPECT_EQ(r.code, 1);
    EXPECT_EQ(r.kv.at("result"), "fail");
}

TEST(ExitCodes, Usage) {
    EXPECT_EQ(call({}).code, 2);
    EXPECT_EQ(call({"frobnicate"}).code, 2);
    EXPECT_EQ(call({"generate", "--family", "nonsense", "--qubits", "2"}).code, 2);
    EXPECT_EQ(call({"generate", "--family", "lines"}).code, 2);
    EXPECT_EQ(call({"generate", "--family", "lines", "--qubits", "3", "--k", "2"}).code, 2);
    EXPECT_EQ(call({"generate", "--family", "perpset", "--qubits", "3", "--anchor", "XI"}).code, 2);
    EXPECT_EQ(call({"degree", "--family", "doily", "--qubits", "2", "--method", "magic"}).code, 2);
    EXPECT_EQ(call({"degree", "--family", "grid", "--qubits", "2", "--index", "10"}).code, 2);
    EXPECT_EQ(call({"check", "colour"}).code, 2);
    EXPECT_EQ(call({"export", "--family", "doily", "--qubits", "2", "--format", "bc", "--low", "16"}).code, 2);
    EXPECT_EQ(call({"--help"}).code, 0);
}

TEST(ExitCodes, Io) {
    EXPECT_EQ(call({"degree", "--input", "/nonexistent/config.txt"}).code, 3);
    EXPECT_EQ(call({"generate", "--family", "doily", "--qubits", "2", "--output", "/nonexistent/dir/x.txt"}).code, 3);
    EXPECT_EQ(call({"replay", "/nonexistent/manifest.json"}).code, 3);
}

TEST_F(Workdir, ExportFormats) {
    Outcome r = call({"export", "--family", "grid", "--qubits", "2", "--index", "0", "--format", "bc", "--low", "5",
                  "--high", "6"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.substr(0, 19), "BC1.1\nASSIGN[5,6](\n");
    const qctx::XorThresholdProblem prob = qctx::parse_bc_text(r.out);
    EXPECT_EQ(prob.system.contexts(), 6u);
    EXPECT_EQ(prob.system.observables(), 9u);

    r = call({"export", "--family", "doily", "--qubits", "2", "--format", "dimacs", "--low", "13", "--output",
              path("d.cnf"), "--map-out", path("d.map")});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(slurp(path("d.cnf")).substr(0, 6), "p cnf ");
    EXPECT_NE(slurp(path("d.map")).find("v15 15\n"), std::string::npos);

    r = call({"export", "--family", "doily", "--qubits", "2", "--format", "config"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream is(r.out);
    EXPECT_EQ(qctx::read_configuration(is).contexts.size(), 15u);

    EXPECT_EQ(call({"export", "--family", "grid", "--qubits", "2"}).code, 2);
}

TEST_F(Workdir, ManifestAndReplay) {
    const std::string m = path("run.json");
    const Outcome first = call({"degree", "--family", "doily", "--qubits", "3", "--method", "heuristic", "--seed", "11",
                            "--iters", "50", "--manifest", m});
    ASSERT_EQ(first.code, 0) << first.err;
    const std::string text = slurp(m);
    EXPECT_NE(text.find("\"argv\""), std::string::npos);
    EXPECT_NE(text.find("\"seed\": 11"), std::string::npos);
    EXPECT_NE(text.find("\"timings\""), std::string::npos);
    const Outcome again = call({"replay", m});
    ASSERT_EQ(again.code, 0) << again.err;
    EXPECT_EQ(again.kv.at("witness"), first.kv.at("witness"));
    EXPECT_EQ(again.kv.at("summary"), first.kv.at("summary"));

    {
        std::ofstream os(path("broken.json"));
        os << "{ not json";
    }
    EXPECT_EQ(call({"replay", path("broken.json")}).code, 3);
}

TEST(ExternalSat, NeedsCommand) {
    if (!qctx::solver_command_from_env().empty()) GTEST_SKIP() << "solver configured";
    EXPECT_EQ(call({"degree", "--family", "doily", "--qubits", "2", "--method", "external_sat"}).code, 2);
}

TEST(ExternalSat, FakeSolverUnsatMeansCurrentBestIsOptimal) {
    const Outcome r = call({"degree", "--family", "doily", "--qubits", "2", "--method", "external_sat", "--solver-cmd",
                        "/bin/sh -c 'echo \"s UNSATISFIABLE\"' fake"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.kv.at("status"), "exact");
    EXPECT_EQ(r.kv.at("d"), "3");
}
