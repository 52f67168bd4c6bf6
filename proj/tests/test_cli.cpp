// End-to-end checks of the command-line front end, run as subprocesses
// against the real binary.

#include <cmath>
#include <filesystem>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "fhde/fhde.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using testsupport::example_problem_text;
using testsupport::read_file;
using testsupport::run_cli;
using testsupport::write_file;

namespace {

const std::string kExampleProblem = std::string(FHDE_PROBLEM_DIR) + "/tanh_arctan.prob";

class CliTest : public ::testing::Test {
protected:
    void SetUp() override { dir_ = testsupport::make_temp_dir("cli"); }
    void TearDown() override { fs::remove_all(dir_); }

    [[nodiscard]] std::string path(const std::string& name) const {
        return (dir_ / name).string();
    }

    fs::path dir_;
};

int count_lines(const std::string& text) {
    int n = 0;
    for (char c : text) n += (c == '\n');
    return n;
}

TEST_F(CliTest, SolveShippedProblem) {
    const std::string csv = path("sol.csv"), rpt = path("rep.json");
    const int rc = run_cli("solve " + kExampleProblem + " -o " + csv + " -r " + rpt);
    EXPECT_EQ(rc, 0);

    const std::string csv_text = read_file(csv);
    EXPECT_EQ(csv_text.rfind("t,x\n", 0), 0u);
    EXPECT_EQ(count_lines(csv_text), 1 + 513);  // header + one row per node

    const json rep = json::parse(read_file(rpt));
    EXPECT_EQ(rep["status"], "converged");
    EXPECT_LE(rep["residual"].get<double>(), 1e-6);
    EXPECT_NEAR(rep["M"].get<double>(), 5.236203563664269, 1e-9);
    EXPECT_EQ(rep["hypotheses"]["arctan_contraction"]["verdict"], "pass");
    EXPECT_EQ(rep["solution_file"], csv);
    EXPECT_EQ(rep["parameters"]["mode"], "rootfind");
}

TEST_F(CliTest, DeterministicAcrossRuns) {
    const std::string c1 = path("a.csv"), c2 = path("b.csv");
    const std::string r1 = path("a.json"), r2 = path("b.json");
    ASSERT_EQ(run_cli("solve " + kExampleProblem + " -o " + c1 + " -r " + r1), 0);
    ASSERT_EQ(run_cli("solve " + kExampleProblem + " -o " + c2 + " -r " + r2), 0);
    EXPECT_EQ(read_file(c1), read_file(c2));  // byte-identical

    json j1 = json::parse(read_file(r1));
    json j2 = json::parse(read_file(r2));
    j1.erase("wall_time_ms");
    j2.erase("wall_time_ms");
    j1.erase("solution_file");
    j2.erase("solution_file");
    EXPECT_EQ(j1.dump(), j2.dump());
}

TEST_F(CliTest, ReportResidualMatchesCsvRecomputation) {
    const std::string csv = path("sol.csv"), rpt = path("rep.json");
    ASSERT_EQ(run_cli("solve " + kExampleProblem + " -o " + csv + " -r " + rpt), 0);

    std::ifstream in(csv);
    const auto cols = fhde::read_csv_columns(in);
    const auto pf = fhde::load_problem_file(kExampleProblem);
    const fhde::GridFunction x(pf.spec.grid(), cols.value);
    const double recomputed = fhde::hie_residual(x, pf.spec);
    const json rep = json::parse(read_file(rpt));
    EXPECT_NEAR(rep["residual"].get<double>(), recomputed, 1e-12);
}

TEST_F(CliTest, StrictModeFlagsContractionViolation) {
    const std::string prob = path("steep.prob");
    write_file(prob, example_problem_text("2*x"));
    const std::string csv = path("sol.csv"), rpt = path("rep.json");
    const int rc = run_cli("solve " + prob + " --strict -o " + csv + " -r " + rpt);
    EXPECT_EQ(rc, 2);

    const json rep = json::parse(read_file(rpt));
    EXPECT_EQ(rep["status"], "hypothesis_violation");
    EXPECT_EQ(rep["hypotheses"]["arctan_contraction"]["verdict"], "fail");
    EXPECT_TRUE(rep["hypotheses"]["arctan_contraction"]["witness"].contains("x2"));
    EXPECT_EQ(rep["solution_file"], "");  // aborted before writing a solution
    EXPECT_FALSE(fs::exists(csv));
}

TEST_F(CliTest, NonConvergenceExitsThree) {
    const std::string csv = path("sol.csv"), rpt = path("rep.json");
    const int rc = run_cli("solve " + kExampleProblem + " --max-iter 2 --tol 1e-13 -o " + csv +
                           " -r " + rpt);
    EXPECT_EQ(rc, 3);
    const json rep = json::parse(read_file(rpt));
    EXPECT_EQ(rep["status"], "max_iter_exceeded");
}

TEST_F(CliTest, NonStrictViolationStillWritesReportAndSolution) {
    const std::string prob = path("steep.prob");
    write_file(prob, example_problem_text("2*x"));
    const std::string csv = path("sol.csv"), rpt = path("rep.json");
    const int rc = run_cli("solve " + prob + " -o " + csv + " -r " + rpt);
    EXPECT_EQ(rc, 2);
    EXPECT_TRUE(fs::exists(csv));
    const json rep = json::parse(read_file(rpt));
    EXPECT_EQ(rep["status"], "hypothesis_violation");
}

TEST_F(CliTest, MalformedExpressionExitsFour) {
    const std::string prob = path("bad.prob");
    write_file(prob, example_problem_text("tanh("));
    EXPECT_EQ(run_cli("solve " + prob + " -o " + path("s.csv") + " -r " + path("r.json")), 4);
}

TEST_F(CliTest, MissingProblemFileExitsFour) {
    EXPECT_EQ(run_cli("solve " + path("nope.prob") + " -o " + path("s.csv") + " -r " +
                      path("r.json")),
              4);
}

TEST_F(CliTest, CheckShippedProblemPasses) {
    const std::string out = path("audit.txt");
    const std::string cmd = "FHDE_LOG=quiet " + std::string(FHDE_CLI_PATH) + " check " +
                            kExampleProblem + " > " + out + " 2>/dev/null";
    ASSERT_EQ(WEXITSTATUS(std::system(cmd.c_str())), 0);
    const std::string text = read_file(out);
    EXPECT_NE(text.find("strictly_increasing"), std::string::npos);
    EXPECT_NE(text.find("result: pass"), std::string::npos);
    EXPECT_EQ(text.find("fail"), std::string::npos);
}

TEST_F(CliTest, CheckSteepPerturbationFails) {
    const std::string prob = path("steep.prob");
    write_file(prob, example_problem_text("2*x"));
    EXPECT_EQ(run_cli("check " + prob), 2);
}

TEST_F(CliTest, CheckNegativeBoundFunctionFails) {
    const std::string prob = path("negh.prob");
    write_file(prob, example_problem_text("tanh(t)*arctan(x+1)", "0-1"));
    EXPECT_EQ(run_cli("check " + prob), 2);
}

TEST_F(CliTest, FracIntegralMatchesPowerRule) {
    const std::string csv = path("frac.csv");
    ASSERT_EQ(run_cli("frac --expr t --op integral --alpha 0.5 --n 2000 -o " + csv), 0);
    std::ifstream in(csv);
    const auto cols = fhde::read_csv_columns(in);
    ASSERT_EQ(cols.t.size(), 2001u);
    double worst = 0.0;
    for (size_t i = 0; i < cols.t.size(); ++i)
        worst = std::max(worst,
                         std::abs(cols.value[i] - fhde::power_rule_oracle(1.0, 0.5, cols.t[i])));
    EXPECT_LE(worst, 1e-3);
}

TEST_F(CliTest, FracZeroExpressionGivesZeroColumn) {
    const std::string csv = path("zero.csv");
    ASSERT_EQ(run_cli("frac --expr 0 --op integral --alpha 0.7 --n 64 -o " + csv), 0);
    std::ifstream in(csv);
    const auto cols = fhde::read_csv_columns(in);
    for (double v : cols.value) EXPECT_EQ(v, 0.0);
}

TEST_F(CliTest, FracOrderOneIsOrdinaryIntegral) {
    const std::string csv = path("ord1.csv");
    ASSERT_EQ(run_cli("frac --expr 1 --op integral --alpha 1 --n 100 -o " + csv), 0);
    std::ifstream in(csv);
    const auto cols = fhde::read_csv_columns(in);
    for (size_t i = 0; i < cols.t.size(); ++i) EXPECT_NEAR(cols.value[i], cols.t[i], 1e-12);
}

TEST_F(CliTest, FracRejectsStateVariables) {
    EXPECT_EQ(run_cli("frac --expr x --op integral --alpha 0.5 -o " + path("x.csv")), 4);
}

TEST_F(CliTest, OverridesTakePrecedenceAndAreEchoed) {
    const std::string csv = path("sol.csv"), rpt = path("rep.json");
    const int rc = run_cli("solve " + kExampleProblem + " --alpha 0.6 --beta 2 --grid-n 128 " +
                           "--tol 1e-8 --max-iter 40 --mode picard -o " + csv + " -r " + rpt);
    EXPECT_EQ(rc, 0);
    const json rep = json::parse(read_file(rpt));
    EXPECT_DOUBLE_EQ(rep["parameters"]["alpha"].get<double>(), 0.6);
    EXPECT_DOUBLE_EQ(rep["parameters"]["beta"].get<double>(), 2.0);
    EXPECT_EQ(rep["parameters"]["grid_n"].get<int>(), 128);
    EXPECT_DOUBLE_EQ(rep["parameters"]["tol"].get<double>(), 1e-8);
    EXPECT_EQ(rep["parameters"]["max_iter"].get<int>(), 40);
    EXPECT_EQ(rep["parameters"]["mode"], "picard");
    EXPECT_EQ(count_lines(read_file(csv)), 1 + 129);
}

TEST_F(CliTest, InvalidOverrideExitsFour) {
    EXPECT_EQ(run_cli("solve " + kExampleProblem + " --alpha 1.5 -o " + path("s.csv") +
                      " -r " + path("r.json")),
              4);
}

TEST_F(CliTest, QuietSilencesDiagnostics) {
    const std::string err = path("stderr.txt");
    const std::string cmd_quiet = "FHDE_LOG=quiet " + std::string(FHDE_CLI_PATH) + " solve " +
                                  kExampleProblem + " -o " + path("a.csv") + " -r " +
                                  path("a.json") + " 2> " + err;
    ASSERT_EQ(WEXITSTATUS(std::system(cmd_quiet.c_str())), 0);
    EXPECT_TRUE(read_file(err).empty());

    const std::string cmd_info = "FHDE_LOG=info " + std::string(FHDE_CLI_PATH) + " solve " +
                                 kExampleProblem + " -o " + path("b.csv") + " -r " +
                                 path("b.json") + " 2> " + err;
    ASSERT_EQ(WEXITSTATUS(std::system(cmd_info.c_str())), 0);
    EXPECT_FALSE(read_file(err).empty());
}

}  // namespace
