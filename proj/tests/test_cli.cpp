#include <geosat/geosat.hpp>

#include <gtest/gtest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace geosat;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int code = -1;
  std::string out, err;
};

std::string slurp(const fs::path& p)
{
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
protected:
  void SetUp() override
  {
    dir_ = fs::temp_directory_path() /
           ("geosat_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  RunResult run(const std::string& args, const std::string& env = "") const
  {
    const std::string out = path("stdout.txt"), err = path("stderr.txt");
    const std::string cmd = env + (env.empty() ? "" : " ") + GEOSAT_CLI_PATH + std::string(" ") + args + " >" + out +
                            " 2>" + err;
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  fs::path dir_;
};

// The first JSON object printed on stderr: the resolved configuration.
json config_record(const RunResult& r)
{
  std::istringstream is(r.err);
  std::string line;
  std::getline(is, line);
  return json::parse(line);
}

Formula read_file(const std::string& p)
{
  std::ifstream in(p);
  return read_dimacs(in);
}

// Parses "s ..." / "v ... 0" output into a verdict and assignment.
bool parse_verdict(const std::string& out, std::vector<bool>* assignment = nullptr, std::uint32_t n = 0)
{
  std::istringstream is(out);
  std::string line;
  bool sat = false, seen = false;
  while (std::getline(is, line)) {
    if (line == "s SATISFIABLE") sat = seen = true;
    if (line == "s UNSATISFIABLE") seen = true;
    if (assignment && line.rfind("v ", 0) == 0) {
      assignment->assign(n + 1, false);
      std::istringstream vs(line.substr(2));
      long long v;
      while (vs >> v && v != 0)
        if (v > 0) (*assignment)[static_cast<std::size_t>(v)] = true;
    }
  }
  EXPECT_TRUE(seen) << out;
  return sat;
}

} // namespace

TEST_F(Cli, GenerateWritesDimacsAndSidecar)
{
  const auto r = run("generate --model mu --n 1000 --k 2 --d 1 --mu 0.5 --seed 7 --out " + path("f.cnf"));
  ASSERT_EQ(r.code, 0) << r.err;
  const Formula f = read_file(path("f.cnf"));
  EXPECT_EQ(f.n_vars, 1000u);

  const json side = json::parse(slurp(path("f.cnf.json")));
  EXPECT_EQ(side["clauses"].get<std::size_t>(), f.clauses.size());
  const GeneratorRecord rec = record_from_json(side["record"]);
  EXPECT_EQ(rec.seed, 7u);
  EXPECT_EQ(rec.params.param, 0.5);

  // The sidecar alone regenerates the identical formula.
  const Formula again = generate_formula(rec).formula;
  EXPECT_EQ(clause_multiset(again), clause_multiset(f));
}

TEST_F(Cli, ResolvedConfigOnStderr)
{
  const auto r = run("generate --model gamma --n 200 --gamma 0.3 --out " + path("f.cnf"));
  ASSERT_EQ(r.code, 0) << r.err;
  const json cfg = config_record(r);
  EXPECT_EQ(cfg["command"], "generate");
  EXPECT_EQ(cfg["seed"], 1);
  EXPECT_EQ(cfg["jobs"], 1);
  EXPECT_EQ(cfg["options"]["boundary"], "cube");
  EXPECT_EQ(cfg["options"]["metric"], "linf");
  EXPECT_EQ(cfg["options"]["k"], "2");
  EXPECT_EQ(cfg["resolved"]["model"], "gamma");
  EXPECT_EQ(cfg["resolved"]["param"], 0.3);
}

TEST_F(Cli, FloatsUseSeventeenDigits)
{
  const auto r = run("analyze --quantity connectivity-radius --n 10000 --d 2");
  ASSERT_EQ(r.code, 0) << r.err;
  const double rc = connectivity_radius(10000, 2, Metric::Linf).value;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", rc);
  EXPECT_NE(r.out.find(buf), std::string::npos) << r.out;
  EXPECT_EQ(json::parse(r.out)["value"]["value"].get<double>(), rc);
}

TEST_F(Cli, SolveMatchesInMemoryAfterRoundTrip)
{
  int sat_seen = 0, unsat_seen = 0;
  for (int seed = 1; seed <= 8; ++seed) {
    const std::string cnf = path("f.cnf"), js = path("f.json");
    ASSERT_EQ(run("generate --model mu --n 600 --mu 0.5 --seed " + std::to_string(seed) + " --out " + cnf).code, 0);
    ASSERT_EQ(run("export --sidecar " + cnf + ".json --format json --out " + js).code, 0);
    const auto r = run("solve --in " + js);
    ASSERT_EQ(r.code, 0) << r.err;

    ModelParams p;
    p.model = ModelKind::Mu;
    p.n = 600;
    p.param = 0.5;
    const bool expected = solve_2sat(generate_formula({p, static_cast<std::uint64_t>(seed)}).formula).sat();
    std::vector<bool> assignment;
    const bool got = parse_verdict(r.out, &assignment, 600);
    EXPECT_EQ(got, expected) << "seed " << seed;
    if (got) {
      EXPECT_TRUE(satisfies(read_file(cnf), assignment));
      ++sat_seen;
    } else {
      ++unsat_seen;
    }
  }
  EXPECT_GT(sat_seen, 0);
  EXPECT_GT(unsat_seen, 0);
}

TEST_F(Cli, ExportFromSidecarReproducesDimacs)
{
  ASSERT_EQ(run("generate --model gamma --n 300 --d 2 --gamma 0.4 --seed 5 --out " + path("a.cnf")).code, 0);
  ASSERT_EQ(run("export --sidecar " + path("a.cnf.json") + " --out " + path("b.cnf")).code, 0);
  EXPECT_EQ(slurp(path("a.cnf")), slurp(path("b.cnf")));
  ASSERT_EQ(run("export --in " + path("a.cnf") + " --format json --out " + path("a.json")).code, 0);
  const json j = json::parse(slurp(path("a.json")));
  EXPECT_EQ(j["clauses"].size(), read_file(path("a.cnf")).clauses.size());
  const auto pts = run("export --sidecar " + path("a.cnf.json") + " --format points");
  EXPECT_EQ(pts.out.rfind("label,x1,x2\n", 0), 0u);
}

TEST_F(Cli, SolveKsatWithDpll)
{
  ASSERT_EQ(run("generate --model gamma --n 14 --k 3 --gamma 2.5 --out " + path("p.cnf")).code, 0);
  const auto r = run("solve --in " + path("p.cnf"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("c engine dpll"), std::string::npos);
  EXPECT_FALSE(parse_verdict(r.out));
  EXPECT_EQ(run("solve --engine 2sat --in " + path("p.cnf")).code, 1);
}

TEST_F(Cli, SolverLimitIsAFailure)
{
  std::ofstream(path("chain.cnf")) << "p cnf 4 3\n1 2 3 0\n-3 4 1 0\n2 -4 -1 0\n";
  EXPECT_EQ(run("solve --engine dpll --var-limit 2 --in " + path("chain.cnf")).code, 2);
  EXPECT_EQ(run("solve --engine dpll --in " + path("chain.cnf")).code, 0);
}

TEST_F(Cli, UsageErrors)
{
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("frobnicate").code, 1);
  EXPECT_EQ(run("generate --model mu --n 10 --mu 0.5 --bogus 3 --out " + path("x.cnf")).code, 1);
  EXPECT_EQ(run("generate --model mu --n 10 --out " + path("x.cnf")).code, 1);
  EXPECT_EQ(run("generate --model mu --n 10 --gamma 0.5 --out " + path("x.cnf")).code, 1);
  EXPECT_EQ(run("solve --in " + path("missing.cnf")).code, 1);
  std::ofstream(path("bad.cnf")) << "p cnf 2 1\n1 x 0\n";
  EXPECT_EQ(run("solve --in " + path("bad.cnf")).code, 1);
  EXPECT_EQ(run("--help").code, 0);
}

TEST_F(Cli, VerifyExitCodes)
{
  const auto ok = run("verify --suite moment --formula-id snakes --model gamma --gamma 0.6 --n 50 --boundary torus "
                      "--trials 2000 --seed 4");
  EXPECT_EQ(ok.code, 0) << ok.out;
  EXPECT_TRUE(json::parse(ok.out)["passed"].get<bool>());
  // At n = 20 the leading-order wedge formula is far off: the check fails.
  const auto bad = run("verify --suite moment --formula-id wedge --model mu --mu 1 --n 20 --trials 20000");
  EXPECT_EQ(bad.code, 2) << bad.out;
  EXPECT_FALSE(json::parse(bad.out)["passed"].get<bool>());
  const auto coupling = run("verify --suite coupling --model mu --mu 0.5 --n 50 --trials 300");
  EXPECT_EQ(coupling.code, 0) << coupling.out;
}

TEST_F(Cli, SweepCsvAndJobsInvariance)
{
  const auto a = run("sweep --model mu --n 1000 --grid 0.3,0.5,0.7 --trials 40 --seed 2 --jobs 1");
  const auto b = run("sweep --model mu --n 1000 --grid 0.3,0.5,0.7 --trials 40 --seed 2 --jobs 4");
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out.rfind("param,p_hat,ci_lo,ci_hi,trials\n0.29999999999999999,", 0), 0u) << a.out;

  ASSERT_EQ(run("sweep --model mu --n 200 --from 0.2 --to 0.6 --steps 2 --trials 5 --csv " + path("c.csv") +
                " --trials-csv " + path("t.csv"))
                .code,
            0);
  std::istringstream t(slurp(path("t.csv")));
  std::string header;
  std::getline(t, header);
  EXPECT_EQ(header, "trial,seed,param,event,outcome,elapsed_ms");
  int rows = 0;
  for (std::string line; std::getline(t, line);) ++rows;
  EXPECT_EQ(rows, 15);
}

TEST_F(Cli, BudgetGuards)
{
  EXPECT_EQ(run("sweep --model mu --n 100 --grid 0.2,0.5 --trials 50", "GEOSAT_BUDGET=10").code, 1);
  EXPECT_EQ(run("sweep --model mu --n 100 --grid 0.2,0.5 --trials 5", "GEOSAT_BUDGET=10").code, 0);
  EXPECT_EQ(run("sweep --model mu --n 100 --grid 0.2,0.5 --trials 50 --budget 1000").code, 1);
  EXPECT_EQ(run("threshold --model mu --n 1000", "GEOSAT_BUDGET=50").code, 1);
}

TEST_F(Cli, ThresholdOfTheMuModel)
{
  const auto r = run("threshold --model mu --k 2 --d 1 --n 10000");
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_NEAR(j["param_at_half"].get<double>(), 0.5, 0.2 * 0.5);
  EXPECT_EQ(j["n"], 10000);
  EXPECT_GE(j["width_10_90"].get<double>(), 0.0);
  EXPECT_LE(j["bracket"][0].get<double>(), j["param_at_half"].get<double>());
  EXPECT_GE(j["bracket"][1].get<double>(), j["param_at_half"].get<double>());
}

TEST_F(Cli, AnalyzeMatchesLibrary)
{
  const auto r = run("analyze --quantity ksat-bounds --k 3 --d 2 --model gamma");
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  const auto [lo, hi] = ksat_bounds(3, 2, ModelKind::Gamma);
  EXPECT_EQ(j["value"]["lower"]["value"].get<double>(), lo.value);
  EXPECT_EQ(j["value"]["upper"]["value"].get<double>(), hi.value);
  EXPECT_EQ(run("analyze --quantity wedge --model mu --n 100").code, 1);
}
