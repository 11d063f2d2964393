#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "fpp/experiments.hpp"

using namespace fpp;

namespace {

const char* kSampleConfig = R"cfg(
[experiment]
name = mu
d = 2
seed = 11
workers = 2
output = out.jsonl

# comment lines and blanks are ignored
[distribution]
kind = exponential
rate = 1

[grids]
n = 2, 4
samples = 20
)cfg";

ExperimentConfig parse_text(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

}  // namespace

TEST_CASE("config parsing reads sections, lists and defaults") {
  ExperimentConfig cfg = parse_text(kSampleConfig);
  CHECK(cfg.name == "mu");
  CHECK(cfg.d == 2);
  CHECK(cfg.seed == 11);
  CHECK(cfg.workers == 2);
  CHECK(cfg.output == "out.jsonl");
  CHECK(cfg.dist.kind == DistKind::Exponential);
  CHECK(cfg.n_grid == std::vector<long long>{2, 4});
  CHECK(cfg.samples == 20);
  CHECK(cfg.lambda_grid == std::vector<double>{-1.0, -0.5, -0.1, -0.01});  // default
  CHECK(cfg.direction == std::vector<int>{1, 0});
}

TEST_CASE("config round-trip is idempotent") {
  ExperimentConfig cfg = parse_text(kSampleConfig);
  std::string once = serialize_config(cfg);
  ExperimentConfig reparsed = parse_text(once);
  CHECK(serialize_config(reparsed) == once);
  CHECK(config_hash(reparsed) == config_hash(cfg));
}

TEST_CASE("config validation errors") {
  CHECK_THROWS_AS(parse_text("[distribution]\nkind = constant\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_text("[experiment]\nname = mu\nbroken line\n"), std::invalid_argument);
  CHECK_THROWS_AS(
      parse_text("[experiment]\nname = mu\nd = 1\n[distribution]\nkind = constant\n"),
      std::invalid_argument);
  CHECK_THROWS_AS(parse_text("[experiment]\nname = mu\n[distribution]\nkind = mystery\n"),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      parse_text(
          "[experiment]\nname = mu\nd = 3\n[distribution]\nkind = constant\n"),  // direction d=2
      std::invalid_argument);
}

TEST_CASE("distribution parsing covers the catalog") {
  auto parse_dist = [](const std::string& body) {
    ExperimentConfig cfg = parse_text("[experiment]\nname = mu\n" + body);
    return cfg.dist;
  };
  CHECK(parse_dist("[distribution]\nkind = constant\na = 2.5\n").a == 2.5);
  Distribution am = parse_dist("[distribution]\nkind = atom-mixture\np0 = 0.3\na = 1\n");
  CHECK(am.p0 == 0.3);
  Distribution fd =
      parse_dist("[distribution]\nkind = finite-discrete\nvalues = 0,1,2\nprobs = 0.2,0.5,0.3\n");
  CHECK(fd.values.size() == 3);
  CHECK(fd.mass_at_zero() == 0.2);
  CHECK(parse_dist("[distribution]\nkind = uniform\nlo = 0.5\nhi = 2\n").hi == 2.0);
  CHECK(parse_dist("[distribution]\nkind = pareto\nalpha = 1.6\n").alpha == 1.6);
}

TEST_CASE("config hash ignores workers and output path") {
  ExperimentConfig a = parse_text(kSampleConfig);
  ExperimentConfig b = a;
  b.workers = 16;
  b.output = "elsewhere.jsonl";
  CHECK(config_hash(a) == config_hash(b));
  ExperimentConfig c = a;
  c.seed = 12;
  CHECK(config_hash(a) != config_hash(c));
}

TEST_CASE("record JSON round-trip") {
  ExperimentRecord r;
  r.experiment = "mu";
  r.config_hash = "abc";
  r.d = 2;
  r.dist = "exponential(1)";
  r.seed = 7;
  r.grid_key = "n";
  r.grid_value = 8;
  r.stat = "mean_tau_over_n";
  r.value = 0.4321;
  r.ci = {0.4, 0.46};
  r.certified = true;
  r.aux["note"] = 3;
  r.timestamp = "2000-01-01T00:00:00Z";

  ExperimentRecord back = ExperimentRecord::from_json(r.to_json());
  CHECK(back.payload() == r.payload());
  CHECK(back.timestamp == r.timestamp);

  std::stringstream buf;
  write_jsonl({r, back}, buf);
  auto reread = read_jsonl(buf);
  REQUIRE(reread.size() == 2);
  CHECK(reread[0].payload() == r.payload());
}

TEST_CASE("plot export: schemas, parse-back, error paths") {
  ExperimentRecord tail;
  tail.experiment = "lower-tail";
  tail.grid_key = "t";
  tail.grid_value = 0.75;
  tail.stat = "tail_prob";
  tail.value = 0.125;
  tail.ci = {0.1, 0.15};

  std::ostringstream out;
  emit_plot_data({tail}, "tail", out);
  std::istringstream lines(out.str());
  std::string header, row;
  std::getline(lines, header);
  CHECK(header == "t\tt_squared\tlog_p\tci_lo\tci_hi");
  std::getline(lines, row);
  std::istringstream cells(row);
  double t, t2, logp, lo, hi;
  cells >> t >> t2 >> logp >> lo >> hi;
  CHECK(t == 0.75);
  CHECK(t2 == doctest::Approx(0.5625).epsilon(1e-15));
  CHECK(logp == doctest::Approx(std::log(0.125)).epsilon(1e-15));
  CHECK(lo == 0.1);
  CHECK(hi == 0.15);

  // empty input: header only
  std::ostringstream empty;
  emit_plot_data({}, "generic", empty);
  CHECK(empty.str() == "grid_key\tgrid_value\tstat\tvalue\tci_lo\tci_hi\n");

  ExperimentRecord other = tail;
  other.experiment = "shape";
  std::ostringstream sink;
  CHECK_THROWS_AS(emit_plot_data({tail, other}, "tail", sink), std::invalid_argument);
  CHECK_THROWS_AS(emit_plot_data({tail}, "pie-chart", sink), std::invalid_argument);
}

TEST_CASE("mu experiment on constant weights: single clean record set") {
  ExperimentConfig cfg = parse_text(
      "[experiment]\nname = mu\nseed = 5\n[distribution]\nkind = constant\na = 1\n"
      "[grids]\nn = 2,4\nsamples = 3\n");
  auto records = run_experiment(cfg);
  bool saw_upper = false;
  for (const auto& r : records) {
    CHECK(r.experiment == "mu");
    CHECK(r.config_hash == config_hash(cfg));
    CHECK(r.certified);
    if (r.stat == "mu_upper") {
      saw_upper = true;
      CHECK(r.value == doctest::Approx(1.0).epsilon(1e-12));
    }
    if (r.stat == "mean_tau_over_n") CHECK(r.ci.width() == doctest::Approx(0.0));
  }
  CHECK(saw_upper);
}

TEST_CASE("determinism: same config twice, and 1 vs 4 workers, identical payloads") {
  unsetenv("FPP_WORKERS");
  ExperimentConfig cfg = parse_text(
      "[experiment]\nname = lower-tail\nseed = 21\nworkers = 1\n"
      "[distribution]\nkind = exponential\nrate = 1\n"
      "[grids]\ndirection = 4,0\nt = 0,0.5,1\nsamples = 1000\n");
  auto first = run_experiment(cfg);
  auto second = run_experiment(cfg);
  ExperimentConfig wide = cfg;
  wide.workers = 4;
  auto parallel = run_experiment(wide);
  REQUIRE(first.size() == second.size());
  REQUIRE(first.size() == parallel.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    CHECK(first[i].payload() == second[i].payload());
    CHECK(first[i].payload() == parallel[i].payload());
  }
}

TEST_CASE("assumption validation gates experiments; force overrides") {
  ExperimentConfig bad = parse_text(
      "[experiment]\nname = z-moments\n[distribution]\nkind = atom-mixture\np0 = 0.6\na = 1\n");
  CHECK_THROWS_AS(run_experiment(bad), AssumptionError);
  std::string err;
  bad.output = "/tmp/fpp_test_bad.jsonl";
  CHECK(run_to_file(bad, &err) == 2);
  CHECK(!err.empty());

  ExperimentConfig forced = bad;
  forced.force = true;
  auto records = run_experiment(forced);
  CHECK(!records.empty());
  CHECK(records[0].aux["a2_holds"] == false);
}

TEST_CASE("certification-budget exhaustion maps to exit code 3") {
  ExperimentConfig cfg = parse_text(
      "[experiment]\nname = tau-sample\nseed = 8\noutput = /tmp/fpp_test_uncert.jsonl\n"
      "[distribution]\nkind = atom-mixture\np0 = 0.3\na = 1\n"
      "[grids]\ndirection = 20,0\nsamples = 2\nwindow_cap = 4\n");
  std::string err;
  CHECK(run_to_file(cfg, &err) == 3);
  CHECK(!err.empty());
}

TEST_CASE("entropy-exact experiment: every inequality flag passes") {
  ExperimentConfig cfg = parse_text(
      "[experiment]\nname = entropy-exact\nseed = 2\n"
      "[distribution]\nkind = finite-discrete\nvalues = 1,2\nprobs = 0.5,0.5\n");
  auto records = run_experiment(cfg);
  std::size_t flagged = 0;
  for (const auto& r : records) {
    if (r.aux.contains("pass")) {
      ++flagged;
      CHECK(r.aux["pass"] == true);
    }
  }
  CHECK(flagged >= 12);  // tensorization, resampling, association per lambda at least
}

TEST_CASE("experiment records persist through files") {
  ExperimentConfig cfg = parse_text(
      "[experiment]\nname = mu\nseed = 5\noutput = /tmp/fpp_test_mu.jsonl\n"
      "[distribution]\nkind = constant\na = 1\n[grids]\nn = 2,4\nsamples = 2\n");
  std::string err;
  REQUIRE(run_to_file(cfg, &err) == 0);
  auto records = read_jsonl_file("/tmp/fpp_test_mu.jsonl");
  CHECK(!records.empty());
  for (const auto& r : records) CHECK(r.config_hash == config_hash(cfg));
}
