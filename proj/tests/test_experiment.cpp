#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "tracial/ergodic_stats.hpp"
#include "tracial/experiment.hpp"
#include "tracial/parallel.hpp"

using namespace tracial;

namespace {

const char* kClt = R"([experiment]
kind = clt
seed = 11

[system]
name = doubling

[observable]
name = cos

[params]
n = 500
trials = 400
)";

bool mentions(const std::vector<ConfigError>& errors, const std::string& text, int line = -1) {
  for (const auto& e : errors)
    if (e.message.find(text) != std::string::npos && (line < 0 || e.line == line)) return true;
  return false;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("minimal clt config") {
  const auto r = parse_config(kClt);
  REQUIRE(r.errors.empty());
  const auto& c = *r.config;
  CHECK(c.kind == ExperimentKind::Clt);
  CHECK(c.seed == 11);
  CHECK(c.params["n"] == 500);
  CHECK(c.params["ks_max"] == 0.05);
  CHECK(c.params["normalization"] == "sqrt");
  CHECK(c.params["reference_sigma2"].is_null());
  CHECK(c.hash.size() == 16);
  CHECK(c.system->name == "doubling");
}

TEST_CASE("config errors carry locations") {
  std::string text = kClt;
  text.replace(text.find("seed = 11\n"), 10, "");
  auto r = parse_config(text);
  CHECK_FALSE(r.config);
  CHECK(mentions(r.errors, "'seed'"));

  r = parse_config("[experiment]\nkind = clt\nseed = 1\n[system]\nname = intermittent\nalpha = 1.5\n[observable]\nname = cos\n");
  CHECK(mentions(r.errors, "(0,1)", 6));

  r = parse_config(
      "[experiment]\nkind = clt\nseed = x\n[system]\nname = doubling\nbogus = 1\n[observable]\nname = cos\n"
      "[params]\nn = -3\ntrials = 50\n[model]\n");
  CHECK(mentions(r.errors, "seed", 3));
  CHECK(mentions(r.errors, "unknown key 'bogus'", 6));
  CHECK(mentions(r.errors, "n: -3 is outside", 10));
  CHECK(mentions(r.errors, "trials: 50 is outside", 11));
  CHECK(mentions(r.errors, "[model] is not used", 12));
  CHECK(r.errors.size() == 5);

  r = parse_config("[experiment]\nkind = nope\nseed = 1\n");
  CHECK(mentions(r.errors, "unknown kind 'nope'", 2));
  r = parse_config("kind = clt\n");
  CHECK(mentions(r.errors, "outside of any section", 1));
  r = parse_config("[experiment]\nkind = clt\nseed = 1\n[system]\nname = full-shift\n[observable]\nname = cos\n");
  CHECK(mentions(r.errors, "cannot be evaluated"));
  r = parse_config("[experiment]\nkind = ktheory\nseed = 1\n[ktheory]\nK0 = Z^2\nK1 = 0\na0 = [[1]]\na1 = []\n");
  CHECK(mentions(r.errors, "ktheory.a0", 7));
}

TEST_CASE("clt report matches the library") {
  const auto cfg = *parse_config(kClt).config;
  const auto run = compute_experiment(cfg);
  const auto sys = doubling_map();
  const auto mu = sample_invariant(sys, 400, 1000, 11);
  const auto direct = clt_test(cosine_observable(), sys, mu, 500, 400, Normalization::Sqrt, std::nullopt, 11);
  CHECK(run.report["results"]["ks"].get<double>() == direct.ks);
  CHECK(run.report["results"]["sigma2"].get<double>() == direct.sigma2);
  const auto v = variance_estimate(cosine_observable(), sys, mu, 500, 400, 11);
  CHECK(run.report["results"]["variance"]["direct"].get<double>() == v.direct);
}

TEST_CASE("ktheory experiment") {
  const auto cfg = *parse_config("[experiment]\nkind = ktheory\nseed = 1\n[ktheory]\nK0 = Z\nK1 = Z\na0 = [[1]]\na1 = [[0]]\n").config;
  const auto r = compute_experiment(cfg);
  CHECK(r.summary == "K0 = Z, K1 = Z");
  CHECK(r.verdict == Verdict::Pass);
  auto wrong = *parse_config("[experiment]\nkind = ktheory\nseed = 1\n[ktheory]\nK0 = Z\nK1 = Z\na0 = [[1]]\na1 = [[0]]\n"
                             "expect = K0 = 0, K1 = 0\n").config;
  CHECK(compute_experiment(wrong).verdict == Verdict::Fail);
}

TEST_CASE("model-check experiment") {
  const auto cfg = *parse_config("[experiment]\nkind = model-check\nseed = 1\n[model]\nstages = 2\n").config;
  std::map<std::string, std::string> csv;
  const auto r = compute_experiment(cfg, &csv);
  CHECK(r.verdict == Verdict::Pass);
  CHECK(r.report["results"]["stages"][1]["N"] == "1685");
  CHECK(r.report["results"]["stages"][0]["boundary_feasible"]["x0"] == false);
  CHECK(csv.at("stages.csv").rfind("# config_hash=" + cfg.hash + "\n", 0) == 0);
}

TEST_CASE("every kind runs on a small config") {
  const std::vector<std::string> configs = {
      "[experiment]\nkind = simulate\nseed = 2\n[system]\nname = toral\n[observable]\nname = cos\n[params]\nn = 50\n",
      "[experiment]\nkind = correlations\nseed = 2\n[system]\nname = golden-mean-shift\n[observable]\nname = indicator\n"
      "[params]\nsamples = 20000\nlags = 8\nexpect = decaying\n",
      "[experiment]\nkind = asclt\nseed = 2\n[system]\nname = doubling\n[observable]\nname = cos\n[params]\nn = 20000\n"
      "ks_max = 0.5\n",
      "[experiment]\nkind = deviation\nseed = 2\n[system]\nname = doubling\n[observable]\nname = cos\n"
      "[params]\neps = 0.2\nn_list = 5, 10, 20, 40\ntrials = 4000\n",
      "[experiment]\nkind = chaos-cert\nseed = 2\n[system]\nname = doubling\n",
      "[experiment]\nkind = mixing-class\nseed = 2\n[system]\nname = dyadic-permutation\nrank = 3\n"
      "[params]\ndepth = 3\nN = 40\ntrials = 2000\nexpect = not-ergodic\n",
  };
  for (const auto& text : configs) {
    const auto parsed = parse_config(text);
    INFO(text);
    INFO(format_errors(parsed.errors));
    REQUIRE(parsed.config);
    const auto r = compute_experiment(*parsed.config);
    CHECK(r.verdict == Verdict::Pass);
    CHECK(r.report["verdict"] == "PASS");
  }
}

TEST_CASE("reports are byte-identical across runs and worker counts") {
  namespace fs = std::filesystem;
  const auto cfg = *parse_config(std::string(kClt) + "[output]\ndir = unused\n").config;
  const auto base = fs::temp_directory_path() / ("tracial_det_" + cfg.hash);
  std::vector<std::string> reports;
  for (unsigned w : {1u, 4u, 8u, 1u}) {
    set_worker_count(w);
    const auto dir = base / std::to_string(reports.size());
    run_experiment(cfg, dir.string());
    reports.push_back(slurp(dir / "report.json") + slurp(dir / "manifest.json"));
  }
  set_worker_count(1);
  for (const auto& r : reports) CHECK(r == reports.front());
  CHECK(reports.front().find(cfg.hash) != std::string::npos);
  fs::remove_all(base);
}
