#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "tracial/dynamics.hpp"
#include "tracial/experiment.hpp"
#include "tracial/parallel.hpp"

namespace {

constexpr int kExitPass = 0, kExitFail = 1, kExitError = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Seeded experiments on measure-preserving systems and their trace spaces"};
  app.set_version_flag("--version", tracial::kVersion);
  bool list_systems = false;
  app.add_flag("--list-systems", list_systems, "Print the system names accepted by [system] name = ...");

  auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
  std::string config_path, out_dir;
  unsigned threads = 1;
  bool validate_only = false;
  run->add_option("config", config_path, "Config file")->required();
  run->add_option("--out", out_dir, "Output directory (default: [output] dir, else ./out)");
  run->add_option("--threads", threads, "Worker threads; results do not depend on it")->check(CLI::Range(1u, 1024u));
  run->add_flag("--validate-only", validate_only, "Parse and validate the config, then stop");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitError;
  }

  if (list_systems) {
    for (const auto& n : tracial::system_names()) std::cout << n << '\n';
    if (!*run) return kExitPass;
  }
  if (!*run) {
    std::cerr << app.help();
    return kExitError;
  }

  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read " << config_path << '\n';
    return kExitError;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  const auto parsed = tracial::parse_config(buf.str());
  if (!parsed.config) {
    std::cerr << config_path << ": invalid config\n" << tracial::format_errors(parsed.errors);
    return kExitError;
  }
  const auto& cfg = *parsed.config;
  if (validate_only) {
    std::cout << config_path << ": ok (" << tracial::to_string(cfg.kind) << ", config_hash " << cfg.hash << ")\n";
    return kExitPass;
  }
  if (out_dir.empty()) out_dir = cfg.output_dir.value_or("out");

  try {
    tracial::set_worker_count(threads);
    const auto r = tracial::run_experiment(cfg, out_dir);
    std::cout << r.summary << '\n';
    std::cout << (r.verdict == tracial::Verdict::Pass ? "PASS" : "FAIL") << ' ' << tracial::to_string(cfg.kind)
              << " -> " << out_dir << '\n';
    return r.verdict == tracial::Verdict::Pass ? kExitPass : kExitFail;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
}
