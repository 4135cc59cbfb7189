#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "wsnids/metrics.hpp"
#include "wsnids/scenario.hpp"
#include "wsnids/simulation.hpp"

namespace {

// Exit codes: 0 ok, 2 configuration error, 3 runtime invariant violation,
// 4 usage / io error.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitUsage = 4;

int log_level() {
  const char* env = std::getenv("WSNIDS_LOG");
  if (!env) return 0;
  try {
    return std::stoi(env);
  } catch (...) {
    return 0;
  }
}

bool write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << content;
  return static_cast<bool>(out);
}

int cmd_run(const std::string& scenario_path, const std::string& trace_path,
            const std::string& metrics_path, long long seed_override, bool quiet) {
  wsnids::Scenario scenario;
  try {
    scenario = wsnids::load_scenario(scenario_path);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  if (seed_override >= 0) scenario.seed = static_cast<std::uint64_t>(seed_override);

  try {
    wsnids::Simulation sim(std::move(scenario));
    const wsnids::MetricsReport report = sim.run();
    if (!trace_path.empty() && !write_file(trace_path, sim.trace().text())) {
      std::cerr << "cannot write trace file '" << trace_path << "'\n";
      return kExitUsage;
    }
    if (!metrics_path.empty() && !write_file(metrics_path, report.to_kv())) {
      std::cerr << "cannot write metrics file '" << metrics_path << "'\n";
      return kExitUsage;
    }
    if (!quiet) std::cout << report.summary();
    if (log_level() > 0) std::cerr << "trace lines: " << sim.trace().line_count() << '\n';
    return kExitOk;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

int cmd_compare(const std::string& baseline_path, const std::string& variant_path) {
  auto read = [](const std::string& path, std::string& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::ostringstream buf;
    buf << in.rdbuf();
    out = buf.str();
    return true;
  };
  std::string btext;
  std::string vtext;
  if (!read(baseline_path, btext) || !read(variant_path, vtext)) {
    std::cerr << "cannot read metrics files\n";
    return kExitUsage;
  }
  try {
    const auto baseline = wsnids::MetricsReport::from_kv(btext);
    const auto variant = wsnids::MetricsReport::from_kv(vtext);
    std::cout << wsnids::compare(baseline, variant).to_text();
    return kExitOk;
  } catch (const std::invalid_argument& e) {
    std::cerr << "compare error: " << e.what() << '\n';
    return kExitConfig;
  }
}

int cmd_topo(const std::string& scenario_path) {
  try {
    const wsnids::Scenario scenario = wsnids::load_scenario(scenario_path);
    const wsnids::Topology topo = wsnids::build_topology(scenario.topology);
    std::cout << topo.dump();
    return kExitOk;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic wireless sensor network intrusion detection simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string trace_path;
  std::string metrics_path;
  long long seed_override = -1;
  bool quiet = false;

  CLI::App* run = app.add_subcommand("run", "Run one scenario and emit metrics");
  run->add_option("scenario", scenario_path, "Scenario file (JSON)")->required();
  run->add_option("--trace", trace_path, "Write the event trace to this file");
  run->add_option("--metrics", metrics_path, "Write machine-readable metrics to this file");
  run->add_option("--seed", seed_override, "Override the scenario seed");
  run->add_flag("--quiet", quiet, "Suppress the human summary");

  std::string baseline_path;
  std::string variant_path;
  CLI::App* cmp = app.add_subcommand("compare", "Ratios between two metrics files");
  cmp->add_option("baseline", baseline_path, "Baseline metrics file")->required();
  cmp->add_option("variant", variant_path, "Variant metrics file")->required();

  std::string topo_scenario;
  CLI::App* topo = app.add_subcommand("topo", "Print the built topology, one node per line");
  topo->add_option("scenario", topo_scenario, "Scenario file (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  if (run->parsed()) return cmd_run(scenario_path, trace_path, metrics_path, seed_override, quiet);
  if (cmp->parsed()) return cmd_compare(baseline_path, variant_path);
  if (topo->parsed()) return cmd_topo(topo_scenario);
  return kExitUsage;
}
