// gibbsbp: sweep and complexity drivers.
//
// Exit codes: 0 success, 2 configuration error, 3 one or more rows failed
// (the CSV is still written, failures are in the status column).

#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "gibbsbp/bench.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitEngine = 3;

int run_sweep_command(const std::string& config_path,
                      const std::map<std::string, CLI::Option*>& flags,
                      const std::map<std::string, std::string>& values, bool no_timing) {
  using namespace gibbsbp::bench;
  SweepConfig config;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw gibbsbp::ConfigError("cannot open config file '" + config_path + "'");
    try {
      config = parse_sweep_config(in);
    } catch (const gibbsbp::ConfigError& e) {
      throw gibbsbp::ConfigError(config_path + ": " + e.what());
    }
  }
  for (const auto& [key, opt] : flags) {
    if (opt->count() > 0) apply_sweep_key(config, key, values.at(key));
  }
  if (no_timing) config.timing_repetitions = 0;
  config.validate();

  const auto records = run_sweep(config);
  emit_csv(records, config.out);

  std::size_t failed = 0;
  for (const auto& r : records) failed += r.ok() ? 0 : 1;
  std::cerr << "wrote " << records.size() << " rows to " << config.out.string();
  if (failed > 0) std::cerr << " (" << failed << " with non-ok status)";
  std::cerr << '\n';
  return failed > 0 ? kExitEngine : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gibbs-state reduced density matrices: exact, Suzuki-Trotter, and QBP"};
  app.require_subcommand(1);

  auto* sweep = app.add_subcommand("sweep", "Run a beta / slice sweep and write CSV");
  std::string config_path;
  sweep->add_option("--config", config_path, "Key/value config file (flags override it)");
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> flags;
  const std::pair<const char*, const char*> sweep_flags[] = {
      {"sites", "Number of chain sites"},
      {"beta", "Single inverse temperature (one-point grid)"},
      {"beta-min", "Smallest inverse temperature"},
      {"beta-max", "Largest inverse temperature"},
      {"beta-steps", "Number of grid points"},
      {"methods", "Comma list of exact,st,qbp"},
      {"st-slices", "Comma list of Trotter slice counts"},
      {"keep", "Comma list of kept sites (1-based)"},
      {"qbp-tol", "QBP residual tolerance"},
      {"qbp-max-iters", "QBP sweep budget"},
      {"qbp-damping", "QBP damping factor in (0, 1]"},
      {"out", "Output CSV path"},
      {"seed", "RNG seed recorded with the run"},
      {"timing-reps", "Repetitions per row for the median wall time"},
  };
  for (const auto& [name, help] : sweep_flags) {
    flags[name] = sweep->add_option(std::string("--") + name, values[name], help);
  }
  bool no_timing = false;
  sweep->add_flag("--no-timing", no_timing, "Skip timing; wall_time_ms is written as 0");

  auto* complexity = app.add_subcommand("complexity", "Tabulate operation counts and timings");
  std::string sites_range = "2:5";
  std::string slices_range = "10,20,40";
  std::string complexity_out;
  gibbsbp::bench::ComplexityConfig cconfig;
  bool complexity_no_timing = false;
  complexity->add_option("--sites", sites_range, "Site counts, e.g. 2:6 or 3,5");
  complexity->add_option("--slices", slices_range, "Trotter slice counts, e.g. 10:40 or 20,100");
  complexity->add_option("--beta", cconfig.beta, "Inverse temperature for timings");
  complexity->add_option("--out", complexity_out, "Write CSV here instead of stdout");
  complexity->add_flag("--no-timing", complexity_no_timing, "Skip timing");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*sweep) return run_sweep_command(config_path, flags, values, no_timing);

    cconfig.sites = gibbsbp::bench::parse_index_range(sites_range);
    cconfig.slices = gibbsbp::bench::parse_index_range(slices_range);
    if (complexity_no_timing) cconfig.timing_repetitions = 0;
    const std::string csv =
        gibbsbp::bench::format_complexity_csv(gibbsbp::bench::compare_complexity(cconfig));
    if (complexity_out.empty()) {
      std::cout << csv;
    } else {
      std::ofstream file(complexity_out, std::ios::binary);
      if (!file || !(file << csv)) {
        throw gibbsbp::IoError("cannot write '" + complexity_out + "'");
      }
    }
    return 0;
  } catch (const gibbsbp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const gibbsbp::Error& e) {
    std::cerr << e.kind() << ": " << e.what() << '\n';
    return kExitEngine;
  }
}
