#pragma once

// Parameter sweeps comparing exact diagonalization, Suzuki-Trotter, and QBP
// reduced states, with CSV output.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "gibbsbp/qbp.hpp"

namespace gibbsbp::bench {

enum class Method { exact, st, qbp };

const char* method_name(Method m);
Method parse_method(const std::string& name);  // throws ConfigError

struct SweepConfig {
  std::size_t sites = 3;
  double beta_min = 0.2;
  double beta_max = 2.0;
  std::size_t beta_steps = 10;
  std::vector<Method> methods{Method::exact, Method::st, Method::qbp};
  std::vector<std::size_t> st_slices{20, 100};
  std::vector<std::size_t> keep{0, 1};  // 0-based
  std::vector<double> couplings;        // empty: all bonds J = 1
  QbpOptions qbp;
  std::filesystem::path out = "sweep.csv";
  std::uint64_t seed = 0;
  // Repetitions per row; the reported wall time is their median. Zero
  // disables timing and writes 0, which makes the CSV byte-reproducible.
  std::size_t timing_repetitions = 5;

  std::vector<double> beta_grid() const;
  // Throws ConfigError on any broken invariant.
  void validate() const;
};

struct SweepRecord {
  double beta = 0.0;
  Method method = Method::exact;
  std::optional<std::size_t> n_slices;
  std::optional<double> fidelity;
  std::optional<double> trace_distance;
  std::size_t iterations = 0;
  double wall_time_ms = 0.0;
  std::uint64_t opcount = 0;
  std::string status = "ok";

  bool ok() const { return status == "ok"; }
};

// Rows sorted by (beta, method, n_slices). Engine failures are recorded in
// the row status rather than thrown. Grid points run in parallel.
std::vector<SweepRecord> run_sweep(const SweepConfig& config);

inline constexpr const char* kCsvHeader =
    "beta,method,n_slices,fidelity,trace_distance,iterations,wall_time_ms,opcount,status";

// Header plus one LF-terminated line per record; floats use 12 significant
// digits. Throws InvalidArgument for an empty record list.
std::string format_csv(const std::vector<SweepRecord>& records);

// Writes format_csv to `path`. Throws InvalidArgument (no file is created)
// for an empty list and IoError naming the path on write failure.
void emit_csv(const std::vector<SweepRecord>& records, const std::filesystem::path& path);

// Reads a key/value config: the model keys (model, sites, beta, J_i) plus any
// sweep flag name without its leading dashes (e.g. beta-min=0.2). A single
// `beta` sets a one-point grid. Throws ConfigError with line diagnostics.
SweepConfig parse_sweep_config(std::istream& in, SweepConfig base = {});

// Applies one sweep key; shared by the config reader and the CLI.
void apply_sweep_key(SweepConfig& config, const std::string& key, const std::string& value);

struct ComplexityRow {
  std::size_t sites = 0;
  std::size_t slices = 0;
  std::uint64_t qbp_per_sweep = 0;
  std::uint64_t qbp_total = 0;  // per-sweep count times m sweeps, m = sites
  std::uint64_t st = 0;
  std::size_t qbp_sweeps = 0;   // measured sweeps to convergence
  double qbp_wall_time_ms = 0.0;
  double st_wall_time_ms = 0.0;
};

struct ComplexityConfig {
  std::vector<std::size_t> sites{2, 3, 4, 5};
  std::vector<std::size_t> slices{10, 20, 40};
  double beta = 1.0;
  QbpOptions qbp;
  std::size_t timing_repetitions = 5;
};

std::vector<ComplexityRow> compare_complexity(const ComplexityConfig& config);

inline constexpr const char* kComplexityHeader =
    "sites,slices,qbp_opcount_per_sweep,qbp_opcount_total,st_opcount,qbp_sweeps,"
    "qbp_wall_time_ms,st_wall_time_ms";

std::string format_complexity_csv(const std::vector<ComplexityRow>& rows);

// "3", "2:6" (inclusive) or "10,20,40".
std::vector<std::size_t> parse_index_range(const std::string& text);

namespace serial {
std::vector<SweepRecord> run_sweep(const SweepConfig& config);
}  // namespace serial

}  // namespace gibbsbp::bench
