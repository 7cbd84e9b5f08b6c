#include "gibbsbp/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <sstream>

#include "gibbsbp/metrics.hpp"
#include "gibbsbp/spinmodel.hpp"
#include "gibbsbp/trotter.hpp"

namespace gibbsbp::bench {

namespace {

const std::vector<std::string> kSweepKeys = {
    "beta-min",  "beta-max",      "beta-steps",  "methods", "st-slices", "keep",
    "qbp-tol",   "qbp-max-iters", "qbp-damping", "out",     "seed",      "timing-reps"};

std::string format_real(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out)) {
    throw ConfigError("field '" + key + "': expected a real number, got '" + v + "'");
  }
  return out;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw ConfigError("field '" + key + "': expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

// Median wall time of `reps` evaluations of `body`; reps == 0 runs it once
// untimed and reports 0.
template <class F>
double timed(std::size_t reps, F&& body) {
  if (reps == 0) {
    body();
    return 0.0;
  }
  std::vector<double> ms(reps);
  for (std::size_t r = 0; r < reps; ++r) {
    const auto start = std::chrono::steady_clock::now();
    body();
    const auto stop = std::chrono::steady_clock::now();
    ms[r] = std::chrono::duration<double, std::milli>(stop - start).count();
  }
  std::nth_element(ms.begin(), ms.begin() + static_cast<std::ptrdiff_t>(reps / 2), ms.end());
  return ms[reps / 2];
}

struct WorkItem {
  std::size_t beta_index;
  Method method;
  std::optional<std::size_t> n_slices;
};

SweepRecord evaluate(const SweepConfig& config, const SpinChainModel& model,
                     const ComplexMatrix* reference, const WorkItem& item) {
  SweepRecord row;
  row.beta = model.beta();
  row.method = item.method;
  row.n_slices = item.n_slices;
  try {
    if (reference == nullptr) throw DomainError("reference state unavailable");
    ComplexMatrix reduced;
    switch (item.method) {
      case Method::exact: {
        const auto dims = qubit_dims(model.n_sites());
        row.wall_time_ms = timed(config.timing_repetitions, [&] {
          reduced = partial_trace(exact_gibbs(model), dims, config.keep);
        });
        row.iterations = 1;
        break;
      }
      case Method::st: {
        const std::size_t n = *item.n_slices;
        row.wall_time_ms = timed(config.timing_repetitions, [&] {
          reduced = st_reduced(TrotterPlan(model, n), config.keep);
        });
        row.iterations = n;
        if (n >= 3) row.opcount = st_opcount(n, static_cast<unsigned>(model.n_sites()));
        break;
      }
      case Method::qbp: {
        QbpResult result;
        row.wall_time_ms = timed(config.timing_repetitions, [&] {
          try {
            result = qbp_run(model, config.qbp);
          } catch (const NotConverged& e) {
            result = e.result();
          }
        });
        reduced = qbp_reduced(result, config.keep);
        row.iterations = result.iterations;
        if (model.n_sites() >= 2) row.opcount = qbp_opcount(model.n_sites());
        if (!result.converged) row.status = "not_converged";
        break;
      }
    }
    row.fidelity = fidelity(reduced, *reference);
    row.trace_distance = trace_distance(reduced, *reference);
  } catch (const Error& e) {
    row.status = e.kind();
  } catch (const std::exception&) {
    row.status = "error";
  }
  return row;
}

bool record_less(const SweepRecord& a, const SweepRecord& b) {
  if (a.beta != b.beta) return a.beta < b.beta;
  if (a.method != b.method) return a.method < b.method;
  return a.n_slices.value_or(0) < b.n_slices.value_or(0);
}

template <bool Parallel>
std::vector<SweepRecord> sweep_impl(const SweepConfig& config) {
  config.validate();
  const std::vector<double> betas = config.beta_grid();

  std::vector<Method> methods = config.methods;
  std::sort(methods.begin(), methods.end());
  methods.erase(std::unique(methods.begin(), methods.end()), methods.end());
  std::vector<std::size_t> slices = config.st_slices;
  std::sort(slices.begin(), slices.end());
  slices.erase(std::unique(slices.begin(), slices.end()), slices.end());

  std::vector<WorkItem> items;
  for (std::size_t b = 0; b < betas.size(); ++b) {
    for (Method m : methods) {
      if (m == Method::st) {
        for (std::size_t n : slices) items.push_back({b, m, n});
      } else {
        items.push_back({b, m, std::nullopt});
      }
    }
  }

  const SpinChainModel base = heisenberg_chain(config.sites, 0.0, config.couplings);
  const auto dims = qubit_dims(config.sites);
  std::vector<std::optional<ComplexMatrix>> references(betas.size());
  const auto n_betas = static_cast<std::ptrdiff_t>(betas.size());
#pragma omp parallel for schedule(dynamic) if (Parallel)
  for (std::ptrdiff_t b = 0; b < n_betas; ++b) {
    try {
      references[b] = partial_trace(exact_gibbs(base.with_beta(betas[b])), dims, config.keep);
    } catch (...) {
      // Rows at this beta report the failure individually.
    }
  }

  std::vector<SweepRecord> records(items.size());
  const auto n_items = static_cast<std::ptrdiff_t>(items.size());
#pragma omp parallel for schedule(dynamic) if (Parallel)
  for (std::ptrdiff_t k = 0; k < n_items; ++k) {
    const WorkItem& item = items[k];
    const auto& ref = references[item.beta_index];
    records[k] = evaluate(config, base.with_beta(betas[item.beta_index]),
                          ref ? &*ref : nullptr, item);
  }
  std::stable_sort(records.begin(), records.end(), record_less);
  return records;
}

std::pair<std::size_t, std::size_t> parse_range_bounds(const std::string& text) {
  const auto colon = text.find(':');
  const std::uint64_t lo = to_uint("range", text.substr(0, colon));
  const std::uint64_t hi = to_uint("range", text.substr(colon + 1));
  if (hi < lo) throw ConfigError("range '" + text + "' is decreasing");
  return {lo, hi};
}

}  // namespace

const char* method_name(Method m) {
  switch (m) {
    case Method::exact: return "exact";
    case Method::st: return "st";
    case Method::qbp: return "qbp";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  if (name == "exact") return Method::exact;
  if (name == "st") return Method::st;
  if (name == "qbp") return Method::qbp;
  throw ConfigError("unknown method '" + name + "' (expected exact, st, or qbp)");
}

std::vector<double> SweepConfig::beta_grid() const {
  if (beta_steps <= 1) return {beta_min};
  std::vector<double> grid(beta_steps);
  const double step = (beta_max - beta_min) / static_cast<double>(beta_steps - 1);
  for (std::size_t k = 0; k < beta_steps; ++k) grid[k] = beta_min + step * static_cast<double>(k);
  grid.back() = beta_max;
  return grid;
}

void SweepConfig::validate() const {
  if (sites < 1 || sites > kMaxSites) {
    throw ConfigError("sites must be in [1, " + std::to_string(kMaxSites) + "]");
  }
  if (!(beta_min >= 0.0)) throw ConfigError("beta-min must be >= 0");
  if (beta_steps == 0) throw ConfigError("beta-steps must be >= 1");
  if (beta_steps > 1 && !(beta_max > beta_min)) {
    throw ConfigError("beta grid must be strictly increasing (beta-max > beta-min)");
  }
  if (methods.empty()) throw ConfigError("methods must not be empty");
  if (std::find(methods.begin(), methods.end(), Method::st) != methods.end() &&
      st_slices.empty()) {
    throw ConfigError("st-slices must not be empty when st is requested");
  }
  for (std::size_t n : st_slices) {
    if (n < 1) throw ConfigError("st-slices entries must be >= 1");
  }
  if (keep.empty()) throw ConfigError("keep must list at least one site");
  for (std::size_t k = 0; k < keep.size(); ++k) {
    if (keep[k] >= sites) throw ConfigError("keep site " + std::to_string(keep[k] + 1) +
                                            " exceeds sites");
    if (k > 0 && keep[k] <= keep[k - 1]) throw ConfigError("keep sites must be distinct");
  }
  if (!couplings.empty() && couplings.size() + 1 != sites) {
    throw ConfigError("couplings must list sites-1 values");
  }
  if (qbp.max_iters == 0) throw ConfigError("qbp-max-iters must be >= 1");
  if (!(qbp.tol > 0.0)) throw ConfigError("qbp-tol must be > 0");
  if (!(qbp.damping > 0.0 && qbp.damping <= 1.0)) throw ConfigError("qbp-damping must be in (0, 1]");
}

std::vector<SweepRecord> run_sweep(const SweepConfig& config) { return sweep_impl<true>(config); }

namespace serial {
std::vector<SweepRecord> run_sweep(const SweepConfig& config) { return sweep_impl<false>(config); }
}  // namespace serial

std::string format_csv(const std::vector<SweepRecord>& records) {
  if (records.empty()) throw InvalidArgument("format_csv: no records");
  std::string out = kCsvHeader;
  out += '\n';
  for (const SweepRecord& r : records) {
    out += format_real(r.beta);
    out += ',';
    out += method_name(r.method);
    out += ',';
    if (r.n_slices) out += std::to_string(*r.n_slices);
    out += ',';
    if (r.fidelity) out += format_real(*r.fidelity);
    out += ',';
    if (r.trace_distance) out += format_real(*r.trace_distance);
    out += ',';
    out += std::to_string(r.iterations);
    out += ',';
    out += format_real(r.wall_time_ms);
    out += ',';
    out += std::to_string(r.opcount);
    out += ',';
    out += r.status;
    out += '\n';
  }
  return out;
}

void emit_csv(const std::vector<SweepRecord>& records, const std::filesystem::path& path) {
  const std::string text = format_csv(records);
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open '" + path.string() + "' for writing");
  file.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!file) throw IoError("write to '" + path.string() + "' failed");
}

void apply_sweep_key(SweepConfig& c, const std::string& key, const std::string& value) {
  if (key == "sites") {
    c.sites = to_uint(key, value);
  } else if (key == "beta") {
    c.beta_min = c.beta_max = to_double(key, value);
    c.beta_steps = 1;
  } else if (key == "beta-min") {
    c.beta_min = to_double(key, value);
  } else if (key == "beta-max") {
    c.beta_max = to_double(key, value);
  } else if (key == "beta-steps") {
    c.beta_steps = to_uint(key, value);
  } else if (key == "methods") {
    c.methods.clear();
    for (const auto& m : split_list(value)) c.methods.push_back(parse_method(m));
  } else if (key == "st-slices") {
    c.st_slices.clear();
    for (const auto& n : split_list(value)) c.st_slices.push_back(to_uint(key, n));
  } else if (key == "keep") {
    c.keep.clear();
    for (const auto& s : split_list(value)) {
      const std::uint64_t site = to_uint(key, s);
      if (site == 0) throw ConfigError("field 'keep': sites are numbered from 1");
      c.keep.push_back(site - 1);
    }
    std::sort(c.keep.begin(), c.keep.end());
  } else if (key == "qbp-tol") {
    c.qbp.tol = to_double(key, value);
  } else if (key == "qbp-max-iters") {
    c.qbp.max_iters = to_uint(key, value);
  } else if (key == "qbp-damping") {
    c.qbp.damping = to_double(key, value);
  } else if (key == "out") {
    c.out = value;
  } else if (key == "seed") {
    c.seed = to_uint(key, value);
  } else if (key == "timing-reps") {
    c.timing_repetitions = to_uint(key, value);
  } else {
    throw ConfigError("unknown field '" + key + "'");
  }
}

SweepConfig parse_sweep_config(std::istream& in, SweepConfig base) {
  const ModelDescription desc = parse_model_description(in, kSweepKeys);
  if (desc.sites != 0) base.sites = desc.sites;
  if (!desc.couplings.empty()) base.couplings = desc.couplings;
  if (desc.has_beta) {
    base.beta_min = base.beta_max = desc.beta;
    base.beta_steps = 1;
  }
  for (const auto& entry : desc.extras) {
    try {
      apply_sweep_key(base, entry.key, entry.value);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(entry.line) + ", " + e.what());
    }
  }
  return base;
}

std::vector<ComplexityRow> compare_complexity(const ComplexityConfig& config) {
  std::vector<ComplexityRow> rows;
  for (std::size_t sites : config.sites) {
    if (sites < 2 || sites > kMaxSites) {
      throw ConfigError("complexity: sites must be in [2, " + std::to_string(kMaxSites) + "]");
    }
    const SpinChainModel model = heisenberg_chain(sites, config.beta);
    std::size_t sweeps = 0;
    const double qbp_ms = timed(config.timing_repetitions, [&] {
      try {
        sweeps = qbp_run(model, config.qbp).iterations;
      } catch (const NotConverged& e) {
        sweeps = e.result().iterations;
      }
    });
    const std::size_t pair[] = {0, 1};
    for (std::size_t n : config.slices) {
      if (n < 3) throw ConfigError("complexity: slices must be >= 3");
      ComplexityRow row;
      row.sites = sites;
      row.slices = n;
      row.qbp_per_sweep = qbp_opcount(sites);
      row.qbp_total = row.qbp_per_sweep * sites;
      row.st = st_opcount(n, static_cast<unsigned>(sites));
      row.qbp_sweeps = sweeps;
      row.qbp_wall_time_ms = qbp_ms;
      row.st_wall_time_ms = timed(config.timing_repetitions, [&] {
        (void)st_reduced(TrotterPlan(model, n), pair);
      });
      rows.push_back(row);
    }
  }
  return rows;
}

std::string format_complexity_csv(const std::vector<ComplexityRow>& rows) {
  std::string out = kComplexityHeader;
  out += '\n';
  for (const ComplexityRow& r : rows) {
    out += std::to_string(r.sites) + ',' + std::to_string(r.slices) + ',' +
           std::to_string(r.qbp_per_sweep) + ',' + std::to_string(r.qbp_total) + ',' +
           std::to_string(r.st) + ',' + std::to_string(r.qbp_sweeps) + ',' +
           format_real(r.qbp_wall_time_ms) + ',' + format_real(r.st_wall_time_ms) + '\n';
  }
  return out;
}

std::vector<std::size_t> parse_index_range(const std::string& text) {
  std::vector<std::size_t> out;
  for (const auto& part : split_list(text)) {
    if (part.find(':') != std::string::npos) {
      const auto [lo, hi] = parse_range_bounds(part);
      for (std::size_t v = lo; v <= hi; ++v) out.push_back(v);
    } else {
      out.push_back(to_uint("range", part));
    }
  }
  if (out.empty()) throw ConfigError("empty range '" + text + "'");
  return out;
}

}  // namespace gibbsbp::bench
