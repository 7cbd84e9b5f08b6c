#include "gibbsbp/spinmodel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <string>

namespace gibbsbp {

ComplexMatrix pauli_x() { return {{0.0, 1.0}, {1.0, 0.0}}; }
ComplexMatrix pauli_y() { return {{0.0, cplx{0.0, -1.0}}, {cplx{0.0, 1.0}, 0.0}}; }
ComplexMatrix pauli_z() { return {{1.0, 0.0}, {0.0, -1.0}}; }

ComplexMatrix heisenberg_term() {
  return kron(pauli_x(), pauli_x()) + kron(pauli_y(), pauli_y()) +
         kron(pauli_z(), pauli_z());
}

ComplexMatrix embed_term(const ComplexMatrix& term, std::size_t left,
                         std::size_t n_sites) {
  if (term.dim() != 4) {
    throw DimensionMismatch("embed_term: bond term must be 4x4, got " +
                            std::to_string(term.dim()));
  }
  if (n_sites < 2 || left + 1 >= n_sites) {
    throw IndexOutOfRange("embed_term: bond (" + std::to_string(left) + ", " +
                          std::to_string(left + 1) + ") outside a " +
                          std::to_string(n_sites) + "-site chain");
  }
  const std::size_t right_sites = n_sites - left - 2;
  ComplexMatrix out = kron(ComplexMatrix::identity(std::size_t{1} << left), term);
  return kron(out, ComplexMatrix::identity(std::size_t{1} << right_sites));
}

SpinChainModel::SpinChainModel(std::size_t n_sites, std::vector<BondTerm> terms,
                               double beta)
    : n_sites_(n_sites), terms_(std::move(terms)), beta_(beta) {
  if (n_sites_ == 0 || n_sites_ > kMaxSites) {
    throw InvalidArgument("SpinChainModel: site count must be in [1, " +
                          std::to_string(kMaxSites) + "], got " +
                          std::to_string(n_sites_));
  }
  if (!(beta_ >= 0.0) || !std::isfinite(beta_)) {
    throw InvalidArgument("SpinChainModel: beta must be finite and >= 0");
  }
  if (terms_.size() != n_sites_ - 1) {
    throw InvalidArgument("SpinChainModel: expected " + std::to_string(n_sites_ - 1) +
                          " bond terms, got " + std::to_string(terms_.size()));
  }
  for (std::size_t k = 0; k < terms_.size(); ++k) {
    if (terms_[k].left != k) {
      throw InvalidArgument("SpinChainModel: bond terms must cover (k, k+1) in order");
    }
    if (terms_[k].energy.dim() != 4) {
      throw DimensionMismatch("SpinChainModel: bond term must be 4x4");
    }
    require_hermitian(terms_[k].energy, "SpinChainModel bond term");
  }
}

SpinChainModel SpinChainModel::with_beta(double beta) const {
  return SpinChainModel(n_sites_, terms_, beta);
}

SpinChainModel heisenberg_chain(std::size_t n_sites, double beta,
                                std::vector<double> couplings) {
  if (n_sites == 0) throw InvalidArgument("heisenberg_chain: need at least one site");
  if (couplings.empty()) couplings.assign(n_sites - 1, 1.0);
  if (couplings.size() != n_sites - 1) {
    throw InvalidArgument("heisenberg_chain: expected " + std::to_string(n_sites - 1) +
                          " couplings, got " + std::to_string(couplings.size()));
  }
  const ComplexMatrix h = heisenberg_term();
  std::vector<BondTerm> terms;
  terms.reserve(n_sites - 1);
  for (std::size_t k = 0; k + 1 < n_sites; ++k) {
    terms.push_back({k, couplings[k] * h});
  }
  return SpinChainModel(n_sites, std::move(terms), beta);
}

ComplexMatrix total_hamiltonian(const SpinChainModel& model) {
  ComplexMatrix h(model.hilbert_dim());
  for (const BondTerm& t : model.terms()) h += embed_term(t.energy, t.left, model.n_sites());
  return h;
}

ComplexMatrix exact_gibbs(const SpinChainModel& model) {
  return exp_normalized(-model.beta() * total_hamiltonian(model));
}

std::vector<std::size_t> qubit_dims(std::size_t n_sites) {
  return std::vector<std::size_t>(n_sites, 2);
}

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void config_fail(std::size_t line, const std::string& key,
                              const std::string& what) {
  throw ConfigError("line " + std::to_string(line) + ", field '" + key + "': " + what);
}

double parse_double(std::size_t line, const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out)) {
    config_fail(line, key, "expected a real number, got '" + v + "'");
  }
  return out;
}

std::size_t parse_size(std::size_t line, const std::string& key, const std::string& v) {
  std::size_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    config_fail(line, key, "expected a non-negative integer, got '" + v + "'");
  }
  return out;
}

}  // namespace

ModelDescription parse_model_description(std::istream& in,
                                         const std::vector<std::string>& extra_keys) {
  ModelDescription desc;
  std::map<std::size_t, std::pair<std::size_t, double>> bond_couplings;  // bond -> (line, J)
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key=value, got '" +
                        line + "'");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");

    if (key == "model") {
      if (value != "heisenberg") config_fail(line_no, key, "unsupported model '" + value + "'");
    } else if (key == "sites") {
      desc.sites = parse_size(line_no, key, value);
      if (desc.sites < 1 || desc.sites > kMaxSites) {
        config_fail(line_no, key, "must be in [1, " + std::to_string(kMaxSites) + "]");
      }
    } else if (key == "beta") {
      desc.beta = parse_double(line_no, key, value);
      if (desc.beta < 0.0) config_fail(line_no, key, "must be >= 0");
      desc.has_beta = true;
    } else if (key.size() > 2 && key.starts_with("J_")) {
      const std::size_t bond = parse_size(line_no, key, key.substr(2));
      if (bond == 0) config_fail(line_no, key, "bond indices start at 1");
      bond_couplings[bond] = {line_no, parse_double(line_no, key, value)};
    } else if (std::find(extra_keys.begin(), extra_keys.end(), key) != extra_keys.end()) {
      desc.extras.push_back({key, value, line_no});
    } else {
      config_fail(line_no, key, "unknown key");
    }
  }

  if (!bond_couplings.empty()) {
    if (desc.sites == 0) {
      throw ConfigError("J_i couplings given without 'sites'");
    }
    desc.couplings.assign(desc.sites - 1, 1.0);
    for (const auto& [bond, entry] : bond_couplings) {
      if (bond > desc.sites - 1) {
        config_fail(entry.first, "J_" + std::to_string(bond),
                    "bond index exceeds sites-1 = " + std::to_string(desc.sites - 1));
      }
      desc.couplings[bond - 1] = entry.second;
    }
  }
  return desc;
}

SpinChainModel ModelDescription::build() const {
  if (sites == 0) throw ConfigError("model description is missing 'sites'");
  return heisenberg_chain(sites, beta, couplings);
}

}  // namespace gibbsbp
