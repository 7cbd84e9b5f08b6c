#pragma once

#include <cstddef>
#include <istream>
#include <string>
#include <utility>
#include <vector>

#include "gibbsbp/densemat.hpp"

namespace gibbsbp {

ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();

// sx(x)sx + sy(x)sy + sz(x)sz with Pauli matrices (J = 1).
ComplexMatrix heisenberg_term();

// I^{(x)left} (x) term (x) I^{(x)(n_sites-left-2)}; `left` is the 0-based
// index of the first site of the bond (left, left + 1).
ComplexMatrix embed_term(const ComplexMatrix& term, std::size_t left,
                         std::size_t n_sites);

struct BondTerm {
  std::size_t left = 0;  // bond (left, left + 1), 0-based
  ComplexMatrix energy;  // 4x4 Hermitian, site order (left, left + 1)
};

// Open chain of spin-1/2 sites with one term per nearest-neighbor bond.
class SpinChainModel {
 public:
  // Validates that `terms` covers bonds 0..n_sites-2 in order, each 4x4
  // Hermitian, and that beta >= 0.
  SpinChainModel(std::size_t n_sites, std::vector<BondTerm> terms, double beta);

  std::size_t n_sites() const noexcept { return n_sites_; }
  const std::vector<BondTerm>& terms() const noexcept { return terms_; }
  const BondTerm& term(std::size_t left) const { return terms_.at(left); }
  double beta() const noexcept { return beta_; }
  std::size_t hilbert_dim() const noexcept { return std::size_t{1} << n_sites_; }

  SpinChainModel with_beta(double beta) const;

 private:
  std::size_t n_sites_;
  std::vector<BondTerm> terms_;
  double beta_;
};

inline constexpr std::size_t kMaxSites = 12;

// Isotropic Heisenberg chain; couplings[k] scales bond k (default all 1).
SpinChainModel heisenberg_chain(std::size_t n_sites, double beta,
                                std::vector<double> couplings = {});

ComplexMatrix total_hamiltonian(const SpinChainModel& model);

// exp(-beta H) / tr exp(-beta H).
ComplexMatrix exact_gibbs(const SpinChainModel& model);

// Per-site dimensions (all 2) for partial_trace on chain operators.
std::vector<std::size_t> qubit_dims(std::size_t n_sites);

// Plain-text key/value model description:
//   model=heisenberg
//   sites=3
//   beta=1.0
//   J_1=1.0        (optional, 1-based bond index)
// Blank lines and lines starting with '#' are ignored. Unknown keys raise
// ConfigError unless listed in `extra_keys`, whose values are returned
// untouched in `extras` in file order.
struct ModelDescription {
  struct Entry {
    std::string key;
    std::string value;
    std::size_t line = 0;
  };

  std::size_t sites = 0;
  double beta = 0.0;
  bool has_beta = false;
  std::vector<double> couplings;
  std::vector<Entry> extras;

  SpinChainModel build() const;
};

ModelDescription parse_model_description(std::istream& in,
                                         const std::vector<std::string>& extra_keys = {});

}  // namespace gibbsbp
