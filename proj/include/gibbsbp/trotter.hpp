#pragma once

// First-order Suzuki-Trotter mapping of exp(-beta H) onto a chain of
// computational-basis configurations (a, c_1, ..., c_{n-1}, b) linked by
// transfer weights W, contracted with sum-product messages.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gibbsbp/densemat.hpp"
#include "gibbsbp/spinmodel.hpp"

namespace gibbsbp {

class TrotterPlan {
 public:
  // Throws InvalidArgument for n_slices == 0.
  TrotterPlan(SpinChainModel model, std::size_t n_slices);

  const SpinChainModel& model() const noexcept { return model_; }
  std::size_t n_slices() const noexcept { return n_slices_; }
  // exp(-(beta/n) h_k) embedded in the full chain, one per bond, ascending.
  const std::vector<ComplexMatrix>& slice_factors() const noexcept { return factors_; }

 private:
  SpinChainModel model_;
  std::size_t n_slices_;
  std::vector<ComplexMatrix> factors_;
};

// W[a][c] = <a| prod_k exp(-(beta/n) h_k) |c>, bond order ascending.
struct TransferWeights {
  RealMatrix w;
};

inline constexpr double kImaginaryResidueTol = 1e-12;

// Throws ComplexResidue if the slice product has imaginary entries above
// 1e-12 * max(1, max|W|).
TransferWeights build_weights(const TrotterPlan& plan);

struct StContraction {
  ComplexMatrix density;  // P(a, b), unit trace
  double log_trace = 0.0; // log tr W^n
};

// Contracts the slice chain once per right end b: the right end is clamped,
// messages m_{k -> k-1}(c) = sum_c' W(c; c') m(c') run down to the left end,
// and the resulting column holds P(a, b) up to its log scale. Columns are
// independent and run in parallel.
StContraction st_contract(const TrotterPlan& plan);

// W^n / tr W^n. Not Hermitian in general: the splitting is not symmetric.
ComplexMatrix st_density(const TrotterPlan& plan);

// Reduced state on `keep` (0-based sites): partial trace of st_density, its
// Hermitian part, and negative eigenvalues (a Trotter artefact at coarse n)
// clipped with the trace renormalized to one.
ComplexMatrix st_reduced(const TrotterPlan& plan, std::span<const std::size_t> keep);

// Analytic operation counts for an m-spin chain with n slices.
std::uint64_t st_middle_opcount(unsigned m);    // 2^m (2^{m+1} + 1)
std::uint64_t st_boundary_opcount(unsigned m);  // 2^{m+1} (2^m + 1)
// 2^m (2^{m+2} + 2 + (2^{m+1} + 1)(n - 3)); requires n >= 3, 1 <= m <= 24.
std::uint64_t st_opcount(std::uint64_t n_slices, unsigned m);

namespace serial {
StContraction st_contract(const TrotterPlan& plan);
}  // namespace serial

}  // namespace gibbsbp
