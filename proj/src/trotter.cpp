#include "gibbsbp/trotter.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>

#include "gibbsbp/cbp.hpp"

namespace gibbsbp {

namespace {

template <bool Parallel>
StContraction contract_impl(const TrotterPlan& plan) {
  const RealMatrix w = build_weights(plan).w;
  // Sender-first orientation: rows index the slice nearer the right end.
  const RealMatrix w_t = w.transposed();
  const std::size_t dim = w.rows();
  const std::size_t n = plan.n_slices();

  std::vector<std::vector<double>> columns(dim);
  std::vector<double> log_scales(dim, 0.0);
  const auto count = static_cast<std::ptrdiff_t>(dim);

  std::exception_ptr failure;

#pragma omp parallel for schedule(dynamic) if (Parallel)
  for (std::ptrdiff_t bb = 0; bb < count; ++bb) {
    const auto b = static_cast<std::size_t>(bb);
    try {
      // Clamped right end: local potential is the indicator of b.
      std::vector<double> clamp(dim, 0.0);
      clamp[b] = 1.0;
      cbp::Message m = cbp::send_message(clamp, 0.0, w_t);
      for (std::size_t k = 1; k < n; ++k) m = cbp::send_message(m.values, m.log_scale, w_t);
      columns[b] = std::move(m.values);
      log_scales[b] = m.log_scale;
    } catch (...) {
#pragma omp critical(gibbsbp_st_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  const double top = *std::max_element(log_scales.begin(), log_scales.end());
  double tr = 0.0;
  for (std::size_t a = 0; a < dim; ++a) tr += std::exp(log_scales[a] - top) * columns[a][a];
  if (!(tr > 0.0)) {
    throw DomainError("st_contract: non-positive trace of the slice contraction");
  }

  StContraction out;
  out.density = ComplexMatrix(dim);
  for (std::size_t b = 0; b < dim; ++b) {
    const double scale = std::exp(log_scales[b] - top) / tr;
    for (std::size_t a = 0; a < dim; ++a) out.density(a, b) = columns[b][a] * scale;
  }
  out.log_trace = top + std::log(tr);
  return out;
}

std::uint64_t pow2(unsigned e) { return std::uint64_t{1} << e; }

void check_spins(unsigned m) {
  if (m < 1 || m > 24) throw InvalidArgument("opcount: spin count must be in [1, 24]");
}

}  // namespace

TrotterPlan::TrotterPlan(SpinChainModel model, std::size_t n_slices)
    : model_(std::move(model)), n_slices_(n_slices) {
  if (n_slices_ == 0) throw InvalidArgument("TrotterPlan: need at least one slice");
  const double tau = model_.beta() / static_cast<double>(n_slices_);
  factors_.reserve(model_.terms().size());
  // exp commutes with the identity embedding, so exponentiate the 4x4 term.
  for (const BondTerm& t : model_.terms()) {
    factors_.push_back(embed_term(mat_exp(-tau * t.energy), t.left, model_.n_sites()));
  }
}

TransferWeights build_weights(const TrotterPlan& plan) {
  const std::size_t dim = plan.model().hilbert_dim();
  ComplexMatrix product = ComplexMatrix::identity(dim);
  for (const ComplexMatrix& f : plan.slice_factors()) product = product * f;

  const double tol = kImaginaryResidueTol * std::max(1.0, max_abs(product));
  TransferWeights out{RealMatrix(dim, dim)};
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      const cplx x = product(i, j);
      if (std::abs(x.imag()) > tol) {
        throw ComplexResidue("build_weights: imaginary residue " +
                             std::to_string(std::abs(x.imag())) + " at (" +
                             std::to_string(i) + ", " + std::to_string(j) + ")");
      }
      out.w(i, j) = x.real();
    }
  }
  return out;
}

StContraction st_contract(const TrotterPlan& plan) { return contract_impl<true>(plan); }

namespace serial {
StContraction st_contract(const TrotterPlan& plan) { return contract_impl<false>(plan); }
}  // namespace serial

ComplexMatrix st_density(const TrotterPlan& plan) { return st_contract(plan).density; }

ComplexMatrix st_reduced(const TrotterPlan& plan, std::span<const std::size_t> keep) {
  const std::vector<std::size_t> dims = qubit_dims(plan.model().n_sites());
  ComplexMatrix reduced = hermitian_part(partial_trace(st_density(plan), dims, keep));
  HermitianEigen eig = herm_eig(reduced);
  if (eig.eigenvalues.front() >= 0.0) return reduced;
  double total = 0.0;
  for (double& x : eig.eigenvalues) {
    x = std::max(x, 0.0);
    total += x;
  }
  for (double& x : eig.eigenvalues) x /= total;
  return spectral_compose(eig, eig.eigenvalues);
}

std::uint64_t st_middle_opcount(unsigned m) {
  check_spins(m);
  return pow2(m) * (pow2(m + 1) + 1);
}

std::uint64_t st_boundary_opcount(unsigned m) {
  check_spins(m);
  return pow2(m + 1) * (pow2(m) + 1);
}

std::uint64_t st_opcount(std::uint64_t n_slices, unsigned m) {
  check_spins(m);
  if (n_slices < 3) throw InvalidArgument("st_opcount: need at least 3 slices");
  return pow2(m) * (pow2(m + 2) + 2 + (pow2(m + 1) + 1) * (n_slices - 3));
}

}  // namespace gibbsbp
