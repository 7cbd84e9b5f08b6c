#include <cmath>
#include <vector>

#include "doctest.h"
#include "gibbsbp/cbp.hpp"
#include "gibbsbp/metrics.hpp"
#include "gibbsbp/trotter.hpp"

using namespace gibbsbp;

namespace {

ComplexMatrix slice_product(const TrotterPlan& plan) {
  const std::size_t dim = plan.model().hilbert_dim();
  ComplexMatrix w = ComplexMatrix::identity(dim);
  for (const auto& f : plan.slice_factors()) w = serial::multiply(w, f);
  return w;
}

ComplexMatrix matrix_power(const ComplexMatrix& w, std::size_t n) {
  ComplexMatrix out = ComplexMatrix::identity(w.dim());
  for (std::size_t k = 0; k < n; ++k) out = serial::multiply(out, w);
  return out;
}

const std::size_t kKeep12[] = {0, 1};

}  // namespace

TEST_CASE("beta = 0 gives identity weights and the maximally mixed state") {
  const TrotterPlan plan(heisenberg_chain(3, 0.0), 10);
  const TransferWeights tw = build_weights(plan);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j) CHECK(tw.w(i, j) == doctest::Approx(i == j ? 1.0 : 0.0));
  const ComplexMatrix rho = st_density(plan);
  CHECK(max_abs_diff(rho, ComplexMatrix::identity(8) * cplx(1.0 / 8)) < 1e-14);
  const StContraction c = st_contract(plan);
  CHECK(c.log_trace == doctest::Approx(std::log(8.0)));
}

TEST_CASE("slice factors are the embedded exponentials") {
  const SpinChainModel model = heisenberg_chain(4, 1.3, {1.0, 0.5, 2.0});
  const std::size_t n = 7;
  const TrotterPlan plan(model, n);
  REQUIRE(plan.slice_factors().size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    const ComplexMatrix h = embed_term(model.term(k).energy, k, 4);
    const ComplexMatrix expected = mat_exp(h * cplx(-model.beta() / n));
    CHECK(max_abs_diff(plan.slice_factors()[k], expected) < 1e-12);
  }
}

TEST_CASE("transfer weights are real with signed entries") {
  const TrotterPlan plan(heisenberg_chain(3, 1.0), 20);
  const TransferWeights tw = build_weights(plan);
  const ComplexMatrix w = slice_product(plan);
  bool any_negative = false;
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j) {
      CHECK(std::abs(tw.w(i, j) - w(i, j).real()) < 1e-14);
      any_negative = any_negative || tw.w(i, j) < 0.0;
    }
  CHECK(tw.w(0, 0) > 0.0);
  CHECK(any_negative);
}

TEST_CASE("complex bond terms are rejected") {
  const ComplexMatrix term = kron(pauli_y(), pauli_x());
  const SpinChainModel model(2, {{0, term}}, 1.0);
  CHECK_THROWS_AS(build_weights(TrotterPlan(model, 5)), ComplexResidue);
  CHECK_THROWS_AS(TrotterPlan(heisenberg_chain(3, 1.0), 0), InvalidArgument);
}

TEST_CASE("st_density equals the normalized matrix power") {
  for (double beta : {0.2, 1.0, 2.0}) {
    for (std::size_t n : {1u, 3u, 20u}) {
      const TrotterPlan plan(heisenberg_chain(3, beta), n);
      const ComplexMatrix p = matrix_power(slice_product(plan), n);
      const ComplexMatrix expected = p * cplx(1.0 / trace(p).real());
      const StContraction c = st_contract(plan);
      CHECK(max_abs_diff(c.density, expected) < 1e-10);
      CHECK(c.log_trace == doctest::Approx(std::log(trace(p).real())).epsilon(1e-12));
      CHECK(std::abs(trace(c.density) - cplx(1.0)) < 1e-12);
    }
  }
}

TEST_CASE("st_contract agrees with a clamped classical chain") {
  const std::size_t n = 4;
  const TrotterPlan plan(heisenberg_chain(2, 0.8), n);
  const RealMatrix w = build_weights(plan).w;
  const StContraction st = st_contract(plan);
  const double tr = std::exp(st.log_trace);
  for (std::size_t b = 0; b < 4; ++b) {
    std::vector<cbp::FactorEdge> edges;
    for (std::size_t k = 0; k < n; ++k) edges.push_back({k, k + 1, w});
    std::vector<std::vector<double>> locals(n + 1, std::vector<double>(4, 1.0));
    locals[n] = {0, 0, 0, 0};
    locals[n][b] = 1.0;
    const cbp::FactorChain chain(std::vector<std::size_t>(n + 1, 4), edges, locals);
    const cbp::MessageTable msgs = cbp::run_bp(chain);
    const cbp::SignedLog lz = cbp::log_partition(chain, msgs);
    const std::vector<double> col = cbp::belief_single(chain, msgs, 0);
    for (std::size_t a = 0; a < 4; ++a) {
      const double entry = lz.sign * std::exp(lz.log_abs) * col[a];
      CHECK(std::abs(entry / tr - st.density(a, b).real()) < 1e-12);
    }
  }
}

TEST_CASE("first-order Trotter error halves when n doubles") {
  const SpinChainModel model = heisenberg_chain(3, 1.0);
  const ComplexMatrix exact = exact_gibbs(model);
  double previous = 0.0;
  for (std::size_t n : {10u, 20u, 40u, 80u}) {
    const double err = frobenius_norm(st_density(TrotterPlan(model, n)) - exact);
    if (previous > 0.0) {
      const double ratio = previous / err;
      CHECK(ratio > 1.8);
      CHECK(ratio < 2.2);
    }
    previous = err;
  }
}

TEST_CASE("reduced Trotter states approach the exact marginal") {
  const SpinChainModel model = heisenberg_chain(3, 1.0);
  const ComplexMatrix exact = partial_trace(exact_gibbs(model), qubit_dims(3), kKeep12);
  const ComplexMatrix r20 = st_reduced(TrotterPlan(model, 20), kKeep12);
  const ComplexMatrix r100 = st_reduced(TrotterPlan(model, 100), kKeep12);
  CHECK(trace_distance(r100, exact) < 1e-3);
  CHECK(trace_distance(r100, exact) < trace_distance(r20, exact));
  const double f20 = fidelity(r20, exact);
  const double f100 = fidelity(r100, exact);
  CHECK(f20 > 0.99);
  CHECK(f100 > 0.99);
  CHECK(f20 < f100);
}

TEST_CASE("st_reduced is a density matrix even where the Trotter product is not") {
  for (double beta : {1.6, 2.0, 3.0}) {
    for (std::size_t n : {3u, 5u, 20u}) {
      const ComplexMatrix r = st_reduced(TrotterPlan(heisenberg_chain(3, beta), n), kKeep12);
      CHECK_NOTHROW(require_density_matrix(r, "st_reduced"));
      CHECK(std::abs(trace(r) - cplx(1.0)) < 1e-12);
      CHECK(is_hermitian(r));
    }
  }
}

TEST_CASE("operation counts") {
  CHECK(st_middle_opcount(3) == 136);
  CHECK(st_boundary_opcount(3) == 144);
  CHECK(st_opcount(20, 3) == 2584);
  CHECK(st_opcount(3, 1) == 2 * (8 + 2));
  for (unsigned m = 1; m <= 10; ++m) {
    for (std::uint64_t n = 3; n < 50; ++n) CHECK(st_opcount(n + 1, m) > st_opcount(n, m));
    const double growth = double(st_opcount(20, m + 1)) / double(st_opcount(20, m));
    CHECK(growth > 3.5);
    CHECK(growth < 4.5);
  }
  CHECK_THROWS_AS(st_opcount(2, 3), InvalidArgument);
  CHECK_THROWS_AS(st_opcount(20, 0), InvalidArgument);
  CHECK_THROWS_AS(st_opcount(20, 25), InvalidArgument);
  CHECK_NOTHROW(st_opcount(20, 24));
}
