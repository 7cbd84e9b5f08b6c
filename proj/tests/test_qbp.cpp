#include <cmath>
#include <random>

#include "doctest.h"
#include "gibbsbp/metrics.hpp"
#include "gibbsbp/qbp.hpp"
#include "gibbsbp/trotter.hpp"
#include "test_support.hpp"

using namespace gibbsbp;
using namespace gibbsbp::testing;

namespace {

// Heisenberg bonds plus non-commuting single-site fields, which break the
// SU(2) symmetry that otherwise pins every message to zero.
SpinChainModel fielded_chain(std::size_t n, double beta) {
  const ComplexMatrix i2 = ComplexMatrix::identity(2);
  std::vector<BondTerm> terms;
  for (std::size_t k = 0; k < n - 1; ++k) {
    ComplexMatrix e = heisenberg_term();
    e += kron(pauli_z(), i2) * cplx(0.7 + 0.1 * k);
    e += kron(i2, pauli_x()) * cplx(0.4);
    terms.push_back({k, e});
  }
  return SpinChainModel(n, std::move(terms), beta);
}

ComplexMatrix incoming(const QbpMessageSet& msgs, std::size_t site, std::size_t exclude) {
  ComplexMatrix sum(2);
  for (std::size_t k : {site - 1, site + 1}) {
    if (k >= msgs.n_sites() || k == exclude) continue;
    sum += msgs.at(k, site);
  }
  return sum;
}

ComplexMatrix reference_update(const SpinChainModel& model, const QbpMessageSet& msgs,
                               std::size_t from, std::size_t to) {
  const std::size_t left = std::min(from, to);
  const ComplexMatrix i2 = ComplexMatrix::identity(2);
  const ComplexMatrix m_to = incoming(msgs, to, from);
  const ComplexMatrix m_from = incoming(msgs, from, to);
  ComplexMatrix op = model.term(left).energy * cplx(-model.beta());
  if (to < from) {
    op += kron(m_to, i2) + kron(i2, m_from);
  } else {
    op += kron(m_from, i2) + kron(i2, m_to);
  }
  const std::size_t dims[] = {2, 2};
  const std::size_t keep[] = {to < from ? std::size_t{0} : std::size_t{1}};
  const ComplexMatrix reduced = partial_trace(mat_exp(op), dims, keep);
  return gauge_fix(mat_log(reduced) - m_to);
}

}  // namespace

TEST_CASE("message set layout") {
  for (auto [n, count] : {std::pair<std::size_t, std::size_t>{3, 4}, {2, 2}, {10, 18}}) {
    const QbpMessageSet msgs = qbp_init(heisenberg_chain(n, 1.0));
    CHECK(msgs.size() == count);
    for (std::size_t k = 0; k < msgs.size(); ++k) CHECK(max_abs(msgs[k]) == 0.0);
  }
  const QbpMessageSet msgs(4);
  CHECK(msgs.edges()[0] == DirectedEdge{0, 1});
  CHECK(msgs.edges()[1] == DirectedEdge{1, 0});
  CHECK(msgs.edges()[5] == DirectedEdge{3, 2});
  CHECK_THROWS_AS(msgs.at(0, 2), NotAnEdge);
  CHECK_THROWS_AS(msgs.at(1, 1), NotAnEdge);
  CHECK_THROWS_AS(msgs.at(3, 4), NotAnEdge);
}

TEST_CASE("gauge_fix gives the traceless Hermitian part") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const ComplexMatrix m = random_complex(2, rng);
    const ComplexMatrix g = gauge_fix(m);
    CHECK(std::abs(trace(g)) < 1e-15);
    CHECK(is_hermitian(g));
    CHECK(max_abs_diff(gauge_fix(g), g) < 1e-15);
    CHECK(max_abs_diff(gauge_fix(m + ComplexMatrix::identity(2) * cplx(3.0)), g) < 1e-14);
  }
}

TEST_CASE("edge update matches the explicit formula on random messages") {
  std::mt19937_64 rng(12);
  const SpinChainModel model = fielded_chain(4, 0.9);
  QbpMessageSet msgs(4);
  for (std::size_t k = 0; k < msgs.size(); ++k) msgs[k] = gauge_fix(random_hermitian(2, rng, 0.5));
  for (const DirectedEdge& e : msgs.edges()) {
    const ComplexMatrix got = qbp_update_edge(model, msgs, e.from, e.to);
    CHECK(max_abs_diff(got, reference_update(model, msgs, e.from, e.to)) < 1e-12);
    CHECK(std::abs(trace(got)) < 1e-13);
  }
}

TEST_CASE("beta = 0 converges in one sweep to maximally mixed beliefs") {
  const QbpResult r = qbp_run(heisenberg_chain(3, 0.0));
  CHECK(r.converged);
  CHECK(r.iterations == 1);
  CHECK(r.residual < 1e-14);
  for (const auto& q : r.beliefs_single) CHECK(max_abs_diff(q, ComplexMatrix::identity(2) * cplx(0.5)) < 1e-14);
  for (const auto& q : r.beliefs_pair) CHECK(max_abs_diff(q, ComplexMatrix::identity(4) * cplx(0.25)) < 1e-14);
}

TEST_CASE("two sites are exact for every beta") {
  const std::size_t both[] = {0, 1};
  for (double beta = 0.0; beta <= 5.0; beta += 0.5) {
    for (const SpinChainModel& model : {heisenberg_chain(2, beta), fielded_chain(2, beta)}) {
      const QbpResult r = qbp_run(model);
      const ComplexMatrix exact = exact_gibbs(model);
      CHECK(max_abs_diff(qbp_reduced(r, both), exact) < 1e-10);
      const std::size_t first[] = {0};
      CHECK(max_abs_diff(qbp_reduced(r, first), partial_trace(exact, qubit_dims(2), first)) < 1e-10);
    }
  }
}

TEST_CASE("Heisenberg chains sit at the zero-message fixed point") {
  for (double beta : {0.2, 1.0, 2.0}) {
    const SpinChainModel model = heisenberg_chain(3, beta);
    const QbpResult r = qbp_run(model);
    CHECK(r.converged);
    CHECK(r.residual < 1e-10);
    for (std::size_t k = 0; k < r.messages.size(); ++k) CHECK(max_abs(r.messages[k]) < 1e-10);
    const ComplexMatrix local = exp_normalized(model.term(0).energy * cplx(-beta));
    CHECK(max_abs_diff(r.beliefs_pair[0], local) < 1e-10);
  }
}

TEST_CASE("frozen three-site fidelity at beta = 1") {
  const SpinChainModel model = heisenberg_chain(3, 1.0);
  const std::size_t keep[] = {0, 1};
  const ComplexMatrix exact = partial_trace(exact_gibbs(model), qubit_dims(3), keep);
  const double f_qbp = fidelity(qbp_reduced(qbp_run(model), keep), exact);
  CHECK(f_qbp == doctest::Approx(0.953014481585024).epsilon(1e-9));
  const double f_st = fidelity(st_reduced(TrotterPlan(model, 20), keep), exact);
  CHECK(f_qbp < f_st);
}

TEST_CASE("fielded chains have nontrivial messages and consistent beliefs") {
  const QbpOptions opts;
  for (std::size_t n : {3u, 4u, 5u}) {
    const SpinChainModel model = fielded_chain(n, 1.0);
    const QbpResult r = qbp_run(model, opts);
    CHECK(r.converged);
    double largest = 0.0;
    for (std::size_t k = 0; k < r.messages.size(); ++k) largest = std::max(largest, max_abs(r.messages[k]));
    CHECK(largest > 1e-3);
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const std::size_t dims[] = {2, 2};
      const std::size_t left[] = {0}, right[] = {1};
      CHECK(max_abs_diff(partial_trace(r.beliefs_pair[k], dims, left), r.beliefs_single[k]) < 10 * opts.tol);
      CHECK(max_abs_diff(partial_trace(r.beliefs_pair[k], dims, right), r.beliefs_single[k + 1]) < 10 * opts.tol);
    }
    for (const auto& q : r.beliefs_pair) CHECK_NOTHROW(require_density_matrix(q, "pair belief"));
  }
}

TEST_CASE("runs are deterministic") {
  const SpinChainModel model = fielded_chain(5, 1.5);
  const QbpResult a = qbp_run(model);
  const QbpResult b = qbp_run(model);
  CHECK(a.iterations == b.iterations);
  CHECK(a.residual == b.residual);
  for (std::size_t k = 0; k < a.beliefs_pair.size(); ++k) CHECK(a.beliefs_pair[k] == b.beliefs_pair[k]);
}

TEST_CASE("non-convergence is reported with the final state") {
  QbpOptions opts;
  opts.max_iters = 1;
  try {
    qbp_run(fielded_chain(4, 1.0), opts);
    FAIL("expected NotConverged");
  } catch (const NotConverged& e) {
    CHECK(std::string(e.kind()) == "not_converged");
    CHECK(e.result().iterations == 1);
    CHECK_FALSE(e.result().converged);
    CHECK(e.residual() > opts.tol);
    CHECK(e.result().beliefs_single.size() == 4);
  }
}

TEST_CASE("option and keep-set validation") {
  const SpinChainModel model = heisenberg_chain(3, 1.0);
  QbpOptions bad;
  bad.damping = 0.0;
  CHECK_THROWS_AS(qbp_run(model, bad), InvalidArgument);
  bad = {};
  bad.tol = -1.0;
  CHECK_THROWS_AS(qbp_run(model, bad), InvalidArgument);
  bad = {};
  bad.max_iters = 0;
  CHECK_THROWS_AS(qbp_run(model, bad), InvalidArgument);

  const QbpResult r = qbp_run(model);
  const std::size_t far[] = {0, 2}, three[] = {0, 1, 2}, out[] = {3}, pair[] = {2, 1};
  CHECK_THROWS_AS(qbp_reduced(r, far), InvalidArgument);
  CHECK_THROWS_AS(qbp_reduced(r, three), InvalidArgument);
  CHECK_THROWS_AS(qbp_reduced(r, out), InvalidArgument);
  CHECK(qbp_reduced(r, pair) == r.beliefs_pair[1]);
}

TEST_CASE("operation counts per sweep") {
  CHECK(qbp_opcount(3) == 112);
  CHECK(qbp_opcount(5) == 240);
  CHECK(qbp_opcount(2) == 48);
  CHECK_THROWS_AS(qbp_opcount(1), InvalidArgument);
}
