#pragma once

// Quantum belief propagation on an open spin chain. Messages are 2x2
// Hermitian operators in the log domain; adding c*I to a message only
// rescales a belief's normalization, so every message is kept traceless.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gibbsbp/densemat.hpp"
#include "gibbsbp/errors.hpp"
#include "gibbsbp/spinmodel.hpp"

namespace gibbsbp {

struct DirectedEdge {
  std::size_t from = 0;
  std::size_t to = 0;
  friend bool operator==(const DirectedEdge&, const DirectedEdge&) = default;
};

class QbpMessageSet {
 public:
  // Zero message on each of the 2(n-1) directed nearest-neighbor edges.
  explicit QbpMessageSet(std::size_t n_sites);

  std::size_t n_sites() const noexcept { return n_sites_; }
  std::size_t size() const noexcept { return messages_.size(); }
  const std::vector<DirectedEdge>& edges() const noexcept { return edges_; }

  // Message m_{from -> to}. Throws NotAnEdge for non-neighbors.
  const ComplexMatrix& at(std::size_t from, std::size_t to) const;
  ComplexMatrix& at(std::size_t from, std::size_t to);
  const ComplexMatrix& operator[](std::size_t k) const { return messages_[k]; }
  ComplexMatrix& operator[](std::size_t k) { return messages_[k]; }

 private:
  std::size_t index(std::size_t from, std::size_t to) const;

  std::size_t n_sites_;
  std::vector<DirectedEdge> edges_;
  std::vector<ComplexMatrix> messages_;
};

struct QbpOptions {
  std::size_t max_iters = 500;
  double tol = 1e-10;
  double damping = 0.5;  // new = (1 - damping) * old + damping * update
};

struct QbpResult {
  std::vector<ComplexMatrix> beliefs_single;  // Q_i, 2x2
  std::vector<ComplexMatrix> beliefs_pair;    // Q_{k,k+1}, 4x4, indexed by bond
  QbpMessageSet messages{1};
  std::size_t iterations = 0;
  bool converged = false;
  double residual = 0.0;
};

class NotConverged : public Error {
 public:
  NotConverged(const std::string& what, QbpResult result)
      : Error(what), result_(std::move(result)) {}
  const char* kind() const noexcept override { return "not_converged"; }
  const QbpResult& result() const noexcept { return result_; }
  double residual() const noexcept { return result_.residual; }

 private:
  QbpResult result_;
};

// All messages start at the identity, which gauges to the zero matrix.
QbpMessageSet qbp_init(const SpinChainModel& model);

// Traceless Hermitian representative: (m + m^dagger)/2 - tr(m)/d * I.
ComplexMatrix gauge_fix(const ComplexMatrix& m);

// New m_{from -> to} from the current messages, gauge-fixed:
//   -sum_{k in N(to)\from} m_{k->to}
//   + log tr_{from} exp(-beta E + sum_{k in N(to)\from} m_{k->to} (x) I
//                                + I (x) sum_{l in N(from)\to} m_{l->from})
// with the tensor factors placed in chain order.
ComplexMatrix qbp_update_edge(const SpinChainModel& model, const QbpMessageSet& messages,
                              std::size_t from, std::size_t to);

// Q_i = exp(sum_k m_{k->i}) / Z_i.
ComplexMatrix qbp_belief_single(const SpinChainModel& model, const QbpMessageSet& messages,
                                std::size_t site);
// Q_{k,k+1} = exp(-beta E_k + incoming messages on either side) / Z.
ComplexMatrix qbp_belief_pair(const SpinChainModel& model, const QbpMessageSet& messages,
                              std::size_t left);

// Synchronous damped sweeps until the largest Frobenius change of any message
// drops below tol. Throws NotConverged (carrying the final state) when
// max_iters is exhausted.
QbpResult qbp_run(const SpinChainModel& model, const QbpOptions& options = {});

// Q_i for a single kept site or Q_{k,k+1} for an adjacent pair; any other
// keep set raises InvalidArgument.
ComplexMatrix qbp_reduced(const QbpResult& result, std::span<const std::size_t> keep);

// 16(4n - 5) operations per sweep; requires n >= 2.
std::uint64_t qbp_opcount(std::uint64_t n_sites);

}  // namespace gibbsbp
