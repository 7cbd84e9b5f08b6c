#include "gibbsbp/qbp.hpp"

#include <algorithm>
#include <string>

namespace gibbsbp {

namespace {

const ComplexMatrix kIdentity2 = ComplexMatrix::identity(2);

// Sum of messages into `site` from every neighbor except `exclude`.
ComplexMatrix incoming_except(const QbpMessageSet& messages, std::size_t site,
                              std::size_t exclude) {
  ComplexMatrix sum(2);
  if (site > 0 && site - 1 != exclude) sum += messages.at(site - 1, site);
  if (site + 1 < messages.n_sites() && site + 1 != exclude) sum += messages.at(site + 1, site);
  return sum;
}

// -beta E_k plus the environment of bond (k, k+1) seen from outside it.
ComplexMatrix bond_exponent(const SpinChainModel& model, const QbpMessageSet& messages,
                            std::size_t left) {
  const std::size_t right = left + 1;
  ComplexMatrix x = -model.beta() * model.term(left).energy;
  x += kron(incoming_except(messages, left, right), kIdentity2);
  x += kron(kIdentity2, incoming_except(messages, right, left));
  return x;
}

}  // namespace

QbpMessageSet::QbpMessageSet(std::size_t n_sites) : n_sites_(n_sites) {
  if (n_sites_ == 0) throw InvalidArgument("QbpMessageSet: need at least one site");
  for (std::size_t i = 0; i + 1 < n_sites_; ++i) {
    edges_.push_back({i, i + 1});
    edges_.push_back({i + 1, i});
  }
  messages_.assign(edges_.size(), ComplexMatrix(2));
}

std::size_t QbpMessageSet::index(std::size_t from, std::size_t to) const {
  if (from >= n_sites_ || to >= n_sites_ || (from + 1 != to && to + 1 != from)) {
    throw NotAnEdge("QbpMessageSet: no message " + std::to_string(from) + " -> " +
                    std::to_string(to));
  }
  return from < to ? 2 * from : 2 * to + 1;
}

const ComplexMatrix& QbpMessageSet::at(std::size_t from, std::size_t to) const {
  return messages_[index(from, to)];
}

ComplexMatrix& QbpMessageSet::at(std::size_t from, std::size_t to) {
  return messages_[index(from, to)];
}

QbpMessageSet qbp_init(const SpinChainModel& model) {
  QbpMessageSet set(model.n_sites());
  for (std::size_t k = 0; k < set.size(); ++k) set[k] = gauge_fix(kIdentity2);
  return set;
}

ComplexMatrix gauge_fix(const ComplexMatrix& m) {
  ComplexMatrix out = hermitian_part(m);
  const cplx shift = trace(out) / static_cast<double>(out.dim());
  for (std::size_t i = 0; i < out.dim(); ++i) out(i, i) = cplx{(out(i, i) - shift).real(), 0.0};
  return out;
}

ComplexMatrix qbp_update_edge(const SpinChainModel& model, const QbpMessageSet& messages,
                              std::size_t from, std::size_t to) {
  messages.at(from, to);  // validates the edge
  const std::size_t left = std::min(from, to);
  const std::size_t keep_site = to < from ? 0 : 1;
  const std::size_t dims[] = {2, 2};
  const std::size_t keep[] = {keep_site};

  const ComplexMatrix reduced =
      partial_trace(exp_normalized(bond_exponent(model, messages, left)), dims, keep);
  ComplexMatrix update = mat_log(hermitian_part(reduced));
  update -= incoming_except(messages, to, from);
  return gauge_fix(update);
}

ComplexMatrix qbp_belief_single(const SpinChainModel& model, const QbpMessageSet& messages,
                                std::size_t site) {
  if (site >= model.n_sites()) throw IndexOutOfRange("qbp_belief_single: site out of range");
  return exp_normalized(incoming_except(messages, site, model.n_sites()));
}

ComplexMatrix qbp_belief_pair(const SpinChainModel& model, const QbpMessageSet& messages,
                              std::size_t left) {
  if (left + 1 >= model.n_sites()) throw IndexOutOfRange("qbp_belief_pair: bond out of range");
  return exp_normalized(bond_exponent(model, messages, left));
}

QbpResult qbp_run(const SpinChainModel& model, const QbpOptions& options) {
  if (options.max_iters == 0) throw InvalidArgument("qbp_run: max_iters must be >= 1");
  if (!(options.tol > 0.0)) throw InvalidArgument("qbp_run: tol must be > 0");
  if (!(options.damping > 0.0 && options.damping <= 1.0)) {
    throw InvalidArgument("qbp_run: damping must be in (0, 1]");
  }

  QbpResult result;
  result.messages = qbp_init(model);
  QbpMessageSet& current = result.messages;
  const double alpha = options.damping;

  while (result.iterations < options.max_iters) {
    QbpMessageSet next = current;
    double residual = 0.0;
    for (std::size_t k = 0; k < current.size(); ++k) {
      const DirectedEdge e = current.edges()[k];
      const ComplexMatrix update = qbp_update_edge(model, current, e.from, e.to);
      next[k] = gauge_fix((1.0 - alpha) * current[k] + alpha * update);
      residual = std::max(residual, frobenius_norm(next[k] - current[k]));
    }
    current = std::move(next);
    ++result.iterations;
    result.residual = residual;
    if (residual < options.tol) {
      result.converged = true;
      break;
    }
  }

  for (std::size_t i = 0; i < model.n_sites(); ++i) {
    result.beliefs_single.push_back(qbp_belief_single(model, current, i));
  }
  for (std::size_t k = 0; k + 1 < model.n_sites(); ++k) {
    result.beliefs_pair.push_back(qbp_belief_pair(model, current, k));
  }
  if (!result.converged) {
    const double r = result.residual;
    throw NotConverged("qbp_run: residual " + std::to_string(r) + " after " +
                           std::to_string(result.iterations) + " sweeps",
                       std::move(result));
  }
  return result;
}

ComplexMatrix qbp_reduced(const QbpResult& result, std::span<const std::size_t> keep) {
  if (keep.size() == 1 && keep[0] < result.beliefs_single.size()) {
    return result.beliefs_single[keep[0]];
  }
  if (keep.size() == 2) {
    const std::size_t lo = std::min(keep[0], keep[1]);
    const std::size_t hi = std::max(keep[0], keep[1]);
    if (hi == lo + 1 && lo < result.beliefs_pair.size()) return result.beliefs_pair[lo];
  }
  throw InvalidArgument("qbp_reduced: QBP yields single sites and adjacent pairs only");
}

std::uint64_t qbp_opcount(std::uint64_t n_sites) {
  if (n_sites < 2) throw InvalidArgument("qbp_opcount: need at least 2 sites");
  return 16 * (4 * n_sites - 5);
}

}  // namespace gibbsbp
