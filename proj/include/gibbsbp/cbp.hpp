#pragma once

// Sum-product belief propagation on trees of discrete variables, plus a
// brute-force marginalization oracle.
//
// Potentials may be signed. On a tree the sum-product recursion is an exact
// contraction regardless of sign, so beliefs are then quasi-marginals.
// Messages are kept normalized to unit absolute sum; each carries the log of
// the factor removed so far, which is enough to recover the partition sum.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "gibbsbp/densemat.hpp"

namespace gibbsbp::cbp {

struct FactorEdge {
  std::size_t a = 0;
  std::size_t b = 0;
  RealMatrix potential;  // card(a) x card(b)
};

class FactorChain {
 public:
  // Empty `locals` means all-ones local potentials.
  FactorChain(std::vector<std::size_t> cardinalities, std::vector<FactorEdge> edges,
              std::vector<std::vector<double>> locals = {});

  std::size_t n_vars() const noexcept { return cards_.size(); }
  std::size_t cardinality(std::size_t i) const { return cards_.at(i); }
  const std::vector<FactorEdge>& edges() const noexcept { return edges_; }
  const std::vector<double>& local(std::size_t i) const { return locals_.at(i); }

  struct Incidence {
    std::size_t neighbor;
    std::size_t edge;
  };
  const std::vector<Incidence>& neighbors(std::size_t i) const { return adj_.at(i); }

  std::optional<std::size_t> find_edge(std::size_t i, std::size_t j) const;

  // Potential value with the sender's state first, whichever way the edge is
  // stored.
  double potential(std::size_t edge, std::size_t from, std::size_t x_from,
                   std::size_t x_to) const;

  bool is_tree() const;

 private:
  std::vector<std::size_t> cards_;
  std::vector<FactorEdge> edges_;
  std::vector<std::vector<double>> locals_;
  std::vector<std::vector<Incidence>> adj_;
};

struct Message {
  std::vector<double> values;  // unit absolute sum
  double log_scale = 0.0;      // unnormalized message = exp(log_scale) * values
};

class MessageTable {
 public:
  const Message& at(std::size_t from, std::size_t to) const;
  bool contains(std::size_t from, std::size_t to) const;
  void set(std::size_t from, std::size_t to, Message m);
  std::size_t size() const noexcept { return table_.size(); }

 private:
  std::map<std::pair<std::size_t, std::size_t>, Message> table_;
};

// One sum-product update: out(y) = sum_x weights(x) * psi(x, y), normalized to
// unit absolute sum. `weights` is the sender's local potential times its
// other incoming messages; `weights_log_scale` is the log factor they carry.
// Throws DomainError if the result vanishes identically.
Message send_message(std::span<const double> weights, double weights_log_scale,
                     const RealMatrix& psi);

// Leaf-to-root then root-to-leaf (root = variable 0). Throws NotATree.
MessageTable run_bp(const FactorChain& chain);

std::vector<double> belief_single(const FactorChain& chain,
                                  const MessageTable& messages, std::size_t i);

// Rows index x_i, columns x_j. Throws NotAnEdge.
RealMatrix belief_pair(const FactorChain& chain, const MessageTable& messages,
                       std::size_t i, std::size_t j);

struct SignedLog {
  double log_abs = 0.0;
  int sign = 1;
};

// Partition sum Z recovered from converged messages at variable 0.
SignedLog log_partition(const FactorChain& chain, const MessageTable& messages);

struct Marginal {
  std::vector<std::size_t> vars;
  std::vector<std::size_t> dims;
  std::vector<double> values;  // row-major over `vars` in the given order

  double at(std::span<const std::size_t> states) const;
};

inline constexpr std::size_t kBruteForceStateLimit = std::size_t{1} << 24;

// Exact marginal by enumeration of every joint state, normalized by the
// (signed) partition sum. Works on any graph. Throws StateSpaceTooLarge.
Marginal brute_marginal(const FactorChain& chain, std::span<const std::size_t> target);

}  // namespace gibbsbp::cbp
