#include "gibbsbp/cbp.hpp"

#include <cmath>
#include <limits>
#include <queue>
#include <string>

namespace gibbsbp::cbp {

namespace {

std::string edge_name(std::size_t i, std::size_t j) {
  return "(" + std::to_string(i) + ", " + std::to_string(j) + ")";
}

// Sender weights for the message i -> exclude: local potential times every
// other incoming message.
std::pair<std::vector<double>, double> sender_weights(const FactorChain& chain,
                                                      const MessageTable& messages,
                                                      std::size_t i,
                                                      std::optional<std::size_t> exclude) {
  std::vector<double> w = chain.local(i);
  double log_scale = 0.0;
  for (const auto& inc : chain.neighbors(i)) {
    if (exclude && inc.neighbor == *exclude) continue;
    const Message& m = messages.at(inc.neighbor, i);
    for (std::size_t x = 0; x < w.size(); ++x) w[x] *= m.values[x];
    log_scale += m.log_scale;
  }
  return {std::move(w), log_scale};
}

RealMatrix oriented_potential(const FactorChain& chain, std::size_t edge,
                              std::size_t from) {
  const FactorEdge& e = chain.edges()[edge];
  return e.a == from ? e.potential : e.potential.transposed();
}

std::vector<std::size_t> bfs_order(const FactorChain& chain,
                                   std::vector<std::size_t>& parent) {
  const std::size_t n = chain.n_vars();
  constexpr auto none = std::numeric_limits<std::size_t>::max();
  parent.assign(n, none);
  std::vector<std::size_t> order;
  order.reserve(n);
  std::vector<bool> seen(n, false);
  std::queue<std::size_t> q;
  q.push(0);
  seen[0] = true;
  while (!q.empty()) {
    const std::size_t v = q.front();
    q.pop();
    order.push_back(v);
    for (const auto& inc : chain.neighbors(v)) {
      if (seen[inc.neighbor]) continue;
      seen[inc.neighbor] = true;
      parent[inc.neighbor] = v;
      q.push(inc.neighbor);
    }
  }
  return order;
}

}  // namespace

FactorChain::FactorChain(std::vector<std::size_t> cardinalities,
                         std::vector<FactorEdge> edges,
                         std::vector<std::vector<double>> locals)
    : cards_(std::move(cardinalities)), edges_(std::move(edges)), locals_(std::move(locals)) {
  const std::size_t n = cards_.size();
  if (n == 0) throw InvalidArgument("FactorChain: need at least one variable");
  for (std::size_t c : cards_) {
    if (c == 0) throw InvalidArgument("FactorChain: cardinalities must be positive");
  }
  if (locals_.empty()) {
    locals_.resize(n);
    for (std::size_t i = 0; i < n; ++i) locals_[i].assign(cards_[i], 1.0);
  }
  if (locals_.size() != n) {
    throw DimensionMismatch("FactorChain: " + std::to_string(locals_.size()) +
                            " local potentials for " + std::to_string(n) + " variables");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (locals_[i].size() != cards_[i]) {
      throw DimensionMismatch("FactorChain: local potential " + std::to_string(i) +
                              " has wrong length");
    }
    for (double x : locals_[i]) {
      if (!std::isfinite(x)) throw DomainError("FactorChain: non-finite local potential");
    }
  }
  adj_.resize(n);
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    const FactorEdge& e = edges_[k];
    if (e.a >= n || e.b >= n) {
      throw IndexOutOfRange("FactorChain: edge " + edge_name(e.a, e.b) + " out of range");
    }
    if (e.potential.rows() != cards_[e.a] || e.potential.cols() != cards_[e.b]) {
      throw DimensionMismatch("FactorChain: potential shape mismatch on edge " +
                              edge_name(e.a, e.b));
    }
    for (double x : e.potential.entries()) {
      if (!std::isfinite(x)) throw DomainError("FactorChain: non-finite pair potential");
    }
    adj_[e.a].push_back({e.b, k});
    if (e.b != e.a) adj_[e.b].push_back({e.a, k});
  }
}

std::optional<std::size_t> FactorChain::find_edge(std::size_t i, std::size_t j) const {
  if (i >= n_vars()) return std::nullopt;
  for (const auto& inc : adj_[i]) {
    if (inc.neighbor == j) return inc.edge;
  }
  return std::nullopt;
}

double FactorChain::potential(std::size_t edge, std::size_t from, std::size_t x_from,
                              std::size_t x_to) const {
  const FactorEdge& e = edges_.at(edge);
  return e.a == from ? e.potential(x_from, x_to) : e.potential(x_to, x_from);
}

bool FactorChain::is_tree() const {
  const std::size_t n = n_vars();
  if (edges_.size() != n - 1) return false;
  std::vector<std::size_t> parent;
  return bfs_order(*this, parent).size() == n;
}

const Message& MessageTable::at(std::size_t from, std::size_t to) const {
  const auto it = table_.find({from, to});
  if (it == table_.end()) {
    throw NotAnEdge("MessageTable: no message " + edge_name(from, to));
  }
  return it->second;
}

bool MessageTable::contains(std::size_t from, std::size_t to) const {
  return table_.contains({from, to});
}

void MessageTable::set(std::size_t from, std::size_t to, Message m) {
  table_[{from, to}] = std::move(m);
}

Message send_message(std::span<const double> weights, double weights_log_scale,
                     const RealMatrix& psi) {
  if (weights.size() != psi.rows()) {
    throw DimensionMismatch("send_message: weight length does not match potential rows");
  }
  Message out;
  out.values.assign(psi.cols(), 0.0);
  for (std::size_t x = 0; x < psi.rows(); ++x) {
    const double w = weights[x];
    if (w == 0.0) continue;
    for (std::size_t y = 0; y < psi.cols(); ++y) out.values[y] += w * psi(x, y);
  }
  double norm = 0.0;
  for (double v : out.values) norm += std::abs(v);
  if (norm == 0.0 || !std::isfinite(norm)) {
    throw DomainError("send_message: message vanished or overflowed");
  }
  for (double& v : out.values) v /= norm;
  out.log_scale = weights_log_scale + std::log(norm);
  return out;
}

MessageTable run_bp(const FactorChain& chain) {
  if (!chain.is_tree()) {
    throw NotATree("run_bp: " + std::to_string(chain.edges().size()) + " edges on " +
                   std::to_string(chain.n_vars()) + " variables do not form a tree");
  }
  std::vector<std::size_t> parent;
  const std::vector<std::size_t> order = bfs_order(chain, parent);
  MessageTable messages;

  auto send = [&](std::size_t from, std::size_t to) {
    const std::size_t edge = *chain.find_edge(from, to);
    auto [w, ls] = sender_weights(chain, messages, from, to);
    messages.set(from, to, send_message(w, ls, oriented_potential(chain, edge, from)));
  };

  // Leaves first: reverse BFS order guarantees children have sent.
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (*it != 0) send(*it, parent[*it]);
  }
  for (std::size_t v : order) {
    for (const auto& inc : chain.neighbors(v)) {
      if (inc.neighbor != parent[v]) send(v, inc.neighbor);
    }
  }
  return messages;
}

std::vector<double> belief_single(const FactorChain& chain, const MessageTable& messages,
                                  std::size_t i) {
  if (i >= chain.n_vars()) throw IndexOutOfRange("belief_single: variable out of range");
  auto [b, ls] = sender_weights(chain, messages, i, std::nullopt);
  double z = 0.0;
  for (double x : b) z += x;
  if (z == 0.0) throw DomainError("belief_single: belief sums to zero");
  for (double& x : b) x /= z;
  return b;
}

RealMatrix belief_pair(const FactorChain& chain, const MessageTable& messages,
                       std::size_t i, std::size_t j) {
  const auto edge = chain.find_edge(i, j);
  if (!edge || i == j) throw NotAnEdge("belief_pair: " + edge_name(i, j) + " is not an edge");
  const auto [wi, lsi] = sender_weights(chain, messages, i, j);
  const auto [wj, lsj] = sender_weights(chain, messages, j, i);
  RealMatrix b(chain.cardinality(i), chain.cardinality(j));
  double z = 0.0;
  for (std::size_t xi = 0; xi < wi.size(); ++xi) {
    for (std::size_t xj = 0; xj < wj.size(); ++xj) {
      b(xi, xj) = chain.potential(*edge, i, xi, xj) * wi[xi] * wj[xj];
      z += b(xi, xj);
    }
  }
  if (z == 0.0) throw DomainError("belief_pair: belief sums to zero");
  for (std::size_t xi = 0; xi < wi.size(); ++xi) {
    for (std::size_t xj = 0; xj < wj.size(); ++xj) b(xi, xj) /= z;
  }
  return b;
}

SignedLog log_partition(const FactorChain& chain, const MessageTable& messages) {
  const auto [w, ls] = sender_weights(chain, messages, 0, std::nullopt);
  double z = 0.0;
  for (double x : w) z += x;
  if (z == 0.0) throw DomainError("log_partition: partition sum is zero");
  return {ls + std::log(std::abs(z)), z < 0.0 ? -1 : 1};
}

double Marginal::at(std::span<const std::size_t> states) const {
  if (states.size() != dims.size()) {
    throw DimensionMismatch("Marginal::at: wrong number of states");
  }
  std::size_t idx = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    if (states[k] >= dims[k]) throw IndexOutOfRange("Marginal::at: state out of range");
    idx = idx * dims[k] + states[k];
  }
  return values[idx];
}

Marginal brute_marginal(const FactorChain& chain, std::span<const std::size_t> target) {
  const std::size_t n = chain.n_vars();
  if (target.empty()) throw InvalidArgument("brute_marginal: empty target set");
  std::vector<bool> used(n, false);
  for (std::size_t v : target) {
    if (v >= n) throw IndexOutOfRange("brute_marginal: variable out of range");
    if (used[v]) throw InvalidArgument("brute_marginal: repeated target variable");
    used[v] = true;
  }
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (total > kBruteForceStateLimit / chain.cardinality(i)) {
      throw StateSpaceTooLarge("brute_marginal: joint state space exceeds 2^24");
    }
    total *= chain.cardinality(i);
  }

  Marginal out;
  out.vars.assign(target.begin(), target.end());
  std::size_t out_size = 1;
  for (std::size_t v : target) {
    out.dims.push_back(chain.cardinality(v));
    out_size *= chain.cardinality(v);
  }
  out.values.assign(out_size, 0.0);

  std::vector<std::size_t> x(n, 0);
  double z = 0.0;
  for (std::size_t s = 0; s < total; ++s) {
    double w = 1.0;
    for (std::size_t i = 0; i < n; ++i) w *= chain.local(i)[x[i]];
    for (const FactorEdge& e : chain.edges()) w *= e.potential(x[e.a], x[e.b]);
    std::size_t idx = 0;
    for (std::size_t k = 0; k < target.size(); ++k) idx = idx * out.dims[k] + x[target[k]];
    out.values[idx] += w;
    z += w;
    // Odometer increment, last variable fastest.
    for (std::size_t i = n; i-- > 0;) {
      if (++x[i] < chain.cardinality(i)) break;
      x[i] = 0;
    }
  }
  if (z == 0.0) throw DomainError("brute_marginal: partition sum is zero");
  for (double& v : out.values) v /= z;
  return out;
}

}  // namespace gibbsbp::cbp
