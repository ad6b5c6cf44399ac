#include "gaussbp/factor_graph.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <string>

#include "gaussbp/error.hpp"

namespace gaussbp {

namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  // False when x and y were already connected.
  bool unite(std::size_t x, std::size_t y) {
    x = find(x);
    y = find(y);
    if (x == y) return false;
    parent_[y] = x;
    return true;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

VariableId FactorGraph::add_variable() {
  const VariableId id = variables_.size();
  variables_.push_back({id, std::nullopt});
  var_edges_.emplace_back();
  return id;
}

void FactorGraph::add_variables(std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) add_variable();
}

FactorId FactorGraph::add_unary(VariableId target, DiscreteDist potential) {
  if (target >= variables_.size()) {
    throw BadPrior("prior targets nonexistent variable " + std::to_string(target));
  }
  if (!(potential.grid() == grid_)) throw GridMismatch("unary potential is on a different grid");
  const FactorId id = factors_.size();
  // Already-normalized potentials are stored untouched so that serialized
  // graphs reload bit-for-bit.
  if (std::abs(potential.total() - 1.0) > 1e-12) potential = normalize(potential);
  factors_.push_back({id, UnaryFactor{target, std::move(potential)}});
  const EdgeId e = edges_.size();
  edges_.push_back({id, target});
  factor_edges_.push_back({e});
  var_edges_[target].push_back(e);
  if (!variables_[target].prior) variables_[target].prior = id;
  ++num_unary_;
  return id;
}

FactorId FactorGraph::add_binary(VariableId a, VariableId b, Kernel kernel) {
  if (a >= variables_.size() || b >= variables_.size()) {
    throw InvalidGraph("binary factor references an unknown variable");
  }
  if (a == b) throw InvalidGraph("binary factor must connect distinct variables");
  const FactorId id = factors_.size();
  factors_.push_back({id, BinaryFactor{a, b, std::move(kernel)}});
  const EdgeId ea = edges_.size();
  edges_.push_back({id, a});
  edges_.push_back({id, b});
  factor_edges_.push_back({ea, ea + 1});
  var_edges_[a].push_back(ea);
  var_edges_[b].push_back(ea + 1);
  return id;
}

EdgeId FactorGraph::edge_between(FactorId f, VariableId v) const {
  for (EdgeId e : edges_of_factor(f)) {
    if (edges_[e].variable == v) return e;
  }
  throw InvalidGraph("variable " + std::to_string(v) + " is not adjacent to factor " + std::to_string(f));
}

void FactorGraph::validate() const {
  if (var_edges_.size() != variables_.size() || factor_edges_.size() != factors_.size()) {
    throw InvalidGraph("adjacency tables out of sync");
  }
  for (std::size_t v = 0; v < variables_.size(); ++v) {
    if (variables_[v].id != v) throw InvalidGraph("variable ids must be dense 0..n-1");
    for (EdgeId e : var_edges_[v]) {
      if (e >= edges_.size() || edges_[e].variable != v) throw InvalidGraph("variable adjacency inconsistent");
    }
  }
  std::size_t unary = 0;
  for (std::size_t f = 0; f < factors_.size(); ++f) {
    const Factor& fac = factors_[f];
    if (fac.id != f) throw InvalidGraph("factor ids must be dense 0..m-1");
    const auto& fe = factor_edges_[f];
    if (fac.is_unary()) {
      ++unary;
      const auto& u = fac.unary();
      if (fe.size() != 1 || edges_[fe[0]].variable != u.target) throw InvalidGraph("unary adjacency inconsistent");
      if (!(u.potential.grid() == grid_)) throw InvalidGraph("unary potential on foreign grid");
    } else {
      const auto& bf = fac.binary();
      if (bf.a == bf.b) throw InvalidGraph("binary factor with a == b");
      if (fe.size() != 2 || edges_[fe[0]].variable != bf.a || edges_[fe[1]].variable != bf.b) {
        throw InvalidGraph("binary adjacency inconsistent");
      }
    }
    for (EdgeId e : fe) {
      if (edges_[e].factor != f) throw InvalidGraph("factor adjacency inconsistent");
    }
  }
  if (unary != num_unary_) throw InvalidGraph("unary count out of sync");
}

bool FactorGraph::is_forest() const {
  UnionFind uf(variables_.size());
  for (const Factor& f : factors_) {
    if (f.is_unary()) continue;
    if (!uf.unite(f.binary().a, f.binary().b)) return false;
  }
  return true;
}

std::vector<std::vector<VariableId>> FactorGraph::variable_adjacency() const {
  std::vector<std::vector<VariableId>> adj(variables_.size());
  for (const Factor& f : factors_) {
    if (f.is_unary()) continue;
    adj[f.binary().a].push_back(f.binary().b);
    adj[f.binary().b].push_back(f.binary().a);
  }
  return adj;
}

std::vector<std::size_t> distance_to_nearest_prior(const FactorGraph& g) {
  constexpr auto kUnreached = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> dist(g.num_variables(), kUnreached);
  std::deque<VariableId> queue;
  for (const Factor& f : g.factors()) {
    if (!f.is_unary()) continue;
    const VariableId v = f.unary().target;
    if (dist[v] != 0) {
      dist[v] = 0;
      queue.push_back(v);
    }
  }
  const auto adj = g.variable_adjacency();
  while (!queue.empty()) {
    const VariableId v = queue.front();
    queue.pop_front();
    for (VariableId u : adj[v]) {
      if (dist[u] == kUnreached) {
        dist[u] = dist[v] + 1;
        queue.push_back(u);
      }
    }
  }
  return dist;
}

}  // namespace gaussbp
