#include "gaussbp/bp.hpp"

#include <algorithm>
#include <deque>
#include <limits>

#include "gaussbp/csv.hpp"
#include "gaussbp/error.hpp"
#include "gaussbp/parallel.hpp"

namespace gaussbp {

namespace {

// Running product of messages; rescales when the peak drifts towards
// underflow so that high-degree variables stay representable.
class ProductAccumulator {
 public:
  explicit ProductAccumulator(const Grid& grid) : grid_(grid), acc_(grid.size(), 1.0) {}

  void multiply(const DiscreteDist& m) {
    double peak = 0.0;
    for (std::size_t i = 0; i < acc_.size(); ++i) {
      acc_[i] *= m[i];
      peak = std::max(peak, acc_[i]);
    }
    if (peak > 0.0 && peak < 1e-150) {
      for (double& x : acc_) x /= peak;
    }
  }

  DiscreteDist finish() && { return normalize(DiscreteDist(grid_, std::move(acc_))); }

 private:
  Grid grid_;
  std::vector<double> acc_;
};

EdgeId other_edge(const FactorGraph& g, FactorId f, EdgeId e) {
  const auto edges = g.edges_of_factor(f);
  return edges[0] == e ? edges[1] : edges[0];
}

// Product over v's incoming factor messages, skipping edge `skip`.
DiscreteDist incoming_product(const FactorGraph& g, VariableId v, std::optional<EdgeId> skip,
                              const MessageStore& store) {
  ProductAccumulator acc(g.grid());
  for (EdgeId e : g.edges_of_variable(v)) {
    if (skip && e == *skip) continue;
    acc.multiply(store.to_variable(e));
  }
  return std::move(acc).finish();
}

// Message leaving binary factor f along edge `out`, given the message that
// entered it from the opposite side.
DiscreteDist marginalize_binary(const FactorGraph& g, FactorId f, EdgeId out, const DiscreteDist& incoming,
                                const Kernel* reflected = nullptr) {
  const BinaryFactor& bf = g.factor(f).binary();
  if (g.edge(out).variable == bf.b) return convolve(incoming, bf.kernel);
  return convolve(incoming, reflected ? *reflected : bf.kernel.reflected());
}

template <typename Fn>
auto with_edge_context(const FactorGraph& g, EdgeId e, bool to_variable, Fn&& fn) {
  try {
    return fn();
  } catch (const ZeroMass& z) {
    if (z.edge()) throw;
    throw ZeroMass(z.what(), ZeroMass::Edge{g.edge(e).factor, g.edge(e).variable, to_variable});
  }
}

IterationTrace make_trace(std::size_t t, const BeliefSet& current, const BeliefSet* previous, bool record,
                          std::size_t threads) {
  IterationTrace it;
  it.iteration = t;
  if (previous) {
    for (std::size_t v = 0; v < current.size(); ++v) {
      it.max_belief_change = std::max(it.max_belief_change, linf_distance(current[v], (*previous)[v]));
    }
  }
  if (record) {
    it.summaries.resize(current.size());
    detail::parallel_for(current.size(), threads, [&](std::size_t v) { it.summaries[v] = summarize(current[v]); });
  }
  return it;
}

}  // namespace

MessageStore::MessageStore(const FactorGraph& g) {
  const auto uniform = DiscreteDist::uniform(g.grid());
  to_factor_.assign(g.num_edges(), uniform);
  to_variable_.reserve(g.num_edges());
  for (EdgeId e = 0; e < g.num_edges(); ++e) {
    const Factor& f = g.factor(g.edge(e).factor);
    to_variable_.push_back(f.is_unary() ? f.unary().potential : uniform);
  }
}

DiscreteDist var_to_factor(const FactorGraph& g, VariableId v, FactorId a, const MessageStore& store) {
  const EdgeId skip = g.edge_between(a, v);
  return with_edge_context(g, skip, false, [&] { return incoming_product(g, v, skip, store); });
}

DiscreteDist factor_to_var(const FactorGraph& g, FactorId a, VariableId v, const MessageStore& store) {
  const EdgeId out = g.edge_between(a, v);
  const Factor& f = g.factor(a);
  if (f.is_unary()) return f.unary().potential;
  const EdgeId in = other_edge(g, a, out);
  const DiscreteDist incoming = var_to_factor(g, g.edge(in).variable, a, store);
  return with_edge_context(g, out, true, [&] { return marginalize_binary(g, a, out, incoming); });
}

DiscreteDist belief(const FactorGraph& g, VariableId v, const MessageStore& store) {
  return incoming_product(g, v, std::nullopt, store);
}

BeliefSet beliefs(const FactorGraph& g, const MessageStore& store) {
  BeliefSet out;
  out.reserve(g.num_variables());
  for (VariableId v = 0; v < g.num_variables(); ++v) out.push_back(belief(g, v, store));
  return out;
}

BpResult run_sync(const FactorGraph& g, const BpOptions& options) {
  if (options.iterations < 1) throw std::invalid_argument("run_sync: iterations must be >= 1");
  if (options.damping < 0.0 || options.damping >= 1.0) throw std::invalid_argument("run_sync: damping must be in [0, 1)");

  std::vector<Kernel> reflected;
  reflected.reserve(g.num_factors());
  for (const Factor& f : g.factors()) reflected.push_back(f.is_unary() ? Kernel::delta(0) : f.binary().kernel.reflected());

  MessageStore prev(g);
  MessageStore next(g);
  const std::size_t threads = options.threads;

  auto compute_beliefs = [&](const MessageStore& store) {
    BeliefSet out(g.num_variables(), DiscreteDist::uniform(g.grid()));
    detail::parallel_for(g.num_variables(), threads, [&](std::size_t v) {
      out[v] = with_edge_context(g, g.edges_of_variable(v).empty() ? 0 : g.edges_of_variable(v)[0], true,
                                 [&] { return belief(g, v, store); });
    });
    return out;
  };

  BpResult result{compute_beliefs(prev), {}, MessageStore(g)};
  result.trace.iterations.push_back(make_trace(0, result.beliefs, nullptr, options.record_summaries, threads));
  if (options.on_iteration) options.on_iteration(0, result.beliefs);

  for (std::size_t t = 1; t <= options.iterations; ++t) {
    // Variable -> factor, from the previous factor -> variable buffer.
    detail::parallel_for(g.num_edges(), threads, [&](std::size_t e) {
      const Edge& edge = g.edge(e);
      if (g.factor(edge.factor).is_unary()) return;
      next.set_to_factor(e, with_edge_context(g, e, false, [&] { return incoming_product(g, edge.variable, e, prev); }));
    });
    // Factor -> variable, from the variable -> factor messages just formed.
    detail::parallel_for(g.num_edges(), threads, [&](std::size_t e) {
      const Edge& edge = g.edge(e);
      const Factor& f = g.factor(edge.factor);
      if (f.is_unary()) return;
      const EdgeId in = other_edge(g, edge.factor, e);
      DiscreteDist msg = with_edge_context(g, e, true, [&] {
        return marginalize_binary(g, edge.factor, e, next.to_factor(in), &reflected[edge.factor]);
      });
      if (options.damping > 0.0) {
        const DiscreteDist& old = prev.to_variable(e);
        std::vector<double> mixed(msg.size());
        for (std::size_t i = 0; i < mixed.size(); ++i) {
          mixed[i] = (1.0 - options.damping) * msg[i] + options.damping * old[i];
        }
        msg = normalize(DiscreteDist(g.grid(), std::move(mixed)));
      }
      next.set_to_variable(e, std::move(msg));
    });
    std::swap(prev, next);

    BeliefSet current = compute_beliefs(prev);
    result.trace.iterations.push_back(make_trace(t, current, &result.beliefs, options.record_summaries, threads));
    result.beliefs = std::move(current);
    if (options.on_iteration) options.on_iteration(t, result.beliefs);
  }
  result.messages = std::move(prev);
  return result;
}

BpResult run_sync(const FactorGraph& g, std::size_t iterations) {
  BpOptions options;
  options.iterations = iterations;
  return run_sync(g, options);
}

BeliefSet run_tree_exact(const FactorGraph& g) {
  if (!g.is_forest()) throw NotATree("run_tree_exact: graph contains a cycle");

  constexpr auto kNone = std::numeric_limits<std::size_t>::max();
  std::vector<FactorId> parent_factor(g.num_variables(), kNone);
  std::vector<bool> seen(g.num_variables(), false);
  std::vector<VariableId> order;  // breadth-first, roots first
  order.reserve(g.num_variables());

  for (VariableId root = 0; root < g.num_variables(); ++root) {
    if (seen[root]) continue;
    seen[root] = true;
    std::deque<VariableId> queue{root};
    while (!queue.empty()) {
      const VariableId v = queue.front();
      queue.pop_front();
      order.push_back(v);
      for (EdgeId e : g.edges_of_variable(v)) {
        const FactorId f = g.edge(e).factor;
        if (g.factor(f).is_unary() || f == parent_factor[v]) continue;
        const VariableId u = g.edge(other_edge(g, f, e)).variable;
        if (seen[u]) continue;
        seen[u] = true;
        parent_factor[u] = f;
        queue.push_back(u);
      }
    }
  }

  MessageStore store(g);
  auto send = [&](VariableId from, FactorId f) {
    const EdgeId in = g.edge_between(f, from);
    const EdgeId out = other_edge(g, f, in);
    DiscreteDist msg = var_to_factor(g, from, f, store);
    DiscreteDist outgoing = with_edge_context(g, out, true, [&] { return marginalize_binary(g, f, out, msg); });
    store.set_to_factor(in, std::move(msg));
    store.set_to_variable(out, std::move(outgoing));
  };

  // Leaves to roots.
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (parent_factor[*it] != kNone) send(*it, parent_factor[*it]);
  }
  // Roots to leaves.
  for (VariableId v : order) {
    for (EdgeId e : g.edges_of_variable(v)) {
      const FactorId f = g.edge(e).factor;
      if (g.factor(f).is_unary() || f == parent_factor[v]) continue;
      send(v, f);
    }
  }
  return beliefs(g, store);
}

std::optional<std::size_t> convergence_check(const BpTrace& trace, double tol) {
  if (!(tol > 0.0)) return std::nullopt;
  for (const IterationTrace& it : trace.iterations) {
    if (it.iteration >= 1 && it.max_belief_change < tol) return it.iteration;
  }
  return std::nullopt;
}

void write_trace_csv(std::ostream& out, const BpTrace& trace) {
  CsvWriter csv(out);
  csv.header({"iteration", "variable", "mu", "var", "skew", "exkurt", "eps", "kl_gauss"});
  for (const IterationTrace& it : trace.iterations) {
    for (std::size_t v = 0; v < it.summaries.size(); ++v) {
      const CumulantSummary& s = it.summaries[v];
      csv << it.iteration << v << s.mu << s.var << s.skew << s.exkurt << s.eps << s.kl_gauss;
      csv.end_row();
    }
  }
}

}  // namespace gaussbp
