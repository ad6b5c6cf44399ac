#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include "gaussbp/cumulants.hpp"
#include "gaussbp/distribution.hpp"
#include "gaussbp/factor_graph.hpp"

namespace gaussbp {

using BeliefSet = std::vector<DiscreteDist>;

/// Messages on every edge in both directions.
///
/// Initial state: variable-to-factor messages are uniform, binary
/// factor-to-variable messages are uniform, and unary factor-to-variable
/// messages hold the factor's potential (they never depend on anything).
class MessageStore {
 public:
  explicit MessageStore(const FactorGraph& g);

  const DiscreteDist& to_factor(EdgeId e) const { return to_factor_.at(e); }
  const DiscreteDist& to_variable(EdgeId e) const { return to_variable_.at(e); }

  void set_to_factor(EdgeId e, DiscreteDist m) { to_factor_.at(e) = std::move(m); }
  void set_to_variable(EdgeId e, DiscreteDist m) { to_variable_.at(e) = std::move(m); }

  std::size_t num_edges() const noexcept { return to_factor_.size(); }

  friend bool operator==(const MessageStore&, const MessageStore&) = default;

 private:
  std::vector<DiscreteDist> to_factor_;
  std::vector<DiscreteDist> to_variable_;
};

/// Product of the factor-to-variable messages into v from every factor
/// except a; uniform when a is v's only factor. Throws InvalidGraph when v
/// is not adjacent to a.
DiscreteDist var_to_factor(const FactorGraph& g, VariableId v, FactorId a, const MessageStore& store);

/// Unary: the potential. Binary (a, b) with kernel g(x_b - x_a): towards b,
/// convolve(var_to_factor(a), kernel); towards a, the reflected kernel.
DiscreteDist factor_to_var(const FactorGraph& g, FactorId a, VariableId v, const MessageStore& store);

/// Normalized product of all factor-to-variable messages into v.
DiscreteDist belief(const FactorGraph& g, VariableId v, const MessageStore& store);
BeliefSet beliefs(const FactorGraph& g, const MessageStore& store);

struct IterationTrace {
  std::size_t iteration = 0;
  double max_belief_change = 0.0;  ///< L-infinity vs. the previous iteration
  std::vector<CumulantSummary> summaries;  ///< per variable; empty if not recorded
};

/// trace.iterations[0] describes the initial beliefs (t = 0).
struct BpTrace {
  std::vector<IterationTrace> iterations;
};

struct BpOptions {
  std::size_t iterations = 1;
  /// new = (1 - damping) * update + damping * old, on binary messages.
  double damping = 0.0;
  std::size_t threads = 1;
  bool record_summaries = true;
  /// Called with (t, beliefs) for t = 0..iterations.
  std::function<void(std::size_t, const BeliefSet&)> on_iteration;
};

struct BpResult {
  BeliefSet beliefs;
  BpTrace trace;
  MessageStore messages;
};

/// Synchronous (flooding) sum-product. Iteration t reads only the
/// factor-to-variable messages of iteration t-1: it recomputes every
/// variable-to-factor message from them, then every factor-to-variable
/// message from those. Serial and threaded runs are bit-identical.
/// A vanished message throws ZeroMass naming the edge.
BpResult run_sync(const FactorGraph& g, const BpOptions& options);
BpResult run_sync(const FactorGraph& g, std::size_t iterations);

/// Leaf-to-root then root-to-leaf schedule on each tree of a forest.
/// Throws NotATree when the binary factors contain a cycle.
BeliefSet run_tree_exact(const FactorGraph& g);

/// First iteration t >= 1 whose max_belief_change is below tol, or nullopt
/// (not converged). tol <= 0 never converges.
std::optional<std::size_t> convergence_check(const BpTrace& trace, double tol);

/// CSV: iteration,variable,mu,var,skew,exkurt,eps,kl_gauss
void write_trace_csv(std::ostream& out, const BpTrace& trace);

}  // namespace gaussbp
