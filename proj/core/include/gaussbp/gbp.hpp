#pragma once

#include <functional>
#include <ostream>
#include <vector>

#include "gaussbp/distribution.hpp"
#include "gaussbp/factor_graph.hpp"

namespace gaussbp {

/// Scalar Gaussian message in information form: precision lambda = 1/var
/// and information eta = mean/var. lambda == 0 is the vague (uniform)
/// message, with eta == 0.
class GaussianMsg {
 public:
  GaussianMsg() = default;

  static GaussianMsg vague() { return {}; }
  /// Throws std::invalid_argument unless var > 0 and both are finite.
  static GaussianMsg from_moments(double mean, double var);
  /// Throws std::invalid_argument for negative precision, or eta != 0 with
  /// zero precision.
  static GaussianMsg from_information(double eta, double lambda);

  double precision() const noexcept { return lambda_; }
  double information() const noexcept { return eta_; }
  bool is_vague() const noexcept { return lambda_ == 0.0; }

  /// Throws AllVague for the vague message.
  double mean() const;
  /// +infinity for the vague message.
  double var() const noexcept;

  /// Product of densities: precisions and informations add.
  friend GaussianMsg operator*(const GaussianMsg& a, const GaussianMsg& b) {
    return from_information(a.eta_ + b.eta_, a.lambda_ + b.lambda_);
  }

  friend bool operator==(const GaussianMsg&, const GaussianMsg&) = default;

 private:
  double eta_ = 0.0;
  double lambda_ = 0.0;
};

/// Moment matching. Throws DegenerateVariance for a point mass.
GaussianMsg gaussian_project(const DiscreteDist& d);

/// Mode matching: a log-parabola through the modal bin and its neighbours
/// gives the mean and variance. Falls back to the moment variance at the
/// mode when the mode sits on the grid edge or the log-mass is not locally
/// concave. Throws DegenerateVariance for a point mass.
GaussianMsg laplace_project(const DiscreteDist& d);

enum class Projection { Moment, Laplace };

/// (mean, variance) of a kernel's offset, in state units.
struct KernelMoments {
  double mean = 0.0;
  double var = 0.0;
};

/// A FactorGraph with every unary potential moment-projected to a
/// GaussianMsg and every kernel projected to (mean, var). The topology is
/// borrowed from the source graph, which must outlive this object.
class GaussianGraph {
 public:
  explicit GaussianGraph(const FactorGraph& g, Projection projection = Projection::Moment);

  const FactorGraph& topology() const noexcept { return *graph_; }
  const GaussianMsg& prior(FactorId f) const { return priors_.at(f); }
  const KernelMoments& kernel(FactorId f) const { return kernels_.at(f); }

 private:
  const FactorGraph* graph_;
  std::vector<GaussianMsg> priors_;     // indexed by factor id; vague for binary
  std::vector<KernelMoments> kernels_;  // indexed by factor id; zero for unary
};

/// Gaussian counterpart of MessageStore; all messages start vague except
/// unary factor-to-variable messages, which hold the projected prior.
class GaussianMessageStore {
 public:
  explicit GaussianMessageStore(const GaussianGraph& g);

  const GaussianMsg& to_factor(EdgeId e) const { return to_factor_.at(e); }
  const GaussianMsg& to_variable(EdgeId e) const { return to_variable_.at(e); }
  void set_to_factor(EdgeId e, GaussianMsg m) { to_factor_.at(e) = m; }
  void set_to_variable(EdgeId e, GaussianMsg m) { to_variable_.at(e) = m; }

 private:
  std::vector<GaussianMsg> to_factor_;
  std::vector<GaussianMsg> to_variable_;
};

GaussianMsg gbp_var_to_factor(const GaussianGraph& g, VariableId v, FactorId a, const GaussianMessageStore& store);

/// Binary (a, b): towards b, mean + kernel mean; towards a, mean - kernel
/// mean; variance grows by the kernel variance. A vague input stays vague.
GaussianMsg gbp_factor_to_var(const GaussianGraph& g, FactorId a, VariableId v, const GaussianMessageStore& store);

GaussianMsg gbp_belief(const GaussianGraph& g, VariableId v, const GaussianMessageStore& store);

struct GbpIterationTrace {
  std::size_t iteration = 0;
  std::vector<GaussianMsg> beliefs;
};

struct GbpOptions {
  std::size_t iterations = 1;
  std::size_t threads = 1;
  Projection projection = Projection::Moment;
  bool record_trace = true;
  std::function<void(std::size_t, const std::vector<GaussianMsg>&)> on_iteration;
};

struct GbpResult {
  std::vector<GaussianMsg> beliefs;
  std::vector<GbpIterationTrace> trace;  ///< trace[0] is t = 0 when recorded
};

/// Same synchronous schedule as run_sync. Throws AllVague if any belief is
/// still vague after the final iteration.
GbpResult gbp_run_sync(const FactorGraph& g, const GbpOptions& options);
GbpResult gbp_run_sync(const FactorGraph& g, std::size_t iterations);

/// CSV: iteration,variable,mu,var,skew,exkurt,eps (shape columns are 0).
void write_gbp_trace_csv(std::ostream& out, const GbpResult& result);

}  // namespace gaussbp
