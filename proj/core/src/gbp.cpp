#include "gaussbp/gbp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "gaussbp/csv.hpp"
#include "gaussbp/cumulants.hpp"
#include "gaussbp/error.hpp"
#include "gaussbp/parallel.hpp"

namespace gaussbp {

GaussianMsg GaussianMsg::from_moments(double mean, double var) {
  if (!std::isfinite(mean) || !std::isfinite(var) || !(var > 0.0)) {
    throw std::invalid_argument("GaussianMsg: need finite mean and var > 0");
  }
  GaussianMsg m;
  m.lambda_ = 1.0 / var;
  m.eta_ = mean / var;
  return m;
}

GaussianMsg GaussianMsg::from_information(double eta, double lambda) {
  if (!std::isfinite(eta) || !std::isfinite(lambda) || lambda < 0.0) {
    throw std::invalid_argument("GaussianMsg: precision must be finite and >= 0");
  }
  if (lambda == 0.0 && eta != 0.0) throw std::invalid_argument("GaussianMsg: vague message must have eta == 0");
  GaussianMsg m;
  m.lambda_ = lambda;
  m.eta_ = eta;
  return m;
}

double GaussianMsg::mean() const {
  if (is_vague()) throw AllVague("GaussianMsg: vague message has no mean");
  return eta_ / lambda_;
}

double GaussianMsg::var() const noexcept {
  return is_vague() ? std::numeric_limits<double>::infinity() : 1.0 / lambda_;
}

GaussianMsg gaussian_project(const DiscreteDist& d) {
  const CumulantSummary s = summarize(d);
  if (s.degenerate) throw DegenerateVariance("gaussian_project: point mass has no Gaussian projection");
  return GaussianMsg::from_moments(s.mu, s.var);
}

GaussianMsg laplace_project(const DiscreteDist& d) {
  const CumulantSummary s = summarize(d);
  if (s.degenerate) throw DegenerateVariance("laplace_project: point mass has no Gaussian projection");
  const auto mass = d.mass();
  const auto m = static_cast<std::size_t>(std::max_element(mass.begin(), mass.end()) - mass.begin());
  const double step = d.grid().step();
  if (m > 0 && m + 1 < mass.size() && mass[m - 1] > 0.0 && mass[m + 1] > 0.0) {
    const double lm = std::log(mass[m - 1]);
    const double l0 = std::log(mass[m]);
    const double lp = std::log(mass[m + 1]);
    const double curvature = lm - 2.0 * l0 + lp;
    if (curvature < 0.0) {
      const double offset = 0.5 * (lm - lp) / curvature;
      return GaussianMsg::from_moments(d.grid().center(m) + offset * step, -step * step / curvature);
    }
  }
  return GaussianMsg::from_moments(d.grid().center(m), s.var);
}

GaussianGraph::GaussianGraph(const FactorGraph& g, Projection projection) : graph_(&g) {
  priors_.resize(g.num_factors());
  kernels_.resize(g.num_factors());
  for (const Factor& f : g.factors()) {
    if (f.is_unary()) {
      const DiscreteDist& p = f.unary().potential;
      priors_[f.id] = projection == Projection::Moment ? gaussian_project(p) : laplace_project(p);
    } else {
      const RawCumulants k = kernel_cumulants(f.binary().kernel, g.grid().step());
      kernels_[f.id] = {k.mean(), std::max(k.variance(), 0.0)};
    }
  }
}

GaussianMessageStore::GaussianMessageStore(const GaussianGraph& g) {
  const FactorGraph& topo = g.topology();
  to_factor_.assign(topo.num_edges(), GaussianMsg::vague());
  to_variable_.assign(topo.num_edges(), GaussianMsg::vague());
  for (EdgeId e = 0; e < topo.num_edges(); ++e) {
    const FactorId f = topo.edge(e).factor;
    if (topo.factor(f).is_unary()) to_variable_[e] = g.prior(f);
  }
}

namespace {

GaussianMsg product_except(const FactorGraph& topo, VariableId v, std::optional<EdgeId> skip,
                           const GaussianMessageStore& store) {
  double eta = 0.0;
  double lambda = 0.0;
  for (EdgeId e : topo.edges_of_variable(v)) {
    if (skip && e == *skip) continue;
    eta += store.to_variable(e).information();
    lambda += store.to_variable(e).precision();
  }
  return GaussianMsg::from_information(eta, lambda);
}

GaussianMsg shift_through(const GaussianGraph& g, FactorId f, EdgeId out, const GaussianMsg& incoming) {
  if (incoming.is_vague()) return GaussianMsg::vague();
  const FactorGraph& topo = g.topology();
  const KernelMoments& k = g.kernel(f);
  const double sign = topo.edge(out).variable == topo.factor(f).binary().b ? 1.0 : -1.0;
  const double var = incoming.var() + k.var;
  return GaussianMsg::from_moments(incoming.mean() + sign * k.mean, var);
}

EdgeId other_edge(const FactorGraph& g, FactorId f, EdgeId e) {
  const auto edges = g.edges_of_factor(f);
  return edges[0] == e ? edges[1] : edges[0];
}

}  // namespace

GaussianMsg gbp_var_to_factor(const GaussianGraph& g, VariableId v, FactorId a, const GaussianMessageStore& store) {
  return product_except(g.topology(), v, g.topology().edge_between(a, v), store);
}

GaussianMsg gbp_factor_to_var(const GaussianGraph& g, FactorId a, VariableId v, const GaussianMessageStore& store) {
  const FactorGraph& topo = g.topology();
  const EdgeId out = topo.edge_between(a, v);
  if (topo.factor(a).is_unary()) return g.prior(a);
  const EdgeId in = other_edge(topo, a, out);
  return shift_through(g, a, out, gbp_var_to_factor(g, topo.edge(in).variable, a, store));
}

GaussianMsg gbp_belief(const GaussianGraph& g, VariableId v, const GaussianMessageStore& store) {
  return product_except(g.topology(), v, std::nullopt, store);
}

GbpResult gbp_run_sync(const FactorGraph& graph, const GbpOptions& options) {
  if (options.iterations < 1) throw std::invalid_argument("gbp_run_sync: iterations must be >= 1");
  const GaussianGraph g(graph, options.projection);
  GaussianMessageStore prev(g);
  GaussianMessageStore next(g);

  auto all_beliefs = [&](const GaussianMessageStore& store) {
    std::vector<GaussianMsg> out(graph.num_variables());
    for (VariableId v = 0; v < out.size(); ++v) out[v] = gbp_belief(g, v, store);
    return out;
  };

  GbpResult result;
  result.beliefs = all_beliefs(prev);
  if (options.record_trace) result.trace.push_back({0, result.beliefs});
  if (options.on_iteration) options.on_iteration(0, result.beliefs);

  for (std::size_t t = 1; t <= options.iterations; ++t) {
    detail::parallel_for(graph.num_edges(), options.threads, [&](std::size_t e) {
      const Edge& edge = graph.edge(e);
      if (graph.factor(edge.factor).is_unary()) return;
      next.set_to_factor(e, product_except(graph, edge.variable, e, prev));
    });
    detail::parallel_for(graph.num_edges(), options.threads, [&](std::size_t e) {
      const Edge& edge = graph.edge(e);
      if (graph.factor(edge.factor).is_unary()) return;
      next.set_to_variable(e, shift_through(g, edge.factor, e, next.to_factor(other_edge(graph, edge.factor, e))));
    });
    std::swap(prev, next);
    result.beliefs = all_beliefs(prev);
    if (options.record_trace) result.trace.push_back({t, result.beliefs});
    if (options.on_iteration) options.on_iteration(t, result.beliefs);
  }

  for (VariableId v = 0; v < result.beliefs.size(); ++v) {
    if (result.beliefs[v].is_vague()) {
      throw AllVague("gbp_run_sync: variable " + std::to_string(v) + " received no evidence");
    }
  }
  return result;
}

GbpResult gbp_run_sync(const FactorGraph& g, std::size_t iterations) {
  GbpOptions options;
  options.iterations = iterations;
  return gbp_run_sync(g, options);
}

void write_gbp_trace_csv(std::ostream& out, const GbpResult& result) {
  CsvWriter csv(out);
  csv.header({"iteration", "variable", "mu", "var", "skew", "exkurt", "eps"});
  for (const GbpIterationTrace& it : result.trace) {
    for (std::size_t v = 0; v < it.beliefs.size(); ++v) {
      const GaussianMsg& b = it.beliefs[v];
      const double mu = b.is_vague() ? std::numeric_limits<double>::quiet_NaN() : b.mean();
      csv << it.iteration << v << mu << b.var() << 0.0 << 0.0 << 0.0;
      csv.end_row();
    }
  }
}

}  // namespace gaussbp
