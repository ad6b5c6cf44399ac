#include "gaussbp/graph_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gaussbp/error.hpp"

namespace gaussbp {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "gaussbp-factor-graph";

}  // namespace

std::string graph_to_json(const FactorGraph& g, int indent) {
  json doc;
  doc["format"] = kFormat;
  doc["version"] = 1;
  doc["grid"] = {{"n_bins", g.grid().size()}, {"min", g.grid().min()}, {"max", g.grid().max()}};

  json vars = json::array();
  for (const VariableNode& v : g.variables()) {
    vars.push_back({{"id", v.id}, {"prior", v.prior ? json(*v.prior) : json(nullptr)}});
  }
  doc["variables"] = std::move(vars);

  json factors = json::array();
  for (const Factor& f : g.factors()) {
    if (f.is_unary()) {
      const auto& u = f.unary();
      factors.push_back({{"id", f.id},
                         {"kind", "unary"},
                         {"target", u.target},
                         {"potential", std::vector<double>(u.potential.mass().begin(), u.potential.mass().end())}});
    } else {
      const auto& b = f.binary();
      factors.push_back({{"id", f.id},
                         {"kind", "binary"},
                         {"a", b.a},
                         {"b", b.b},
                         {"kernel",
                          {{"offsets", std::vector<int>(b.kernel.offsets().begin(), b.kernel.offsets().end())},
                           {"weights", std::vector<double>(b.kernel.weights().begin(), b.kernel.weights().end())}}}});
    }
  }
  doc["factors"] = std::move(factors);
  return doc.dump(indent);
}

FactorGraph graph_from_json(std::string_view text) {
  try {
    const json doc = json::parse(text);
    if (doc.at("format").get<std::string>() != kFormat) throw InvalidGraph("not a gaussbp factor graph document");
    if (doc.at("version").get<int>() != 1) throw InvalidGraph("unsupported factor graph version");
    const auto& gj = doc.at("grid");
    FactorGraph g(Grid(gj.at("n_bins").get<std::size_t>(), gj.at("min").get<double>(), gj.at("max").get<double>()));
    const auto& vars = doc.at("variables");
    for (std::size_t i = 0; i < vars.size(); ++i) {
      if (vars[i].at("id").get<std::size_t>() != i) throw InvalidGraph("variable ids must be dense and ordered");
      g.add_variable();
    }
    const auto& factors = doc.at("factors");
    for (std::size_t i = 0; i < factors.size(); ++i) {
      const auto& f = factors[i];
      if (f.at("id").get<std::size_t>() != i) throw InvalidGraph("factor ids must be dense and ordered");
      const auto kind = f.at("kind").get<std::string>();
      if (kind == "unary") {
        g.add_unary(f.at("target").get<VariableId>(), DiscreteDist(g.grid(), f.at("potential").get<std::vector<double>>()));
      } else if (kind == "binary") {
        const auto& k = f.at("kernel");
        g.add_binary(f.at("a").get<VariableId>(), f.at("b").get<VariableId>(),
                     Kernel(k.at("offsets").get<std::vector<int>>(), k.at("weights").get<std::vector<double>>()));
      } else {
        throw InvalidGraph("factor kind must be unary or binary (got '" + kind + "')");
      }
    }
    for (std::size_t i = 0; i < vars.size(); ++i) {
      const auto& p = vars[i].at("prior");
      const auto expected = g.variable(i).prior;
      if (p.is_null() != !expected.has_value() || (!p.is_null() && p.get<FactorId>() != *expected)) {
        throw InvalidGraph("variable " + std::to_string(i) + " prior does not match its first unary factor");
      }
    }
    g.validate();
    return g;
  } catch (const json::exception& e) {
    throw InvalidGraph(std::string("malformed factor graph JSON: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw InvalidGraph(std::string("invalid factor graph contents: ") + e.what());
  }
}

void save_graph(const FactorGraph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << graph_to_json(g, 1) << '\n';
}

FactorGraph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return graph_from_json(ss.str());
}

}  // namespace gaussbp
