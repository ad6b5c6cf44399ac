#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "gaussbp/factor_graph.hpp"

namespace gaussbp {

// JSON document layout ("gaussbp-factor-graph", version 1):
//
//   {
//     "format": "gaussbp-factor-graph", "version": 1,
//     "grid": {"n_bins": 1024, "min": -32.0, "max": 31.0},
//     "variables": [{"id": 0, "prior": 12}, {"id": 1, "prior": null}, ...],
//     "factors": [
//       {"id": 0, "kind": "binary", "a": 0, "b": 1,
//        "kernel": {"offsets": [-1, 0, 1], "weights": [0.25, 0.5, 0.25]}},
//       {"id": 12, "kind": "unary", "target": 0, "potential": [ ...n_bins reals... ]}
//     ]
//   }
//
// Factors must appear in id order. Doubles are written in shortest
// round-trip form, so a save/load cycle reproduces the graph exactly.

std::string graph_to_json(const FactorGraph& g, int indent = -1);
FactorGraph graph_from_json(std::string_view text);

void save_graph(const FactorGraph& g, const std::filesystem::path& path);
FactorGraph load_graph(const std::filesystem::path& path);

}  // namespace gaussbp
