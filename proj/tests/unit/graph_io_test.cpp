#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gaussbp/builders.hpp"
#include "gaussbp/csv.hpp"
#include "gaussbp/error.hpp"
#include "gaussbp/graph_io.hpp"

using namespace gaussbp;

namespace {

void expect_same(const FactorGraph& a, const FactorGraph& b) {
  ASSERT_EQ(a.grid(), b.grid());
  ASSERT_EQ(a.num_variables(), b.num_variables());
  ASSERT_EQ(a.num_factors(), b.num_factors());
  for (FactorId f = 0; f < a.num_factors(); ++f) {
    const Factor& x = a.factor(f);
    const Factor& y = b.factor(f);
    ASSERT_EQ(x.is_unary(), y.is_unary());
    if (x.is_unary()) {
      EXPECT_EQ(x.unary().target, y.unary().target);
      EXPECT_EQ(x.unary().potential, y.unary().potential);
    } else {
      EXPECT_EQ(x.binary().a, y.binary().a);
      EXPECT_EQ(x.binary().b, y.binary().b);
      EXPECT_EQ(x.binary().kernel, y.binary().kernel);
    }
  }
}

}  // namespace

TEST(GraphIo, RoundTripIsExact) {
  const Grid grid(64, -3.3, 7.1);
  PriorList priors;
  for (VariableId v = 0; v < 6; v += 2) priors.emplace_back(v, random_potential({17, v}, grid));
  const FactorGraph g = build_grid_graph(2, 3, priors, KernelSpec::random(7, 11), grid);
  expect_same(g, graph_from_json(graph_to_json(g)));
  expect_same(g, graph_from_json(graph_to_json(g, 2)));

  const auto path = std::filesystem::temp_directory_path() / "gaussbp_graph_io_test.json";
  save_graph(g, path);
  expect_same(g, load_graph(path));
  std::filesystem::remove(path);
}

TEST(GraphIo, RejectsMalformedDocuments) {
  EXPECT_THROW(graph_from_json("{"), Error);
  EXPECT_THROW(graph_from_json(R"({"format": "other", "version": 1})"), Error);
  EXPECT_THROW(graph_from_json(R"({"format": "gaussbp-factor-graph", "version": 1,
    "grid": {"n_bins": 4, "min": 0, "max": 3}, "variables": [{"id": 0, "prior": null}],
    "factors": [{"id": 0, "kind": "binary", "a": 0, "b": 0,
                 "kernel": {"offsets": [0], "weights": [1]}}]})"),
               Error);
  EXPECT_THROW(graph_from_json(R"({"format": "gaussbp-factor-graph", "version": 1,
    "grid": {"n_bins": 4, "min": 0, "max": 3}, "variables": [{"id": 0, "prior": 0}],
    "factors": [{"id": 0, "kind": "unary", "target": 0, "potential": [1, 2]}]})"),
               Error);
  EXPECT_THROW(load_graph("/nonexistent/graph.json"), Error);
}

TEST(Csv, FormatNumberIsStable) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(format_number(-2.5e-20), "-2.5e-20");
  EXPECT_EQ(format_number(42.0), "42");
}

TEST(Csv, Writer) {
  std::ostringstream out;
  CsvWriter w(out);
  w.header({"a", "b", "c"});
  w << 1 << 0.5 << std::string_view("x");
  w.end_row();
  EXPECT_EQ(out.str(), "a,b,c\n1,0.5,x\n");
}

TEST(Csv, AtomicWrite) {
  const auto path = std::filesystem::temp_directory_path() / "gaussbp_atomic_test.txt";
  write_file_atomic(path, "one");
  write_file_atomic(path, "two");
  std::ifstream in(path);
  std::string s;
  in >> s;
  EXPECT_EQ(s, "two");
  std::filesystem::remove(path);
}
