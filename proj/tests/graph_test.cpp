#include "netemb/graph.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "netemb/rng.hpp"

using namespace netemb;

namespace {

// Writes content to a fresh temp file and returns its path.
std::string temp_file(const std::string& content) {
  static int counter = 0;
  auto path = std::filesystem::temp_directory_path() /
              ("netemb_graph_test_" + std::to_string(::getpid()) + "_" +
               std::to_string(counter++) + ".txt");
  std::ofstream out(path);
  out << content;
  return path.string();
}

double min_eigenvalue(const Mat& m) {
  Eigen::MatrixXd e(m.rows, m.cols);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) e(i, j) = m(i, j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(e);
  return solver.eigenvalues().minCoeff();
}

}  // namespace

// ---------------------------------------------------------------------------
// Loaders
// ---------------------------------------------------------------------------

TEST(EdgeList, ThreeNodePath) {
  LoadReport rep;
  Graph g = load_edge_list(temp_file("0 1\n1 2\n"), false, &rep);
  EXPECT_EQ(g.num_nodes(), 3u);
  EXPECT_EQ(g.num_edges(), 2u);
  EXPECT_EQ(rep.components, 1u);
  EXPECT_TRUE(g.has_edge(0, 1));
  EXPECT_TRUE(g.has_edge(1, 2));
  EXPECT_FALSE(g.has_edge(0, 2));
}

TEST(EdgeList, EmptyFileGivesEmptyGraph) {
  Graph g = load_edge_list(temp_file(""), false);
  EXPECT_EQ(g.num_nodes(), 0u);
  EXPECT_EQ(g.num_edges(), 0u);
}

TEST(EdgeList, DuplicateEdgesSumWeights) {
  std::string content = "a b 1.5\nb c 2\na b 0.5\n# comment line\nc a 1\n";
  Graph g = load_edge_list(temp_file(content), true);
  // independent line-scan oracle
  std::size_t data_lines = 0;
  for (char c : content)
    if (c == '\n') ++data_lines;
  --data_lines;  // one comment
  EXPECT_EQ(data_lines, 4u);
  EXPECT_EQ(g.num_edges(), 3u);  // a-b merged
  auto s = adjacency(g);
  EXPECT_DOUBLE_EQ(s(0, 1), 2.0);  // 1.5 + 0.5
}

TEST(EdgeList, MalformedLineReportsLineNumber) {
  try {
    load_edge_list(temp_file("0 1\nbroken\n"), false);
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
}

TEST(EdgeList, NegativeWeightRejected) {
  EXPECT_THROW(load_edge_list(temp_file("0 1 -2\n"), true), InputError);
}

TEST(HyperedgeList, SingleThreeUniformEdge) {
  std::string types = "0 0\n1 1\n2 2\n";
  HyperGraph h = load_hyperedge_list(temp_file("0 1 2\n"), temp_file(types));
  EXPECT_EQ(h.num_nodes(), 3u);
  EXPECT_EQ(h.num_edges(), 1u);
  EXPECT_EQ(h.num_types(), 3u);
}

TEST(HyperedgeList, SizeOneEdgeRejected) {
  EXPECT_THROW(load_hyperedge_list(temp_file("0\n"), temp_file("0 0\n")), InputError);
}

TEST(HyperedgeList, UnknownNodeInTypeMapRejected) {
  try {
    load_hyperedge_list(temp_file("0 1 9\n"), temp_file("0 0\n1 1\n"));
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("'9'"), std::string::npos) << e.what();
  }
}

TEST(HyperedgeList, IncidenceColumnSumsEqualEdgeSizes) {
  Rng rng(5);
  std::string types, edges;
  for (int i = 0; i < 9; ++i) types += std::to_string(i) + " " + std::to_string(i % 3) + "\n";
  std::vector<std::size_t> sizes;
  for (int e = 0; e < 10; ++e) {
    std::size_t k = 2 + rng.index(3);
    sizes.push_back(k);
    std::vector<std::size_t> members;
    while (members.size() < k) {
      std::size_t v = rng.index(9);
      if (std::find(members.begin(), members.end(), v) == members.end())
        members.push_back(v);
    }
    for (std::size_t i = 0; i < k; ++i)
      edges += std::to_string(members[i]) + (i + 1 == k ? "" : " ");
    edges += "\n";
  }
  HyperGraph h = load_hyperedge_list(temp_file(edges), temp_file(types));
  Mat H = incidence(h);
  for (std::size_t e = 0; e < H.cols; ++e) {
    double colsum = 0.0;
    for (std::size_t v = 0; v < H.rows; ++v) colsum += H(v, e);
    EXPECT_DOUBLE_EQ(colsum, static_cast<double>(sizes[e]));
  }
}

// ---------------------------------------------------------------------------
// Derived matrices
// ---------------------------------------------------------------------------

TEST(Adjacency, EmptyGraphGivesZeroMatrix) {
  Graph g = Graph::from_edges(3, {});
  Mat s = adjacency(g);
  for (double x : s.v) EXPECT_DOUBLE_EQ(x, 0.0);
}

TEST(Adjacency, SingleUnweightedEdge) {
  Graph g = Graph::from_edges(2, {{0, 1, 1.0}});
  Mat s = adjacency(g);
  EXPECT_DOUBLE_EQ(s(0, 1), 1.0);
  EXPECT_DOUBLE_EQ(s(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(s(0, 0), 0.0);
}

TEST(Adjacency, WeightedTriangleMatchesEdgeScan) {
  Graph g = Graph::from_edges(3, {{0, 1, 1.0}, {1, 2, 2.0}, {0, 2, 3.0}});
  Mat s = adjacency(g);
  // edge-scan oracle
  Mat oracle(3, 3);
  for (const auto& e : g.edges()) {
    oracle(e.u, e.v) += e.w;
    oracle(e.v, e.u) += e.w;
  }
  for (std::size_t i = 0; i < 9; ++i) EXPECT_DOUBLE_EQ(s.v[i], oracle.v[i]);
  EXPECT_TRUE(s.symmetric());
}

TEST(Transition, StarCenterRowsSplitEvenly) {
  Graph g = Graph::from_edges(4, {{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}});
  Mat p = transition(g);
  for (std::size_t j = 1; j < 4; ++j) EXPECT_NEAR(p(0, j), 1.0 / 3.0, 1e-15);
}

TEST(Transition, IsolatedNodeHasZeroRow) {
  Graph g = Graph::from_edges(3, {{0, 1, 1.0}});
  Mat p = transition(g);
  for (std::size_t j = 0; j < 3; ++j) EXPECT_DOUBLE_EQ(p(2, j), 0.0);
}

TEST(Transition, EqualsDegreeScaledAdjacency) {
  Rng rng(17);
  std::vector<Graph::Edge> edges;
  for (std::size_t u = 0; u < 8; ++u)
    for (std::size_t v = u + 1; v < 8; ++v)
      if (rng.uniform() < 0.4) edges.push_back({u, v, rng.uniform(0.5, 2.0)});
  Graph g = Graph::from_edges(8, edges);
  Mat s = adjacency(g);
  Mat p = transition(g);
  for (std::size_t i = 0; i < 8; ++i) {
    double d = 0.0;
    for (std::size_t j = 0; j < 8; ++j) d += s(i, j);
    double rowsum = 0.0;
    for (std::size_t j = 0; j < 8; ++j) {
      if (d > 0.0) {
        EXPECT_NEAR(p(i, j), s(i, j) / d, 1e-12);
      }
      rowsum += p(i, j);
    }
    if (d > 0.0) {
      EXPECT_NEAR(rowsum, 1.0, 1e-10);
    }
  }
}

TEST(HyperAdjacency, SingleEdgeGivesOffDiagonalOnes) {
  HyperGraph h(3, {0, 1, 2}, {{0, 1, 2}});
  Mat a = hyper_adjacency(h);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      EXPECT_DOUBLE_EQ(a(i, j), i == j ? 0.0 : 1.0);
}

TEST(HyperAdjacency, SharedPairCountsTwice) {
  HyperGraph h(3, {0, 1, 2, 2}, {{0, 1, 2}, {0, 1, 3}});
  Mat a = hyper_adjacency(h);
  EXPECT_DOUBLE_EQ(a(0, 1), 2.0);  // pair-count oracle: {0,1} in both edges
  EXPECT_DOUBLE_EQ(a(0, 2), 1.0);
  EXPECT_DOUBLE_EQ(a(2, 3), 0.0);
}

TEST(HyperAdjacency, NoEdgesGivesZeroMatrix) {
  HyperGraph h(2, {0, 1}, {});
  Mat a = hyper_adjacency(h);
  for (double x : a.v) EXPECT_DOUBLE_EQ(x, 0.0);
}

TEST(HyperAdjacency, MatchesBruteForcePairCounting) {
  Rng rng(23);
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t n = 3 + rng.index(6);  // up to 8 nodes
    std::size_t m = 1 + rng.index(10);
    std::vector<int> types(n, 0);
    std::vector<std::vector<std::size_t>> edges;
    for (std::size_t e = 0; e < m; ++e) {
      std::size_t k = 2 + rng.index(std::min<std::size_t>(n - 1, 3));
      std::vector<std::size_t> members;
      while (members.size() < k) {
        std::size_t v = rng.index(n);
        if (std::find(members.begin(), members.end(), v) == members.end())
          members.push_back(v);
      }
      edges.push_back(members);
    }
    HyperGraph h(1, types, edges);
    Mat a = hyper_adjacency(h);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        std::size_t count = 0;
        if (i != j)
          for (const auto& e : edges) {
            bool has_i = std::find(e.begin(), e.end(), i) != e.end();
            bool has_j = std::find(e.begin(), e.end(), j) != e.end();
            if (has_i && has_j) ++count;
          }
        EXPECT_DOUBLE_EQ(a(i, j), static_cast<double>(count));
      }
  }
}

TEST(Laplacian, TwoNodeEdge) {
  Graph g = Graph::from_edges(2, {{0, 1, 1.0}});
  Mat l = laplacian(adjacency(g));
  EXPECT_DOUBLE_EQ(l(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(l(0, 1), -1.0);
  EXPECT_DOUBLE_EQ(l(1, 0), -1.0);
  EXPECT_DOUBLE_EQ(l(1, 1), 1.0);
}

TEST(Laplacian, ZeroMatrixMapsToZero) {
  Mat z(4, 4);
  Mat l = laplacian(z);
  for (double x : l.v) EXPECT_DOUBLE_EQ(x, 0.0);
}

TEST(Laplacian, RandomGraphIsPositiveSemidefinite) {
  Rng rng(31);
  std::vector<Graph::Edge> edges;
  for (std::size_t u = 0; u < 6; ++u)
    for (std::size_t v = u + 1; v < 6; ++v)
      if (rng.uniform() < 0.5) edges.push_back({u, v, rng.uniform(0.1, 3.0)});
  Mat l = laplacian(adjacency(Graph::from_edges(6, edges)));
  EXPECT_GE(min_eigenvalue(l), -1e-9);  // dense eigensolver oracle
}

TEST(Laplacian, AsymmetricInputRejected) {
  Mat m(2, 2);
  m(0, 1) = 1.0;
  EXPECT_THROW(laplacian(m), InputError);
}

TEST(Laplacian, AnnihilatesAllOnesVector) {
  Rng rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t n = 2 + rng.index(9);
    std::vector<Graph::Edge> edges;
    for (std::size_t u = 0; u < n; ++u)
      for (std::size_t v = u + 1; v < n; ++v)
        if (rng.uniform() < 0.4) edges.push_back({u, v, rng.uniform(0.1, 2.0)});
    Mat l = laplacian(adjacency(Graph::from_edges(n, edges)));
    for (std::size_t i = 0; i < n; ++i) {
      double rowsum = 0.0;
      for (std::size_t j = 0; j < n; ++j) rowsum += l(i, j);
      EXPECT_LT(std::abs(rowsum), 1e-9);
    }
  }
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

TEST(DegreeBiasedSample, SmallNeighborhoodReturnedWhole) {
  Graph g = Graph::from_edges(4, {{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}});
  Rng rng(1);
  std::vector<std::size_t> nbrs = {1, 2, 3};
  auto out = degree_biased_sample(g, nbrs, 300, rng);  // default cap
  EXPECT_EQ(out, nbrs);
}

TEST(DegreeBiasedSample, FrequencyProportionalToDegree) {
  // node 1 has degree 9, node 2 has degree 1
  std::vector<Graph::Edge> edges = {{0, 1, 1.0}, {0, 2, 1.0}};
  for (std::size_t v = 3; v < 11; ++v) edges.push_back({1, v, 1.0});
  Graph g = Graph::from_edges(11, edges);
  ASSERT_EQ(g.degree(1), 9u);
  ASSERT_EQ(g.degree(2), 1u);
  Rng rng(77);
  int picked_high = 0;
  const int trials = 10000;
  for (int t = 0; t < trials; ++t) {
    auto out = degree_biased_sample(g, {1, 2}, 1, rng);
    ASSERT_EQ(out.size(), 1u);
    if (out[0] == 1) ++picked_high;
  }
  double freq = static_cast<double>(picked_high) / trials;
  EXPECT_NEAR(freq, 0.9, 0.03);  // Monte Carlo oracle
}

TEST(DegreeBiasedSample, EmptyNeighborhoodGivesEmptyResult) {
  Graph g = Graph::from_edges(2, {{0, 1, 1.0}});
  Rng rng(3);
  EXPECT_TRUE(degree_biased_sample(g, {}, 5, rng).empty());
}

TEST(DegreeBiasedSample, SamplesAreDistinct) {
  std::vector<Graph::Edge> edges;
  for (std::size_t v = 1; v < 10; ++v) edges.push_back({0, v, 1.0});
  Graph g = Graph::from_edges(10, edges);
  Rng rng(9);
  std::vector<std::size_t> nbrs;
  for (std::size_t v = 1; v < 10; ++v) nbrs.push_back(v);
  auto out = degree_biased_sample(g, nbrs, 4, rng);
  EXPECT_EQ(out.size(), 4u);
  std::sort(out.begin(), out.end());
  EXPECT_EQ(std::unique(out.begin(), out.end()), out.end());
}

// ---------------------------------------------------------------------------
// Invariants
// ---------------------------------------------------------------------------

TEST(GraphInvariants, AdjacencyInvariantUnderEdgeOrderPermutation) {
  Rng rng(53);
  for (int trial = 0; trial < 10; ++trial) {
    std::string base;
    std::vector<std::string> lines;
    for (std::size_t u = 0; u < 6; ++u)
      for (std::size_t v = u + 1; v < 6; ++v)
        if (rng.uniform() < 0.5)
          lines.push_back(std::to_string(u) + " " + std::to_string(v));
    if (lines.empty()) continue;
    for (const auto& l : lines) base += l + "\n";
    Graph g1 = load_edge_list(temp_file(base), false);

    rng.shuffle(lines);
    std::string shuffled;
    for (const auto& l : lines) shuffled += l + "\n";
    Graph g2 = load_edge_list(temp_file(shuffled), false);

    // compare adjacency keyed by original labels
    Mat s1 = adjacency(g1), s2 = adjacency(g2);
    ASSERT_EQ(g1.num_nodes(), g2.num_nodes());
    std::map<std::string, std::size_t> idx2;
    for (std::size_t i = 0; i < g2.num_nodes(); ++i) idx2[g2.labels()[i]] = i;
    for (std::size_t i = 0; i < g1.num_nodes(); ++i)
      for (std::size_t j = 0; j < g1.num_nodes(); ++j)
        EXPECT_DOUBLE_EQ(s1(i, j), s2(idx2[g1.labels()[i]], idx2[g1.labels()[j]]));
  }
}
