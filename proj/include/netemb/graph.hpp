#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "netemb/error.hpp"
#include "netemb/mat.hpp"
#include "netemb/rng.hpp"

namespace netemb {

// Undirected weighted graph with dense contiguous node ids. Immutable after
// construction; duplicate edges accumulate weight.
class Graph {
 public:
  struct Edge {
    std::size_t u, v;
    double w;
  };

  Graph() = default;

  static Graph from_edges(std::size_t n, const std::vector<Edge>& edges,
                          bool allow_self_loops = false) {
    Graph g;
    g.n_ = n;
    g.labels_.resize(n);
    for (std::size_t i = 0; i < n; ++i) g.labels_[i] = std::to_string(i);
    std::map<std::pair<std::size_t, std::size_t>, double> acc;
    for (const Edge& e : edges) {
      if (e.u >= n || e.v >= n)
        throw InputError("graph: node id out of range [0, " + std::to_string(n) + ")");
      if (e.w < 0.0) throw InputError("graph: negative edge weight");
      if (e.u == e.v && !allow_self_loops)
        throw InputError("graph: self-loop on node " + std::to_string(e.u));
      auto key = std::minmax(e.u, e.v);
      acc[{key.first, key.second}] += e.w;
    }
    for (const auto& [key, w] : acc) g.edges_.push_back({key.first, key.second, w});
    g.build_adjacency_lists();
    return g;
  }

  std::size_t num_nodes() const { return n_; }
  std::size_t num_edges() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<std::string>& labels() const { return labels_; }
  void set_labels(std::vector<std::string> labels) { labels_ = std::move(labels); }

  const std::vector<std::pair<std::size_t, double>>& neighbors(std::size_t v) const {
    return adj_.at(v);
  }
  std::size_t degree(std::size_t v) const { return adj_.at(v).size(); }
  double weighted_degree(std::size_t v) const {
    double s = 0.0;
    for (auto& [u, w] : adj_.at(v)) s += w;
    return s;
  }
  bool has_edge(std::size_t u, std::size_t v) const {
    for (auto& [x, w] : adj_.at(u))
      if (x == v) return true;
    return false;
  }

  std::size_t num_components() const {
    std::vector<int> comp(n_, -1);
    std::size_t count = 0;
    std::vector<std::size_t> stack;
    for (std::size_t s = 0; s < n_; ++s) {
      if (comp[s] >= 0) continue;
      ++count;
      stack.push_back(s);
      comp[s] = static_cast<int>(count);
      while (!stack.empty()) {
        std::size_t v = stack.back();
        stack.pop_back();
        for (auto& [u, w] : adj_[v])
          if (comp[u] < 0) {
            comp[u] = static_cast<int>(count);
            stack.push_back(u);
          }
      }
    }
    return count;
  }

  bool connected() const { return n_ == 0 || num_components() == 1; }

  // Induced subgraph on `nodes`; labels keep the original node's label.
  Graph induced(const std::vector<std::size_t>& nodes) const {
    std::map<std::size_t, std::size_t> remap;
    for (std::size_t i = 0; i < nodes.size(); ++i) remap[nodes[i]] = i;
    std::vector<Edge> sub;
    for (const Edge& e : edges_) {
      auto iu = remap.find(e.u), iv = remap.find(e.v);
      if (iu != remap.end() && iv != remap.end())
        sub.push_back({iu->second, iv->second, e.w});
    }
    Graph g = from_edges(nodes.size(), sub);
    std::vector<std::string> labels(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) labels[i] = labels_[nodes[i]];
    g.set_labels(std::move(labels));
    return g;
  }

 private:
  void build_adjacency_lists() {
    adj_.assign(n_, {});
    for (const Edge& e : edges_) {
      adj_[e.u].push_back({e.v, e.w});
      if (e.u != e.v) adj_[e.v].push_back({e.u, e.w});
    }
    for (auto& lst : adj_) std::sort(lst.begin(), lst.end());
  }

  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::pair<std::size_t, double>>> adj_;
  std::vector<std::string> labels_;
};

// Hypergraph with typed nodes; hyperedges are id tuples of size >= 2.
class HyperGraph {
 public:
  HyperGraph() = default;
  HyperGraph(std::size_t num_types, std::vector<int> type_of,
             std::vector<std::vector<std::size_t>> edges)
      : num_types_(num_types), type_of_(std::move(type_of)), edges_(std::move(edges)) {
    labels_.resize(type_of_.size());
    for (std::size_t i = 0; i < labels_.size(); ++i) labels_[i] = std::to_string(i);
    for (const auto& e : edges_) {
      if (e.size() < 2) throw InputError("hypergraph: hyperedge with fewer than 2 nodes");
      for (std::size_t v : e)
        if (v >= type_of_.size()) throw InputError("hypergraph: node id out of range");
    }
    for (int t : type_of_)
      if (t < 0 || static_cast<std::size_t>(t) >= num_types_)
        throw InputError("hypergraph: node type out of range");
  }

  std::size_t num_nodes() const { return type_of_.size(); }
  std::size_t num_edges() const { return edges_.size(); }
  std::size_t num_types() const { return num_types_; }
  int type_of(std::size_t v) const { return type_of_.at(v); }
  const std::vector<std::vector<std::size_t>>& edges() const { return edges_; }
  const std::vector<std::string>& labels() const { return labels_; }
  void set_labels(std::vector<std::string> labels) { labels_ = std::move(labels); }

  // Number of hyperedges containing v.
  std::size_t degree(std::size_t v) const {
    std::size_t d = 0;
    for (const auto& e : edges_)
      for (std::size_t u : e)
        if (u == v) {
          ++d;
          break;
        }
    return d;
  }

  std::vector<std::size_t> nodes_of_type(int t) const {
    std::vector<std::size_t> out;
    for (std::size_t v = 0; v < type_of_.size(); ++v)
      if (type_of_[v] == t) out.push_back(v);
    return out;
  }

  bool has_hyperedge(std::vector<std::size_t> tuple) const {
    std::sort(tuple.begin(), tuple.end());
    for (auto e : edges_) {
      std::sort(e.begin(), e.end());
      if (e == tuple) return true;
    }
    return false;
  }

 private:
  std::size_t num_types_ = 0;
  std::vector<int> type_of_;
  std::vector<std::vector<std::size_t>> edges_;
  std::vector<std::string> labels_;
};

struct LoadReport {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t components = 0;
};

namespace detail {

inline std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream is(line);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

// Strips a trailing '#' comment; returns true when nothing remains.
inline bool comment_or_blank(std::string& line) {
  auto pos = line.find('#');
  if (pos != std::string::npos) line.erase(pos);
  for (char c : line)
    if (!std::isspace(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace detail

// Edge list: whitespace-separated "u v" or "u v w" lines, '#' comments.
// Node labels are re-indexed densely in order of first appearance.
inline Graph load_edge_list(const std::string& path, bool weighted,
                            LoadReport* report = nullptr) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open edge list: " + path);
  std::map<std::string, std::size_t> index;
  std::vector<std::string> labels;
  auto intern = [&](const std::string& label) {
    auto it = index.find(label);
    if (it != index.end()) return it->second;
    std::size_t id = labels.size();
    index[label] = id;
    labels.push_back(label);
    return id;
  };

  std::vector<Graph::Edge> edges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::comment_or_blank(line)) continue;
    auto toks = detail::split_ws(line);
    std::size_t want = weighted ? 3 : 2;
    if (toks.size() != want && !(weighted && toks.size() == 2))
      throw InputError("edge list " + path + ": malformed line " + std::to_string(lineno));
    double w = 1.0;
    if (weighted && toks.size() == 3) {
      try {
        w = std::stod(toks[2]);
      } catch (const std::exception&) {
        throw InputError("edge list " + path + ": bad weight on line " +
                         std::to_string(lineno));
      }
      if (w < 0.0)
        throw InputError("edge list " + path + ": negative weight on line " +
                         std::to_string(lineno));
    }
    std::size_t u = intern(toks[0]);
    std::size_t v = intern(toks[1]);
    edges.push_back({u, v, w});
  }
  Graph g = Graph::from_edges(labels.size(), edges);
  g.set_labels(labels);
  if (report) {
    report->nodes = g.num_nodes();
    report->edges = g.num_edges();
    report->components = g.num_components();
  }
  return g;
}

// Hyperedge list: one hyperedge per line (member labels); type map file has
// "label type" lines covering every node.
inline HyperGraph load_hyperedge_list(const std::string& path,
                                      const std::string& type_map_path,
                                      LoadReport* report = nullptr) {
  std::ifstream tm(type_map_path);
  if (!tm) throw InputError("cannot open type map: " + type_map_path);
  std::map<std::string, int> type_by_label;
  int max_type = -1;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(tm, line)) {
    ++lineno;
    if (detail::comment_or_blank(line)) continue;
    auto toks = detail::split_ws(line);
    if (toks.size() != 2)
      throw InputError("type map " + type_map_path + ": malformed line " +
                       std::to_string(lineno));
    int t = std::stoi(toks[1]);
    if (t < 0) throw InputError("type map " + type_map_path + ": negative type");
    type_by_label[toks[0]] = t;
    max_type = std::max(max_type, t);
  }

  std::ifstream in(path);
  if (!in) throw InputError("cannot open hyperedge list: " + path);
  std::map<std::string, std::size_t> index;
  std::vector<std::string> labels;
  std::vector<int> types;
  auto intern = [&](const std::string& label, std::size_t at_line) {
    auto it = index.find(label);
    if (it != index.end()) return it->second;
    auto ty = type_by_label.find(label);
    if (ty == type_by_label.end())
      throw InputError("hyperedge list " + path + ": node '" + label +
                       "' missing from type map (line " + std::to_string(at_line) + ")");
    std::size_t id = labels.size();
    index[label] = id;
    labels.push_back(label);
    types.push_back(ty->second);
    return id;
  };

  std::vector<std::vector<std::size_t>> hedges;
  lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::comment_or_blank(line)) continue;
    auto toks = detail::split_ws(line);
    if (toks.size() < 2)
      throw InputError("hyperedge list " + path + ": hyperedge of size < 2 on line " +
                       std::to_string(lineno));
    std::vector<std::size_t> edge;
    for (const auto& tok : toks) edge.push_back(intern(tok, lineno));
    hedges.push_back(std::move(edge));
  }
  HyperGraph h(static_cast<std::size_t>(max_type + 1), types, hedges);
  h.set_labels(labels);
  if (report) {
    report->nodes = h.num_nodes();
    report->edges = h.num_edges();
    report->components = 0;
  }
  return h;
}

// Dense adjacency matrix S; symmetric, zero diagonal unless self-loops exist.
inline Mat adjacency(const Graph& g) {
  Mat s(g.num_nodes(), g.num_nodes());
  for (const auto& e : g.edges()) {
    s(e.u, e.v) += e.w;
    if (e.u != e.v) s(e.v, e.u) += e.w;
  }
  return s;
}

// Row-stochastic transition matrix P = D^{-1} S; rows of isolated nodes stay
// zero.
inline Mat transition(const Graph& g) {
  Mat p = adjacency(g);
  for (std::size_t i = 0; i < p.rows; ++i) {
    double d = 0.0;
    for (std::size_t j = 0; j < p.cols; ++j) d += p(i, j);
    if (d > 0.0)
      for (std::size_t j = 0; j < p.cols; ++j) p(i, j) /= d;
  }
  return p;
}

// Incidence matrix H (|V| x |E|): H(v, e) = 1 iff v is a member of e.
inline Mat incidence(const HyperGraph& h) {
  Mat m(h.num_nodes(), h.num_edges());
  for (std::size_t e = 0; e < h.num_edges(); ++e)
    for (std::size_t v : h.edges()[e]) m(v, e) = 1.0;
  return m;
}

// Hyper-adjacency A = H H^T - D_v: entry (i, j) counts hyperedges containing
// both i and j; diagonal is zero.
inline Mat hyper_adjacency(const HyperGraph& h) {
  Mat H = incidence(h);
  Mat a(h.num_nodes(), h.num_nodes());
  for (std::size_t i = 0; i < H.rows; ++i)
    for (std::size_t j = 0; j < H.rows; ++j) {
      if (i == j) continue;
      double s = 0.0;
      for (std::size_t e = 0; e < H.cols; ++e) s += H(i, e) * H(j, e);
      a(i, j) = s;
    }
  return a;
}

// Graph Laplacian L = diag(row sums) - A for a symmetric non-negative A.
inline Mat laplacian(const Mat& a) {
  if (!a.square()) throw ShapeError("laplacian: matrix is not square");
  if (!a.symmetric(1e-12)) throw InputError("laplacian: matrix is not symmetric");
  Mat l(a.rows, a.cols);
  for (std::size_t i = 0; i < a.rows; ++i) {
    double d = 0.0;
    for (std::size_t j = 0; j < a.cols; ++j) {
      d += a(i, j);
      l(i, j) = -a(i, j);
    }
    l(i, i) += d;
  }
  return l;
}

// Samples up to `cap` distinct neighbors without replacement, selection
// probability proportional to the neighbor's degree in `g`. Returns all
// neighbors when there are at most `cap` of them.
inline std::vector<std::size_t> degree_biased_sample(
    const Graph& g, const std::vector<std::size_t>& neighbors, std::size_t cap,
    Rng& rng) {
  if (cap < 1) throw InputError("degree_biased_sample: cap must be >= 1");
  if (neighbors.size() <= cap) return neighbors;
  std::vector<std::size_t> pool = neighbors;
  std::vector<double> weights(pool.size());
  for (std::size_t i = 0; i < pool.size(); ++i)
    weights[i] = static_cast<double>(g.degree(pool[i]));
  std::vector<std::size_t> picked;
  for (std::size_t k = 0; k < cap; ++k) {
    std::size_t i = rng.weighted_index(weights);
    picked.push_back(pool[i]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(i));
    weights.erase(weights.begin() + static_cast<std::ptrdiff_t>(i));
  }
  return picked;
}

}  // namespace netemb
