#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "netemb/error.hpp"
#include "netemb/graph.hpp"
#include "netemb/mat.hpp"
#include "netemb/nn.hpp"
#include "netemb/optim.hpp"
#include "netemb/oracles.hpp"
#include "netemb/rng.hpp"
#include "netemb/tensor.hpp"

namespace netemb::drne {

enum class LstmMode { standard, linear };
enum class SortOrder { ascending, descending };

// Re-centers and re-scales a cell state: g * (c - mean) / std. The variance
// is clamped at eps^2 so constant cells map to zero instead of dividing by
// zero.
inline Tensor layer_norm(const Tensor& c, const Tensor& gain, double eps = 1e-8) {
  if (c.ndim() != 1 || c.shape() != gain.shape())
    throw ShapeError("layer_norm: cell " + shape_str(c.shape()) + " vs gain " +
                     shape_str(gain.shape()));
  double inv_k = 1.0 / static_cast<double>(c.numel());
  Tensor mu = scale(sum(c), inv_k);
  Tensor centered = sub(c, mu);
  Tensor var = scale(squared_frobenius(centered), inv_k);
  Tensor sigma = sqrt_t(cmax(var, eps * eps));
  return hadamard(gain, div(centered, sigma));
}

// Gate parameters of the ln-LSTM cell. All four gate matrices act on the
// concatenation [h_{t-1}, x_t]. Linear mode drops every nonlinearity and the
// layer norm; it exists solely for the constructive centrality check.
struct LstmParams {
  Tensor w_f, w_i, w_o, w_c;  // {k, 2k}
  Tensor b_f, b_i, b_o, b_c;  // {k}
  Tensor gain;                // {k}
  LstmMode mode = LstmMode::standard;
  double ln_eps = 1e-8;

  LstmParams() = default;

  LstmParams(Rng& rng, std::size_t k) {
    auto mk_w = [&](const std::string& name) {
      return Tensor::param({k, 2 * k}, xavier_uniform(rng, 2 * k, k), name);
    };
    auto mk_b = [&](const std::string& name) {
      return Tensor::param({k}, std::vector<double>(k, 0.0), name);
    };
    w_f = mk_w("lstm.w_f");
    w_i = mk_w("lstm.w_i");
    w_o = mk_w("lstm.w_o");
    w_c = mk_w("lstm.w_c");
    b_f = mk_b("lstm.b_f");
    b_i = mk_b("lstm.b_i");
    b_o = mk_b("lstm.b_o");
    b_c = mk_b("lstm.b_c");
    gain = Tensor::param({k}, std::vector<double>(k, 1.0), "lstm.gain");
  }

  std::size_t dim() const { return b_f.numel(); }

  void collect(std::vector<Tensor>& out) const {
    for (const Tensor& t : {w_f, w_i, w_o, w_c, b_f, b_i, b_o, b_c, gain})
      out.push_back(t);
  }
};

// One LSTM transition. Returns (h_t, c_t).
inline std::pair<Tensor, Tensor> lstm_cell(const LstmParams& p, const Tensor& h_prev,
                                           const Tensor& c_prev, const Tensor& x_t) {
  std::size_t k = p.dim();
  if (h_prev.numel() != k || c_prev.numel() != k || x_t.numel() != k)
    throw ShapeError("lstm_cell: state/input width must be " + std::to_string(k) +
                     ", got h=" + shape_str(h_prev.shape()) + " c=" +
                     shape_str(c_prev.shape()) + " x=" + shape_str(x_t.shape()));
  Tensor joint = concat(h_prev, x_t);
  Tensor f_pre = add(matmul(p.w_f, joint), p.b_f);
  Tensor i_pre = add(matmul(p.w_i, joint), p.b_i);
  Tensor o_pre = add(matmul(p.w_o, joint), p.b_o);
  Tensor c_pre = add(matmul(p.w_c, joint), p.b_c);
  if (p.mode == LstmMode::linear) {
    Tensor c_t = add(hadamard(f_pre, c_prev), hadamard(i_pre, c_pre));
    return {hadamard(o_pre, c_t), c_t};
  }
  Tensor f_t = sigmoid(f_pre);
  Tensor i_t = sigmoid(i_pre);
  Tensor o_t = sigmoid(o_pre);
  Tensor c_tilde = tanh_t(c_pre);
  Tensor c_t = add(hadamard(f_t, c_prev), hadamard(i_t, c_tilde));
  Tensor c_norm = layer_norm(c_t, p.gain, p.ln_eps);
  return {hadamard(o_t, tanh_t(c_norm)), c_t};
}

struct Config {
  std::size_t k = 8;           // embedding width
  double lambda = 1.0;         // degree-regularizer weight
  std::size_t cap = 300;       // neighbor sampling bound S
  std::size_t iterations = 100;
  double lr = 0.0025;          // Adam default
  std::size_t mlp_hidden = 16;
  SortOrder order = SortOrder::ascending;
  std::uint64_t seed = 1;

  void validate() const {
    if (k == 0) throw InputError("drne: k must be positive");
    if (lambda < 0.0) throw InputError("drne: lambda must be >= 0");
    if (cap == 0) throw InputError("drne: cap must be >= 1");
  }
};

// Trained state: one embedding per node plus shared aggregator parameters.
class State {
 public:
  State() = default;

  State(const Graph& graph, const Config& cfg, Rng& rng)
      : graph_(graph), cfg_(cfg), lstm_(rng, cfg.k) {
    cfg.validate();
    for (std::size_t v = 0; v < graph.num_nodes(); ++v) {
      std::vector<double> x(cfg.k);
      for (double& e : x) e = rng.uniform(-0.5, 0.5);
      embeddings_.push_back(Tensor::param({cfg.k}, x, "X" + std::to_string(v)));
    }
    mlp_hidden_ = Dense(rng, cfg.k, cfg.mlp_hidden, "mlp.hidden");
    mlp_out_ = Dense(rng, cfg.mlp_hidden, 1, "mlp.out");
  }

  const Graph& graph() const { return graph_; }
  const Config& config() const { return cfg_; }
  const LstmParams& lstm() const { return lstm_; }
  LstmParams& lstm() { return lstm_; }
  const std::vector<Tensor>& embeddings() const { return embeddings_; }
  std::vector<Tensor>& embeddings() { return embeddings_; }

  std::vector<Tensor> embedding_params() const { return embeddings_; }
  std::vector<Tensor> network_params() const {
    std::vector<Tensor> ps;
    lstm_.collect(ps);
    mlp_hidden_.collect(ps);
    mlp_out_.collect(ps);
    return ps;
  }

  // Single hidden-layer MLP with ReLU that estimates log(degree + 1).
  Tensor degree_head(const Tensor& h) const {
    return mlp_out_.affine(relu(mlp_hidden_.affine(h)));
  }

  // Orders neighbor ids by degree with ascending-id tie break.
  std::vector<std::size_t> ordered(std::vector<std::size_t> nodes) const {
    bool asc = cfg_.order == SortOrder::ascending;
    std::sort(nodes.begin(), nodes.end(), [&](std::size_t a, std::size_t b) {
      std::size_t da = graph_.degree(a), db = graph_.degree(b);
      if (da != db) return asc ? da < db : da > db;
      return a < b;
    });
    return nodes;
  }

  // Feeds the given nodes' embeddings through the ln-LSTM in degree order.
  Tensor aggregate_list(const std::vector<std::size_t>& nodes) const {
    Tensor h = Tensor::zeros({cfg_.k});
    Tensor c = Tensor::zeros({cfg_.k});
    for (std::size_t u : ordered(nodes)) {
      auto [h2, c2] = lstm_cell(lstm_, h, c, embeddings_.at(u));
      h = h2;
      c = c2;
    }
    return h;
  }

  // Degree-capped, degree-sorted aggregation of v's neighborhood. Isolated
  // nodes aggregate to the zero state.
  Tensor aggregate(std::size_t v, Rng& rng) const {
    std::vector<std::size_t> nbrs;
    for (const auto& [u, w] : graph_.neighbors(v)) nbrs.push_back(u);
    if (nbrs.empty()) return Tensor::zeros({cfg_.k});
    return aggregate_list(degree_biased_sample(graph_, nbrs, cfg_.cap, rng));
  }

 private:
  Graph graph_;
  Config cfg_;
  std::vector<Tensor> embeddings_;
  LstmParams lstm_;
  Dense mlp_hidden_;
  Dense mlp_out_;
};

// sum_v || X_v - Agg(N(v)) ||^2 over the given nodes.
inline Tensor loss_recursive(const State& state, const std::vector<std::size_t>& nodes,
                             Rng& rng) {
  Tensor acc = Tensor::scalar(0.0);
  for (std::size_t v : nodes)
    acc = add(acc, squared_frobenius(sub(state.embeddings().at(v),
                                         state.aggregate(v, rng))));
  return acc;
}

// sum_v ( log(d_v + 1) - MLP(Agg(N(v))) )^2.
inline Tensor loss_regularizer(const State& state, const std::vector<std::size_t>& nodes,
                               Rng& rng) {
  Tensor acc = Tensor::scalar(0.0);
  for (std::size_t v : nodes) {
    double target = std::log(static_cast<double>(state.graph().degree(v)) + 1.0);
    Tensor pred = state.degree_head(state.aggregate(v, rng));
    acc = add(acc, squared_frobenius(add_scalar(neg(pred), target)));
  }
  return acc;
}

struct TrainResult {
  State state;
  std::vector<double> loss_history;
};

// Per node: one backward pass feeding two optimizer groups, embeddings first
// and network parameters second, matching the alternating update scheme.
inline TrainResult train(const Graph& graph, const Config& cfg) {
  cfg.validate();
  if (graph.num_nodes() == 0) throw InputError("drne: empty graph");
  Rng rng(cfg.seed);
  Rng init_rng = rng.substream("init");
  Rng sample_rng = rng.substream("sample");
  Rng order_rng = rng.substream("order");

  TrainResult result{State(graph, cfg, init_rng), {}};
  State& st = result.state;
  Optimizer opt_x({OptKind::adam, cfg.lr}, st.embedding_params());
  Optimizer opt_theta({OptKind::adam, cfg.lr}, st.network_params());

  std::vector<std::size_t> order(graph.num_nodes());
  for (std::size_t v = 0; v < order.size(); ++v) order[v] = v;

  for (std::size_t it = 0; it < cfg.iterations; ++it) {
    order_rng.shuffle(order);
    double total = 0.0;
    for (std::size_t v : order) {
      Tensor agg = st.aggregate(v, sample_rng);
      Tensor rec = squared_frobenius(sub(st.embeddings().at(v), agg));
      double target = std::log(static_cast<double>(graph.degree(v)) + 1.0);
      Tensor reg = squared_frobenius(add_scalar(neg(st.degree_head(agg)), target));
      Tensor loss = add(rec, scale(reg, cfg.lambda));
      double value = loss.value();
      if (!std::isfinite(value))
        throw NumericError("drne: non-finite loss at iteration " + std::to_string(it));
      total += value;
      opt_x.zero_grad();
      opt_theta.zero_grad();
      backward(loss);
      opt_x.step_present();
      opt_theta.step_present();
    }
    result.loss_history.push_back(total);
  }
  return result;
}

// Embedding for a node not in the table, aggregated from its (existing)
// neighbors.
inline std::vector<double> embed_new_node(const State& state,
                                          const std::vector<std::size_t>& neighbor_ids,
                                          Rng& rng) {
  if (neighbor_ids.empty())
    throw InputError("drne embed_new_node: neighbor set is empty");
  for (std::size_t u : neighbor_ids)
    if (u >= state.graph().num_nodes())
      throw InputError("drne embed_new_node: unknown neighbor id " + std::to_string(u));
  auto capped =
      degree_biased_sample(state.graph(), neighbor_ids, state.config().cap, rng);
  return state.aggregate_list(capped).data();
}

// ---------------------------------------------------------------------------
// Constructive centrality check
// ---------------------------------------------------------------------------

enum class Centrality { degree, eigenvector, pagerank };

struct CentralityConstruction {
  LstmParams params;               // linear mode, k = 2
  Mat table;                       // per-node rows [F(v), C(v)]
  std::vector<double> centrality;  // C(v)
};

// Explicit linear-mode parameter setting whose second state coordinate
// accumulates sum_u F(u) C(u) over the input sequence, plus the matching
// per-node fixed-point table.
inline CentralityConstruction construct_centrality_weights(Centrality kind,
                                                           const Graph& g) {
  std::size_t n = g.num_nodes();
  if (n == 0) throw InputError("centrality construction: empty graph");
  for (std::size_t v = 0; v < n; ++v)
    if (g.degree(v) == 0)
      throw InputError("centrality construction: node " + std::to_string(v) +
                       " has degree 0");

  CentralityConstruction out;
  out.params.mode = LstmMode::linear;
  auto zeros_w = [](const std::string& name) {
    return Tensor::param({2, 4}, std::vector<double>(8, 0.0), name);
  };
  auto vec_b = [](const std::string& name, double second) {
    return Tensor::param({2}, {0.0, second}, name);
  };
  out.params.w_f = zeros_w("fix.w_f");
  out.params.w_o = zeros_w("fix.w_o");
  out.params.w_i = zeros_w("fix.w_i");
  out.params.w_c = zeros_w("fix.w_c");
  // second row sees [h0, h1, x0, x1]; select x0 for the input gate and x1
  // for the candidate cell
  out.params.w_i.mutable_data()[1 * 4 + 2] = 1.0;
  out.params.w_c.mutable_data()[1 * 4 + 3] = 1.0;
  out.params.b_f = vec_b("fix.b_f", 1.0);
  out.params.b_o = vec_b("fix.b_o", 1.0);
  out.params.b_i = vec_b("fix.b_i", 0.0);
  out.params.b_c = vec_b("fix.b_c", 0.0);
  out.params.gain = Tensor::param({2}, {1.0, 1.0}, "fix.gain");

  // The centralities are functions of the unweighted neighbor relation
  // (d_v = |N(v)|), so edge weights are binarized here.
  Mat s01 = adjacency(g);
  for (double& x : s01.v) x = x != 0.0 ? 1.0 : 0.0;

  std::vector<double> c(n), f(n);
  switch (kind) {
    case Centrality::degree:
      for (std::size_t v = 0; v < n; ++v) {
        c[v] = static_cast<double>(g.degree(v));
        f[v] = 1.0 / c[v];
      }
      break;
    case Centrality::eigenvector: {
      if (!g.connected())
        throw InputError("centrality construction: eigenvector needs a connected graph");
      auto [lambda, vec] = oracle::eigenvector_centrality(s01);
      for (std::size_t v = 0; v < n; ++v) {
        c[v] = vec[v];
        f[v] = 1.0 / lambda;
      }
      break;
    }
    case Centrality::pagerank: {
      Mat p = s01;
      for (std::size_t i = 0; i < n; ++i) {
        double d = 0.0;
        for (std::size_t j = 0; j < n; ++j) d += p(i, j);
        for (std::size_t j = 0; j < n; ++j) p(i, j) /= d;
      }
      auto pi = oracle::pagerank_stationary_from(p);
      for (std::size_t v = 0; v < n; ++v) {
        c[v] = pi[v];
        f[v] = 1.0 / static_cast<double>(g.degree(v));
      }
      break;
    }
  }

  out.table = Mat(n, 2);
  for (std::size_t v = 0; v < n; ++v) {
    out.table(v, 0) = f[v];
    out.table(v, 1) = c[v];
  }
  out.centrality = std::move(c);
  return out;
}

// Runs the linear-mode aggregation of the fixed-point table over N(v); the
// second coordinate of the result is the reproduced centrality C(v).
inline double aggregate_centrality(const CentralityConstruction& cc, const Graph& g,
                                   std::size_t v) {
  Tensor h = Tensor::zeros({2});
  Tensor c = Tensor::zeros({2});
  for (const auto& [u, w] : g.neighbors(v)) {
    Tensor x = Tensor::from({2}, {cc.table(u, 0), cc.table(u, 1)});
    auto [h2, c2] = lstm_cell(cc.params, h, c, x);
    h = h2;
    c = c2;
  }
  return h.at(1);
}

}  // namespace netemb::drne
