#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "netemb/error.hpp"
#include "netemb/graph.hpp"
#include "netemb/mat.hpp"
#include "netemb/nn.hpp"
#include "netemb/optim.hpp"
#include "netemb/rng.hpp"
#include "netemb/tensor.hpp"

namespace netemb::sdne {

struct Config {
  std::vector<std::size_t> hidden = {64};  // encoder widths between n and dim
  std::size_t dim = 16;
  double alpha = 0.05;  // first-order weight
  double nu = 1e-4;     // L2 weight penalty
  double beta = 5.0;    // reconstruction penalty on observed entries
  std::size_t epochs = 200;
  std::size_t batch = 0;  // 0 = full batch
  double lr = 0.01;
  double tol = 1e-5;          // relative loss change counted as converged
  std::size_t patience = 10;  // consecutive converged epochs before stopping
  std::uint64_t seed = 1;

  void validate() const {
    if (dim == 0) throw InputError("sdne: dim must be positive");
    if (beta < 1.0) throw InputError("sdne: beta must be >= 1");
    if (alpha < 0.0 || nu < 0.0) throw InputError("sdne: alpha and nu must be >= 0");
  }
};

// Deep autoencoder over adjacency rows; all layers use sigmoid activations.
class Model {
 public:
  Model() = default;

  Model(std::size_t n, const Config& cfg, Rng& rng) : input_dim_(n), dim_(cfg.dim) {
    std::vector<std::size_t> sizes;
    sizes.push_back(n);
    sizes.insert(sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
    sizes.push_back(cfg.dim);
    for (std::size_t k = 0; k + 1 < sizes.size(); ++k)
      enc_.emplace_back(rng, sizes[k], sizes[k + 1], "enc" + std::to_string(k));
    for (std::size_t k = sizes.size() - 1; k > 0; --k)
      dec_.emplace_back(rng, sizes[k], sizes[k - 1],
                        "dec" + std::to_string(sizes.size() - 1 - k));
  }

  std::size_t input_dim() const { return input_dim_; }
  std::size_t embed_dim() const { return dim_; }
  const std::vector<Dense>& encoder() const { return enc_; }
  const std::vector<Dense>& decoder() const { return dec_; }
  std::vector<Dense>& encoder() { return enc_; }
  std::vector<Dense>& decoder() { return dec_; }

  // Traced encode; accepts a row {n} or a batch {B, n}.
  Tensor encode(const Tensor& x) const {
    check_width(x, input_dim_, "encode");
    Tensor h = x;
    for (const Dense& l : enc_) h = sigmoid(l.affine(h));
    return h;
  }

  // Traced decode; reconstruction entries land in (0, 1).
  Tensor decode(const Tensor& y) const {
    check_width(y, dim_, "decode");
    Tensor h = y;
    for (const Dense& l : dec_) h = sigmoid(l.affine(h));
    return h;
  }

  std::vector<double> encode_row(const std::vector<double>& row) const {
    return encode(Tensor::from({row.size()}, row)).data();
  }

  std::vector<Tensor> parameters() const {
    std::vector<Tensor> ps;
    for (const Dense& l : enc_) l.collect(ps);
    for (const Dense& l : dec_) l.collect(ps);
    return ps;
  }

 private:
  static void check_width(const Tensor& t, std::size_t want, const char* where) {
    std::size_t got = t.ndim() == 1 ? t.shape()[0] : t.shape()[1];
    if (got != want)
      throw ShapeError(std::string("sdne ") + where + ": input width " +
                       std::to_string(got) + " does not match model width " +
                       std::to_string(want));
  }

  std::size_t input_dim_ = 0;
  std::size_t dim_ = 0;
  std::vector<Dense> enc_;
  std::vector<Dense> dec_;
};

// || (Xhat - X) * B ||_F^2 with mask entries beta where x != 0 and 1
// elsewhere.
inline Tensor loss_second_order(const Tensor& x, const Tensor& xhat, double beta) {
  if (x.shape() != xhat.shape())
    throw ShapeError("sdne loss_second_order: shape mismatch " + shape_str(x.shape()) +
                     " vs " + shape_str(xhat.shape()));
  std::vector<double> mask(x.numel());
  for (std::size_t i = 0; i < mask.size(); ++i)
    mask[i] = x.data()[i] != 0.0 ? beta : 1.0;
  return squared_frobenius(hadamard(sub(xhat, x), Tensor::from(x.shape(), mask)));
}

// sum_ij s_ij ||y_i - y_j||^2 computed in trace form 2 tr(Y^T L Y).
inline Tensor loss_first_order(const Mat& s, const Tensor& y) {
  if (s.rows != y.rows())
    throw ShapeError("sdne loss_first_order: S rows " + std::to_string(s.rows) +
                     " vs Y rows " + std::to_string(y.rows()));
  Mat l = laplacian(s);
  Tensor lt = Tensor::from({l.rows, l.cols}, l.v);
  return scale(sum(hadamard(y, matmul(lt, y))), 2.0);
}

// 0.5 * sum_k (||W_k||_F^2 + ||What_k||_F^2); biases are not penalized.
inline Tensor loss_weight_reg(const Model& model) {
  Tensor acc = Tensor::scalar(0.0);
  for (const Dense& l : model.encoder()) acc = add(acc, squared_frobenius(l.W));
  for (const Dense& l : model.decoder()) acc = add(acc, squared_frobenius(l.W));
  return scale(acc, 0.5);
}

// L_2nd + alpha L_1st + nu L_reg for one batch with batch-internal pairs.
inline Tensor loss_mix(const Model& model, const Mat& s_batch, const Tensor& x,
                       const Tensor& y, const Tensor& xhat, double alpha, double nu,
                       double beta) {
  Tensor loss = loss_second_order(x, xhat, beta);
  if (alpha != 0.0) loss = add(loss, scale(loss_first_order(s_batch, y), alpha));
  if (nu != 0.0) loss = add(loss, scale(loss_weight_reg(model), nu));
  return loss;
}

struct TrainResult {
  Model model;
  Mat embeddings;  // one row per node
  std::vector<double> loss_history;
  std::size_t epochs_run = 0;
};

inline TrainResult train(const Graph& graph, const Config& cfg) {
  cfg.validate();
  std::size_t n = graph.num_nodes();
  if (n == 0) throw InputError("sdne: empty graph");
  Rng rng(cfg.seed);
  Rng init_rng = rng.substream("init");
  Rng batch_rng = rng.substream("batch");

  Model model(n, cfg, init_rng);
  Optimizer opt({OptKind::adam, cfg.lr}, model.parameters());
  Mat s = adjacency(graph);  // X = S

  std::size_t batch = cfg.batch == 0 ? n : std::min(cfg.batch, n);
  std::vector<std::size_t> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = i;

  TrainResult result;
  std::size_t calm = 0;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.batch != 0) batch_rng.shuffle(ids);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += batch) {
      std::size_t stop = std::min(start + batch, n);
      std::size_t b = stop - start;
      std::vector<double> rows(b * n);
      Mat s_batch(b, b);
      for (std::size_t r = 0; r < b; ++r) {
        std::size_t node = ids[start + r];
        for (std::size_t c = 0; c < n; ++c) rows[r * n + c] = s(node, c);
        for (std::size_t r2 = 0; r2 < b; ++r2) s_batch(r, r2) = s(node, ids[start + r2]);
      }
      Tensor x = Tensor::from({b, n}, rows);
      Tensor y = model.encode(x);
      Tensor xhat = model.decode(y);
      Tensor loss = loss_mix(model, s_batch, x, y, xhat, cfg.alpha, cfg.nu, cfg.beta);
      double value = loss.value();
      if (!std::isfinite(value))
        throw NumericError("sdne: non-finite loss at epoch " + std::to_string(epoch));
      epoch_loss += value;
      opt.zero_grad();
      backward(loss);
      opt.step();
    }
    result.loss_history.push_back(epoch_loss);
    result.epochs_run = epoch + 1;
    if (result.loss_history.size() >= 2) {
      double prev = result.loss_history[result.loss_history.size() - 2];
      double rel = std::abs(prev - epoch_loss) / std::max(1e-12, std::abs(prev));
      calm = rel < cfg.tol ? calm + 1 : 0;
      if (calm >= cfg.patience) break;
    }
  }

  result.embeddings = Mat(n, cfg.dim);
  Tensor all = Tensor::from({n, n}, s.v);
  Tensor y = model.encode(all);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < cfg.dim; ++c) result.embeddings(i, c) = y.at(i, c);
  result.model = model;
  return result;
}

// Out-of-sample embedding from the new vertex's adjacency row. The row must
// have at least one connection to existing vertices.
inline std::vector<double> embed_new_vertex(const Model& model,
                                            const std::vector<double>& row) {
  if (row.size() != model.input_dim())
    throw ShapeError("sdne embed_new_vertex: row length " + std::to_string(row.size()) +
                     " does not match node count " + std::to_string(model.input_dim()));
  bool any = false;
  for (double w : row) any = any || w != 0.0;
  if (!any)
    throw InputError(
        "sdne embed_new_vertex: new vertex has no connections to existing "
        "vertices, its embedding is undefined");
  return model.encode_row(row);
}

}  // namespace netemb::sdne
