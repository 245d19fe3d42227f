#pragma once

// Brute-force / independent reference implementations used by the test
// harness and the selftest command. Each oracle deliberately avoids the code
// path of the quantity it checks: dense linear algebra goes through Eigen,
// sums are written out directly.

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <vector>

#include "netemb/error.hpp"
#include "netemb/graph.hpp"
#include "netemb/mat.hpp"
#include "netemb/rng.hpp"

namespace netemb::oracle {

inline Eigen::MatrixXd to_eigen(const Mat& m) {
  Eigen::MatrixXd e(m.rows, m.cols);
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) e(i, j) = m(i, j);
  return e;
}

inline double min_eigenvalue_sym(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(to_eigen(m));
  return solver.eigenvalues().minCoeff();
}

inline bool cholesky_succeeds(const Mat& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(to_eigen(m));
  return llt.info() == Eigen::Success;
}

// Principal eigenpair of the adjacency matrix by shifted power iteration
// (S + I keeps the iteration from oscillating on bipartite graphs).
// Returns {lambda, v} with v normalized to unit L2 norm and positive entries.
inline std::pair<double, std::vector<double>> eigenvector_centrality(const Mat& s,
                                                                     int iters = 200) {
  if (!s.square()) throw ShapeError("eigenvector_centrality: matrix not square");
  std::size_t n = s.rows;
  std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  for (int it = 0; it < iters; ++it) {
    std::vector<double> w(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) w[i] += s(i, j) * v[j];
      w[i] += v[i];  // shift
    }
    double norm = 0.0;
    for (double x : w) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) throw NumericError("eigenvector_centrality: zero iterate");
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / norm;
  }
  double lambda = 0.0;  // Rayleigh quotient v^T S v
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) lambda += v[i] * s(i, j) * v[j];
  return {lambda, v};
}

// Stationary distribution of the random walk given its row-stochastic
// transition matrix, via lazy power iteration of P^T. Normalized to sum 1.
inline std::vector<double> pagerank_stationary_from(const Mat& p, int iters = 500) {
  std::size_t n = p.rows;
  std::vector<double> pi(n, 1.0 / static_cast<double>(n));
  for (int it = 0; it < iters; ++it) {
    std::vector<double> next(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) next[j] += pi[i] * p(i, j);
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      next[j] = 0.5 * next[j] + 0.5 * pi[j];  // lazy walk, same fixed point
      total += next[j];
    }
    for (double& x : next) x /= total;
    pi = next;
  }
  return pi;
}

// PageRank without teleport on an undirected graph (simple-walk stationary
// distribution).
inline std::vector<double> pagerank_stationary(const Graph& g, int iters = 500) {
  return pagerank_stationary_from(transition(g), iters);
}

// Monte Carlo estimate of the 2-Wasserstein distance between two 1-D
// Gaussians using the quantile coupling: both samples are monotone
// transforms of one shared standard normal draw.
inline double quantile_w2_gaussian_1d(double mu1, double var1, double mu2, double var2,
                                      std::size_t samples, Rng& rng) {
  double s1 = std::sqrt(var1), s2 = std::sqrt(var2);
  double acc = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    double z = rng.normal();
    double d = (mu1 + s1 * z) - (mu2 + s2 * z);
    acc += d * d;
  }
  return std::sqrt(acc / static_cast<double>(samples));
}

// GP conditional mean through the covariance route: K = M^{-1} computed
// densely, then z_* = K_{*,x} K_{x,x}^{-1} z_x. The production path works on
// the precision side; agreement between the two is the block-inverse
// identity.
inline std::vector<double> gp_conditional_dense(const Mat& m, std::size_t n_old,
                                                const std::vector<double>& z_x) {
  if (!m.square()) throw ShapeError("gp_conditional_dense: matrix not square");
  if (z_x.size() != n_old) throw ShapeError("gp_conditional_dense: z_x length mismatch");
  std::size_t total = m.rows;
  std::size_t n_new = total - n_old;
  Eigen::MatrixXd k = to_eigen(m).inverse();
  Eigen::MatrixXd k_xx = k.topLeftCorner(static_cast<Eigen::Index>(n_old),
                                         static_cast<Eigen::Index>(n_old));
  Eigen::MatrixXd k_sx = k.bottomLeftCorner(static_cast<Eigen::Index>(n_new),
                                            static_cast<Eigen::Index>(n_old));
  Eigen::VectorXd z(static_cast<Eigen::Index>(n_old));
  for (std::size_t i = 0; i < n_old; ++i) z(static_cast<Eigen::Index>(i)) = z_x[i];
  Eigen::VectorXd out = k_sx * k_xx.ldlt().solve(z);
  std::vector<double> result(n_new);
  for (std::size_t i = 0; i < n_new; ++i) result[i] = out(static_cast<Eigen::Index>(i));
  return result;
}

// Explicit double sum of the Laplacian-eigenmaps penalty
// sum_ij s_ij ||y_i - y_j||^2.
inline double first_order_loss_pairwise(const Mat& s, const Mat& y) {
  if (s.rows != y.rows) throw ShapeError("first_order_loss_pairwise: row mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < s.rows; ++i)
    for (std::size_t j = 0; j < s.cols; ++j) {
      if (s(i, j) == 0.0) continue;
      double d2 = 0.0;
      for (std::size_t c = 0; c < y.cols; ++c) {
        double d = y(i, c) - y(j, c);
        d2 += d * d;
      }
      acc += s(i, j) * d2;
    }
  return acc;
}

// Exhaustive count of hyperedges containing both endpoints.
inline std::size_t count_cooccurrence(const HyperGraph& h, std::size_t a, std::size_t b) {
  std::size_t count = 0;
  for (const auto& e : h.edges()) {
    bool ha = false, hb = false;
    for (std::size_t v : e) {
      ha = ha || v == a;
      hb = hb || v == b;
    }
    if (ha && hb) ++count;
  }
  return count;
}

// Mean embedding of a node's in-sample neighbors; the naive out-of-sample
// baseline. Falls back to the zero vector for nodes with no in-sample
// neighbor.
inline std::vector<double> mean_of_neighbors(
    const Graph& g_evolved, std::size_t node,
    const std::vector<std::vector<double>>& in_sample_embeddings,
    const std::vector<bool>& is_in_sample, std::size_t dim) {
  std::vector<double> acc(dim, 0.0);
  std::size_t count = 0;
  for (const auto& [u, w] : g_evolved.neighbors(node)) {
    if (!is_in_sample[u]) continue;
    for (std::size_t c = 0; c < dim; ++c) acc[c] += in_sample_embeddings[u][c];
    ++count;
  }
  if (count > 0)
    for (double& x : acc) x /= static_cast<double>(count);
  return acc;
}

}  // namespace netemb::oracle
