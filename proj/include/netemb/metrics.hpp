#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "netemb/error.hpp"
#include "netemb/mat.hpp"

namespace netemb {

using PairScorer = std::function<double(std::size_t, std::size_t)>;

// Fraction of the k highest-scored node pairs (i < j) that are true edges of
// S.
inline double reconstruction_precision_at_k(const Mat& s, std::size_t k,
                                            const PairScorer& scorer) {
  if (!s.square()) throw ShapeError("precision_at_k: adjacency must be square");
  std::size_t n = s.rows;
  std::size_t pairs = n * (n - 1) / 2;
  if (k == 0) throw InputError("precision_at_k: k must be positive");
  if (k > pairs)
    throw InputError("precision_at_k: k exceeds number of node pairs (" +
                     std::to_string(pairs) + ")");
  std::vector<std::pair<double, std::pair<std::size_t, std::size_t>>> scored;
  scored.reserve(pairs);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) scored.push_back({scorer(i, j), {i, j}});
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k),
                    scored.end(),
                    [](const auto& a, const auto& b) { return a.first > b.first; });
  std::size_t hits = 0;
  for (std::size_t t = 0; t < k; ++t)
    if (s(scored[t].second.first, scored[t].second.second) > 0.0) ++hits;
  return static_cast<double>(hits) / static_cast<double>(k);
}

// Probability that a random positive pair outscores a random negative pair,
// ties counting one half. Exhaustive comparison.
inline double link_prediction_auc(
    const std::vector<std::pair<std::size_t, std::size_t>>& positives,
    const std::vector<std::pair<std::size_t, std::size_t>>& negatives,
    const PairScorer& scorer) {
  if (positives.empty() || negatives.empty())
    throw InputError("auc: positive and negative sets must be non-empty");
  double wins = 0.0;
  for (const auto& p : positives) {
    double sp = scorer(p.first, p.second);
    for (const auto& q : negatives) {
      double sq = scorer(q.first, q.second);
      if (sp > sq)
        wins += 1.0;
      else if (sp == sq)
        wins += 0.5;
    }
  }
  return wins / (static_cast<double>(positives.size()) *
                 static_cast<double>(negatives.size()));
}

namespace detail {

// Average ranks, ties shared.
inline std::vector<double> ranks(const std::vector<double>& x) {
  std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> r(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
    double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) r[order[k]] = avg;
    i = j + 1;
  }
  return r;
}

}  // namespace detail

// Spearman rank correlation; throws on constant input (undefined).
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ShapeError("spearman: length mismatch");
  if (x.size() < 3) throw InputError("spearman: need at least 3 observations");
  auto constant = [](const std::vector<double>& v) {
    for (double a : v)
      if (a != v[0]) return false;
    return true;
  };
  if (constant(x) || constant(y))
    throw InputError("spearman: undefined for constant input");
  auto rx = detail::ranks(x);
  auto ry = detail::ranks(y);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= static_cast<double>(rx.size());
  my /= static_cast<double>(ry.size());
  double num = 0.0, dx = 0.0, dy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    num += (rx[i] - mx) * (ry[i] - my);
    dx += (rx[i] - mx) * (rx[i] - mx);
    dy += (ry[i] - my) * (ry[i] - my);
  }
  return num / std::sqrt(dx * dy);
}

// Rank correlation between the best single embedding coordinate and a
// centrality vector; "best" maximizes |rho|, the signed value is returned.
inline double centrality_correlation(const Mat& embeddings,
                                     const std::vector<double>& centrality) {
  if (embeddings.rows != centrality.size())
    throw ShapeError("centrality_correlation: row count mismatch");
  if (embeddings.rows < 3) throw InputError("centrality_correlation: need >= 3 nodes");
  double best = 0.0;
  bool any = false;
  for (std::size_t c = 0; c < embeddings.cols; ++c) {
    std::vector<double> col(embeddings.rows);
    for (std::size_t i = 0; i < embeddings.rows; ++i) col[i] = embeddings(i, c);
    bool is_const = true;
    for (double v : col) is_const = is_const && v == col[0];
    if (is_const) continue;
    double rho = spearman(col, centrality);
    if (!any || std::abs(rho) > std::abs(best)) {
      best = rho;
      any = true;
    }
  }
  if (!any) throw InputError("centrality_correlation: all coordinates constant");
  return best;
}

}  // namespace netemb
