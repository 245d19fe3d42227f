#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "netemb/error.hpp"
#include "netemb/tensor.hpp"

namespace netemb {

enum class OptKind { sgd, adam, rmsprop };

struct OptConfig {
  OptKind kind = OptKind::adam;
  double lr = 0.001;
  double beta1 = 0.9;    // adam
  double beta2 = 0.999;  // adam
  double eps = 1e-8;
  double decay = 0.9;  // rmsprop moving-average factor
};

// First-order optimizer over a fixed parameter set. State buffers are keyed
// by parameter identity and match parameter shapes.
class Optimizer {
 public:
  Optimizer(OptConfig cfg, std::vector<Tensor> params)
      : cfg_(cfg), params_(std::move(params)) {}

  const std::vector<Tensor>& params() const { return params_; }
  std::size_t step_count() const { return step_count_; }

  // Applies one update using current gradients; every parameter must carry a
  // gradient.
  void step() {
    for (const Tensor& p : params_)
      if (!p.has_grad())
        throw Error("optimizer: missing gradient for parameter '" + p.name() + "'");
    apply(params_);
  }

  // Update restricted to parameters that received gradients this pass
  // (per-node / minibatch training touches only a subset).
  void step_present() {
    std::vector<Tensor> touched;
    for (const Tensor& p : params_)
      if (p.has_grad()) touched.push_back(p);
    apply(touched);
  }

  void zero_grad() {
    for (Tensor& p : params_) p.zero_grad();
  }

 private:
  struct State {
    std::vector<double> m;  // first moment / rms accumulator
    std::vector<double> v;  // second moment (adam)
    std::size_t t = 0;      // per-parameter step count
  };

  void apply(const std::vector<Tensor>& touched) {
    ++step_count_;
    for (const Tensor& p : touched) {
      auto& data = const_cast<Tensor&>(p).mutable_data();
      const auto& g = p.grad();
      State& st = state_[p.node()];
      switch (cfg_.kind) {
        case OptKind::sgd:
          for (std::size_t i = 0; i < data.size(); ++i) data[i] -= cfg_.lr * g[i];
          break;
        case OptKind::adam: {
          if (st.m.empty()) {
            st.m.assign(data.size(), 0.0);
            st.v.assign(data.size(), 0.0);
          }
          ++st.t;
          double b1t = 1.0 - std::pow(cfg_.beta1, static_cast<double>(st.t));
          double b2t = 1.0 - std::pow(cfg_.beta2, static_cast<double>(st.t));
          for (std::size_t i = 0; i < data.size(); ++i) {
            st.m[i] = cfg_.beta1 * st.m[i] + (1.0 - cfg_.beta1) * g[i];
            st.v[i] = cfg_.beta2 * st.v[i] + (1.0 - cfg_.beta2) * g[i] * g[i];
            double mhat = st.m[i] / b1t;
            double vhat = st.v[i] / b2t;
            data[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
          }
          break;
        }
        case OptKind::rmsprop: {
          if (st.m.empty()) st.m.assign(data.size(), 0.0);
          ++st.t;
          for (std::size_t i = 0; i < data.size(); ++i) {
            st.m[i] = cfg_.decay * st.m[i] + (1.0 - cfg_.decay) * g[i] * g[i];
            data[i] -= cfg_.lr * g[i] / (std::sqrt(st.m[i]) + cfg_.eps);
          }
          break;
        }
      }
    }
  }

  OptConfig cfg_;
  std::vector<Tensor> params_;
  std::unordered_map<detail::TensorNode*, State> state_;
  std::size_t step_count_ = 0;
};

// Compares analytic gradients of a re-buildable scalar loss against central
// finite differences. Returns max over parameter entries of
// |analytic - numeric| / max(1, |numeric|).
inline double finite_diff_check(const std::function<Tensor()>& make_loss,
                                const std::vector<Tensor>& params,
                                double step = 1e-5) {
  for (const Tensor& p : params) const_cast<Tensor&>(p).zero_grad();
  backward(make_loss());

  double worst = 0.0;
  for (const Tensor& p : params) {
    auto& data = const_cast<Tensor&>(p).mutable_data();
    for (std::size_t i = 0; i < data.size(); ++i) {
      double keep = data[i];
      data[i] = keep + step;
      double up = make_loss().value();
      data[i] = keep - step;
      double down = make_loss().value();
      data[i] = keep;
      double numeric = (up - down) / (2.0 * step);
      double analytic = p.has_grad() ? p.grad()[i] : 0.0;
      double err = std::abs(analytic - numeric) / std::max(1.0, std::abs(numeric));
      worst = std::max(worst, err);
    }
  }
  return worst;
}

}  // namespace netemb
