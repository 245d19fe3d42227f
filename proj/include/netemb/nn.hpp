#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "netemb/rng.hpp"
#include "netemb/tensor.hpp"

namespace netemb {

// Xavier-uniform weights: U(-limit, limit) with limit = sqrt(6/(fan_in+fan_out)).
inline std::vector<double> xavier_uniform(Rng& rng, std::size_t fan_in,
                                          std::size_t fan_out) {
  double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::vector<double> w(fan_in * fan_out);
  for (double& x : w) x = rng.uniform(-limit, limit);
  return w;
}

// Affine layer y = x W + b with W of shape {in, out}; activation is applied
// by the caller.
struct Dense {
  Tensor W;
  Tensor b;

  Dense() = default;
  Dense(Rng& rng, std::size_t in, std::size_t out, const std::string& name)
      : W(Tensor::param({in, out}, xavier_uniform(rng, in, out), name + ".W")),
        b(Tensor::param({out}, std::vector<double>(out, 0.0), name + ".b")) {}

  Tensor affine(const Tensor& x) const { return add(matmul(x, W), b); }

  void collect(std::vector<Tensor>& out) const {
    out.push_back(W);
    out.push_back(b);
  }
};

}  // namespace netemb
