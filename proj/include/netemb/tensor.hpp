#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "netemb/error.hpp"

namespace netemb {

using Shape = std::vector<std::size_t>;

inline std::size_t shape_numel(const Shape& s) {
  std::size_t n = 1;
  for (std::size_t d : s) n *= d;
  return n;
}

inline std::string shape_str(const Shape& s) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "x" : "") << s[i];
  os << ']';
  return os.str();
}

namespace detail {

struct TensorNode {
  Shape shape;
  std::vector<double> data;
  std::vector<double> grad;  // allocated on first use
  bool requires_grad = false;
  bool consumed = false;  // trace already spent by a backward pass
  std::string name;       // parameter name, empty for intermediates
  std::string op;         // producing op, empty for leaves
  std::vector<std::shared_ptr<TensorNode>> parents;
  std::function<void()> backprop;

  void ensure_grad() {
    if (grad.size() != data.size()) grad.assign(data.size(), 0.0);
  }
};

}  // namespace detail

// Dense double tensor participating in a dynamically built reverse-mode
// trace. Copying a Tensor copies the handle, not the buffer.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape) {
    return Tensor(std::move(shape), std::vector<double>(), 0.0);
  }

  static Tensor full(Shape shape, double fill) {
    return Tensor(std::move(shape), std::vector<double>(), fill);
  }

  static Tensor from(Shape shape, std::vector<double> data) {
    Tensor t = raw(std::move(shape), std::move(data));
    t.check_finite("constant");
    return t;
  }

  static Tensor scalar(double v) { return from({1}, {v}); }

  // Trainable leaf; the name shows up in optimizer diagnostics.
  static Tensor param(Shape shape, std::vector<double> data, std::string name) {
    Tensor t = from(std::move(shape), std::move(data));
    t.node_->requires_grad = true;
    t.node_->name = std::move(name);
    return t;
  }

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  std::size_t ndim() const { return node_->shape.size(); }
  std::size_t numel() const { return node_->data.size(); }
  std::size_t rows() const { return node_->shape.at(0); }
  std::size_t cols() const { return node_->shape.at(1); }

  const std::vector<double>& data() const { return node_->data; }
  std::vector<double>& mutable_data() { return node_->data; }

  double value() const {
    if (numel() != 1)
      throw ShapeError("value(): tensor " + shape_str(shape()) + " is not a scalar");
    return node_->data[0];
  }
  double at(std::size_t i) const { return node_->data.at(i); }
  double at(std::size_t i, std::size_t j) const {
    return node_->data.at(i * cols() + j);
  }

  bool requires_grad() const { return node_->requires_grad; }
  const std::string& name() const { return node_->name; }

  bool has_grad() const { return node_ && !node_->grad.empty(); }
  const std::vector<double>& grad() const {
    if (!has_grad()) throw Error("grad(): no gradient on tensor '" + node_->name + "'");
    return node_->grad;
  }
  void zero_grad() { node_->grad.clear(); }

  // Value copy with no trace and no gradient requirement.
  Tensor detach() const { return from(shape(), data()); }

  detail::TensorNode* node() const { return node_.get(); }
  const std::shared_ptr<detail::TensorNode>& node_ptr() const { return node_; }

  void check_finite(const std::string& op) const {
    for (double x : node_->data)
      if (!std::isfinite(x))
        throw NumericError("op '" + op + "': non-finite value produced");
  }

  static Tensor raw(Shape shape, std::vector<double> data) {
    if (shape_numel(shape) != data.size())
      throw ShapeError("tensor: data length " + std::to_string(data.size()) +
                       " does not match shape " + shape_str(shape));
    Tensor t;
    t.node_ = std::make_shared<detail::TensorNode>();
    t.node_->shape = std::move(shape);
    t.node_->data = std::move(data);
    return t;
  }

 private:
  Tensor(Shape shape, std::vector<double> data, double fill) {
    node_ = std::make_shared<detail::TensorNode>();
    std::size_t n = shape_numel(shape);
    node_->shape = std::move(shape);
    if (data.empty()) data.assign(n, fill);
    node_->data = std::move(data);
  }

  std::shared_ptr<detail::TensorNode> node_;
};

namespace detail {

// Attaches a result node to the trace. `backprop` may be empty when no parent
// needs gradients.
inline Tensor attach(const std::string& op, Shape shape, std::vector<double> data,
                     const std::vector<Tensor>& parents,
                     std::function<void()> backprop) {
  Tensor out = Tensor::raw(std::move(shape), std::move(data));
  out.check_finite(op);
  TensorNode* n = out.node();
  n->op = op;
  bool needs = false;
  for (const Tensor& p : parents) needs = needs || p.requires_grad();
  n->requires_grad = needs;
  if (needs) {
    for (const Tensor& p : parents) n->parents.push_back(p.node_ptr());
    n->backprop = std::move(backprop);
  }
  return out;
}

inline void add_into(TensorNode* dst, const std::vector<double>& src) {
  dst->ensure_grad();
  for (std::size_t i = 0; i < src.size(); ++i) dst->grad[i] += src[i];
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Elementwise binary ops with limited broadcasting: equal shapes, a scalar on
// either side, or a length-c vector against the rows of an r-by-c matrix.
// ---------------------------------------------------------------------------

namespace detail {

enum class Bcast { same, a_scalar, b_scalar, a_rowvec, b_rowvec };

inline Bcast broadcast_kind(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() == b.shape()) return Bcast::same;
  if (a.numel() == 1) return Bcast::a_scalar;
  if (b.numel() == 1) return Bcast::b_scalar;
  if (a.ndim() == 2 && b.ndim() == 1 && b.shape()[0] == a.shape()[1])
    return Bcast::b_rowvec;
  if (b.ndim() == 2 && a.ndim() == 1 && a.shape()[0] == b.shape()[1])
    return Bcast::a_rowvec;
  throw ShapeError(std::string(op) + ": incompatible shapes " + shape_str(a.shape()) +
                   " and " + shape_str(b.shape()));
}

// Element of the broadcast operand matching flat output index i.
inline std::size_t bidx(Bcast k, bool is_a, std::size_t i, std::size_t out_cols) {
  switch (k) {
    case Bcast::same:
      return i;
    case Bcast::a_scalar:
      return is_a ? 0 : i;
    case Bcast::b_scalar:
      return is_a ? i : 0;
    case Bcast::a_rowvec:
      return is_a ? i % out_cols : i;
    case Bcast::b_rowvec:
      return is_a ? i : i % out_cols;
  }
  return i;
}

template <typename Fwd, typename BwdA, typename BwdB>
Tensor binary_op(const char* name, const Tensor& a, const Tensor& b, Fwd fwd,
                 BwdA dfa, BwdB dfb) {
  Bcast k = broadcast_kind(a, b, name);
  const Tensor& big = (k == Bcast::a_scalar || k == Bcast::a_rowvec) ? b : a;
  Shape out_shape = big.shape();
  std::size_t out_cols = out_shape.size() == 2 ? out_shape[1] : shape_numel(out_shape);
  std::size_t n = shape_numel(out_shape);

  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = fwd(a.data()[bidx(k, true, i, out_cols)], b.data()[bidx(k, false, i, out_cols)]);

  Tensor result;
  auto* an = a.node();
  auto* bn = b.node();
  result = attach(name, out_shape, std::move(out), {a, b}, nullptr);
  auto* on = result.node();
  if (on->requires_grad) {
    bool aw = a.requires_grad(), bw = b.requires_grad();
    on->backprop = [an, bn, on, k, out_cols, n, aw, bw, dfa, dfb]() {
      if (aw) an->ensure_grad();
      if (bw) bn->ensure_grad();
      for (std::size_t i = 0; i < n; ++i) {
        double g = on->grad[i];
        std::size_t ia = bidx(k, true, i, out_cols);
        std::size_t ib = bidx(k, false, i, out_cols);
        double av = an->data[ia], bv = bn->data[ib];
        if (aw) an->grad[ia] += g * dfa(av, bv);
        if (bw) bn->grad[ib] += g * dfb(av, bv);
      }
    };
  }
  return result;
}

template <typename Fwd, typename Bwd>
Tensor unary_op(const char* name, const Tensor& a, Fwd fwd, Bwd dfdx) {
  std::size_t n = a.numel();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = fwd(a.data()[i]);
  Tensor result = attach(name, a.shape(), std::move(out), {a}, nullptr);
  auto* an = a.node();
  auto* on = result.node();
  if (on->requires_grad) {
    on->backprop = [an, on, n, dfdx]() {
      an->ensure_grad();
      for (std::size_t i = 0; i < n; ++i)
        an->grad[i] += on->grad[i] * dfdx(an->data[i], on->data[i]);
    };
  }
  return result;
}

}  // namespace detail

inline Tensor add(const Tensor& a, const Tensor& b) {
  return detail::binary_op(
      "add", a, b, [](double x, double y) { return x + y; },
      [](double, double) { return 1.0; }, [](double, double) { return 1.0; });
}

inline Tensor sub(const Tensor& a, const Tensor& b) {
  return detail::binary_op(
      "sub", a, b, [](double x, double y) { return x - y; },
      [](double, double) { return 1.0; }, [](double, double) { return -1.0; });
}

inline Tensor hadamard(const Tensor& a, const Tensor& b) {
  return detail::binary_op(
      "hadamard", a, b, [](double x, double y) { return x * y; },
      [](double, double y) { return y; }, [](double x, double) { return x; });
}

inline Tensor div(const Tensor& a, const Tensor& b) {
  return detail::binary_op(
      "div", a, b, [](double x, double y) { return x / y; },
      [](double, double y) { return 1.0 / y; },
      [](double x, double y) { return -x / (y * y); });
}

inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return sub(a, b); }

// ---------------------------------------------------------------------------
// Elementwise unary ops
// ---------------------------------------------------------------------------

inline Tensor sigmoid(const Tensor& a) {
  return detail::unary_op(
      "sigmoid", a,
      [](double x) {
        if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
        double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

inline Tensor tanh_t(const Tensor& a) {
  return detail::unary_op("tanh", a, [](double x) { return std::tanh(x); },
                          [](double, double y) { return 1.0 - y * y; });
}

inline Tensor relu(const Tensor& a) {
  return detail::unary_op("relu", a, [](double x) { return x > 0.0 ? x : 0.0; },
                          [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

// elu(x) + 1: smooth and strictly positive; variance heads use it.
inline Tensor elu_plus_one(const Tensor& a) {
  return detail::unary_op(
      "elu_plus_one", a,
      [](double x) { return x > 0.0 ? x + 1.0 : std::exp(x); },
      [](double x, double) { return x > 0.0 ? 1.0 : std::exp(x); });
}

inline Tensor exp_t(const Tensor& a) {
  return detail::unary_op("exp", a, [](double x) { return std::exp(x); },
                          [](double, double y) { return y; });
}

// Input clamped to >= 1e-12 before the log.
inline Tensor log_t(const Tensor& a) {
  constexpr double kClamp = 1e-12;
  return detail::unary_op(
      "log", a, [](double x) { return std::log(x < kClamp ? kClamp : x); },
      [](double x, double) { return 1.0 / (x < kClamp ? kClamp : x); });
}

// Derivative guarded near zero so identical-distribution corners stay finite.
inline Tensor sqrt_t(const Tensor& a) {
  return detail::unary_op(
      "sqrt", a, [](double x) { return std::sqrt(x); },
      [](double, double y) { return 0.5 / (y > 1e-12 ? y : 1e-12); });
}

inline Tensor neg(const Tensor& a) {
  return detail::unary_op("neg", a, [](double x) { return -x; },
                          [](double, double) { return -1.0; });
}

inline Tensor scale(const Tensor& a, double c) {
  return detail::unary_op("scale", a, [c](double x) { return c * x; },
                          [c](double, double) { return c; });
}

inline Tensor add_scalar(const Tensor& a, double c) {
  return detail::unary_op("add_scalar", a, [c](double x) { return x + c; },
                          [](double, double) { return 1.0; });
}

// Elementwise max(x, c); gradient flows only where x > c.
inline Tensor cmax(const Tensor& a, double c) {
  return detail::unary_op("cmax", a, [c](double x) { return x > c ? x : c; },
                          [c](double x, double) { return x > c ? 1.0 : 0.0; });
}

// ---------------------------------------------------------------------------
// Reductions
// ---------------------------------------------------------------------------

inline Tensor sum(const Tensor& a) {
  double s = 0.0;
  for (double x : a.data()) s += x;
  Tensor result = detail::attach("sum", {1}, {s}, {a}, nullptr);
  auto* an = a.node();
  auto* on = result.node();
  if (on->requires_grad) {
    on->backprop = [an, on]() {
      an->ensure_grad();
      for (double& g : an->grad) g += on->grad[0];
    };
  }
  return result;
}

inline Tensor squared_frobenius(const Tensor& a) {
  double s = 0.0;
  for (double x : a.data()) s += x * x;
  Tensor result = detail::attach("squared_frobenius", {1}, {s}, {a}, nullptr);
  auto* an = a.node();
  auto* on = result.node();
  if (on->requires_grad) {
    on->backprop = [an, on]() {
      an->ensure_grad();
      for (std::size_t i = 0; i < an->data.size(); ++i)
        an->grad[i] += 2.0 * an->data[i] * on->grad[0];
    };
  }
  return result;
}

inline Tensor mean(const Tensor& a) {
  return scale(sum(a), 1.0 / static_cast<double>(a.numel()));
}

inline Tensor dot(const Tensor& a, const Tensor& b) { return sum(hadamard(a, b)); }

// ---------------------------------------------------------------------------
// Linear algebra
// ---------------------------------------------------------------------------

inline Tensor matmul(const Tensor& a, const Tensor& b) {
  // Supported: {m,k}x{k,n}->{m,n}, {k}x{k,n}->{n}, {m,k}x{k}->{m}.
  std::size_t m, k, n;
  bool a_vec = a.ndim() == 1, b_vec = b.ndim() == 1;
  if (a_vec && b_vec)
    throw ShapeError("matmul: use dot() for two vectors, got " +
                     shape_str(a.shape()) + " and " + shape_str(b.shape()));
  m = a_vec ? 1 : a.shape()[0];
  k = a_vec ? a.shape()[0] : a.shape()[1];
  std::size_t bk = b_vec ? b.shape()[0] : b.shape()[0];
  n = b_vec ? 1 : b.shape()[1];
  if (k != bk)
    throw ShapeError("matmul: incompatible shapes " + shape_str(a.shape()) + " and " +
                     shape_str(b.shape()));

  std::vector<double> out(m * n, 0.0);
  const auto& ad = a.data();
  const auto& bd = b.data();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t p = 0; p < k; ++p) {
      double av = ad[i * k + p];
      if (av == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) out[i * n + j] += av * bd[p * n + j];
    }

  Shape out_shape;
  if (a_vec)
    out_shape = {n};
  else if (b_vec)
    out_shape = {m};
  else
    out_shape = {m, n};

  Tensor result = detail::attach("matmul", out_shape, std::move(out), {a, b}, nullptr);
  auto* an = a.node();
  auto* bn = b.node();
  auto* on = result.node();
  if (on->requires_grad) {
    bool aw = a.requires_grad(), bw = b.requires_grad();
    on->backprop = [an, bn, on, m, k, n, aw, bw]() {
      // dA = G B^T, dB = A^T G
      if (aw) {
        an->ensure_grad();
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t p = 0; p < k; ++p) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j)
              s += on->grad[i * n + j] * bn->data[p * n + j];
            an->grad[i * k + p] += s;
          }
      }
      if (bw) {
        bn->ensure_grad();
        for (std::size_t p = 0; p < k; ++p)
          for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < m; ++i)
              s += an->data[i * k + p] * on->grad[i * n + j];
            bn->grad[p * n + j] += s;
          }
      }
    };
  }
  return result;
}

inline Tensor transpose(const Tensor& a) {
  if (a.ndim() != 2) throw ShapeError("transpose: expected 2-D, got " + shape_str(a.shape()));
  std::size_t r = a.rows(), c = a.cols();
  std::vector<double> out(r * c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[j * r + i] = a.data()[i * c + j];
  Tensor result = detail::attach("transpose", {c, r}, std::move(out), {a}, nullptr);
  auto* an = a.node();
  auto* on = result.node();
  if (on->requires_grad) {
    on->backprop = [an, on, r, c]() {
      an->ensure_grad();
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) an->grad[i * c + j] += on->grad[j * r + i];
    };
  }
  return result;
}

inline Tensor outer(const Tensor& u, const Tensor& v) {
  if (u.ndim() != 1 || v.ndim() != 1)
    throw ShapeError("outer: expected vectors, got " + shape_str(u.shape()) + " and " +
                     shape_str(v.shape()));
  std::size_t m = u.numel(), n = v.numel();
  std::vector<double> out(m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] = u.data()[i] * v.data()[j];
  Tensor result = detail::attach("outer", {m, n}, std::move(out), {u, v}, nullptr);
  auto* un = u.node();
  auto* vn = v.node();
  auto* on = result.node();
  if (on->requires_grad) {
    bool uw = u.requires_grad(), vw = v.requires_grad();
    on->backprop = [un, vn, on, m, n, uw, vw]() {
      if (uw) {
        un->ensure_grad();
        for (std::size_t i = 0; i < m; ++i) {
          double s = 0.0;
          for (std::size_t j = 0; j < n; ++j) s += on->grad[i * n + j] * vn->data[j];
          un->grad[i] += s;
        }
      }
      if (vw) {
        vn->ensure_grad();
        for (std::size_t j = 0; j < n; ++j) {
          double s = 0.0;
          for (std::size_t i = 0; i < m; ++i) s += on->grad[i * n + j] * un->data[i];
          vn->grad[j] += s;
        }
      }
    };
  }
  return result;
}

inline Tensor diag(const Tensor& v) {
  if (v.ndim() != 1) throw ShapeError("diag: expected vector, got " + shape_str(v.shape()));
  std::size_t n = v.numel();
  std::vector<double> out(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) out[i * n + i] = v.data()[i];
  Tensor result = detail::attach("diag", {n, n}, std::move(out), {v}, nullptr);
  auto* vn = v.node();
  auto* on = result.node();
  if (on->requires_grad) {
    on->backprop = [vn, on, n]() {
      vn->ensure_grad();
      for (std::size_t i = 0; i < n; ++i) vn->grad[i] += on->grad[i * n + i];
    };
  }
  return result;
}

// ---------------------------------------------------------------------------
// Structural ops
// ---------------------------------------------------------------------------

inline Tensor concat(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw ShapeError("concat: no inputs");
  std::vector<double> out;
  for (const Tensor& p : parts) {
    if (p.ndim() > 1)
      throw ShapeError("concat: expected 1-D parts, got " + shape_str(p.shape()));
    out.insert(out.end(), p.data().begin(), p.data().end());
  }
  std::size_t total = out.size();
  Tensor result = detail::attach("concat", {total}, std::move(out), parts, nullptr);
  auto* on = result.node();
  if (on->requires_grad) {
    std::vector<detail::TensorNode*> nodes;
    std::vector<bool> wants;
    for (const Tensor& p : parts) {
      nodes.push_back(p.node());
      wants.push_back(p.requires_grad());
    }
    on->backprop = [nodes, wants, on]() {
      std::size_t off = 0;
      for (std::size_t pi = 0; pi < nodes.size(); ++pi) {
        std::size_t len = nodes[pi]->data.size();
        if (wants[pi]) {
          nodes[pi]->ensure_grad();
          for (std::size_t i = 0; i < len; ++i)
            nodes[pi]->grad[i] += on->grad[off + i];
        }
        off += len;
      }
    };
  }
  return result;
}

inline Tensor concat(const Tensor& a, const Tensor& b) { return concat(std::vector<Tensor>{a, b}); }

inline Tensor slice1d(const Tensor& a, std::size_t start, std::size_t len) {
  if (a.ndim() != 1) throw ShapeError("slice1d: expected 1-D, got " + shape_str(a.shape()));
  if (start + len > a.numel())
    throw ShapeError("slice1d: range [" + std::to_string(start) + ", " +
                     std::to_string(start + len) + ") exceeds length " +
                     std::to_string(a.numel()));
  std::vector<double> out(a.data().begin() + static_cast<std::ptrdiff_t>(start),
                          a.data().begin() + static_cast<std::ptrdiff_t>(start + len));
  Tensor result = detail::attach("slice1d", {len}, std::move(out), {a}, nullptr);
  auto* an = a.node();
  auto* on = result.node();
  if (on->requires_grad) {
    on->backprop = [an, on, start, len]() {
      an->ensure_grad();
      for (std::size_t i = 0; i < len; ++i) an->grad[start + i] += on->grad[i];
    };
  }
  return result;
}

inline Tensor block(const Tensor& a, std::size_t r0, std::size_t nr, std::size_t c0,
                    std::size_t nc) {
  if (a.ndim() != 2) throw ShapeError("block: expected 2-D, got " + shape_str(a.shape()));
  if (r0 + nr > a.rows() || c0 + nc > a.cols())
    throw ShapeError("block: window exceeds shape " + shape_str(a.shape()));
  std::size_t c = a.cols();
  std::vector<double> out(nr * nc);
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t j = 0; j < nc; ++j) out[i * nc + j] = a.data()[(r0 + i) * c + c0 + j];
  Tensor result = detail::attach("block", {nr, nc}, std::move(out), {a}, nullptr);
  auto* an = a.node();
  auto* on = result.node();
  if (on->requires_grad) {
    on->backprop = [an, on, r0, nr, c0, nc, c]() {
      an->ensure_grad();
      for (std::size_t i = 0; i < nr; ++i)
        for (std::size_t j = 0; j < nc; ++j)
          an->grad[(r0 + i) * c + c0 + j] += on->grad[i * nc + j];
    };
  }
  return result;
}

inline Tensor gather_rows(const Tensor& a, const std::vector<std::size_t>& idx) {
  if (a.ndim() != 2) throw ShapeError("gather_rows: expected 2-D, got " + shape_str(a.shape()));
  std::size_t c = a.cols();
  for (std::size_t i : idx)
    if (i >= a.rows())
      throw ShapeError("gather_rows: row " + std::to_string(i) + " out of range");
  std::vector<double> out(idx.size() * c);
  for (std::size_t r = 0; r < idx.size(); ++r)
    for (std::size_t j = 0; j < c; ++j) out[r * c + j] = a.data()[idx[r] * c + j];
  Tensor result =
      detail::attach("gather_rows", {idx.size(), c}, std::move(out), {a}, nullptr);
  auto* an = a.node();
  auto* on = result.node();
  if (on->requires_grad) {
    on->backprop = [an, on, idx, c]() {
      an->ensure_grad();
      for (std::size_t r = 0; r < idx.size(); ++r)
        for (std::size_t j = 0; j < c; ++j)
          an->grad[idx[r] * c + j] += on->grad[r * c + j];
    };
  }
  return result;
}

// Extracts row i of a 2-D tensor as a vector.
inline Tensor row(const Tensor& a, std::size_t i) {
  Tensor b = block(a, i, 1, 0, a.cols());
  // reshape {1,c} -> {c}
  b.node()->shape = {a.cols()};
  return b;
}

// ---------------------------------------------------------------------------
// Linear solve with gradients through the solution (implicit function of the
// system entries): X = A^{-1} B, dB = A^{-T} G, dA = -dB X^T.
// ---------------------------------------------------------------------------

namespace detail {

// LU decomposition with partial pivoting, in place. Returns permutation.
inline std::vector<std::size_t> lu_factor(std::vector<double>& a, std::size_t n) {
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    double best = std::abs(a[col * n + col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      double v = std::abs(a[r * n + col]);
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best < 1e-12) throw NumericError("solve: singular matrix");
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a[col * n + j], a[piv * n + j]);
      std::swap(perm[col], perm[piv]);
    }
    double d = a[col * n + col];
    for (std::size_t r = col + 1; r < n; ++r) {
      double f = a[r * n + col] / d;
      a[r * n + col] = f;
      for (std::size_t j = col + 1; j < n; ++j) a[r * n + j] -= f * a[col * n + j];
    }
  }
  return perm;
}

inline void lu_solve_vec(const std::vector<double>& lu, const std::vector<std::size_t>& perm,
                         std::size_t n, const double* b, double* x) {
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[perm[i]];
    for (std::size_t j = 0; j < i; ++j) s -= lu[i * n + j] * y[j];
    y[i] = s;
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t j = ii + 1; j < n; ++j) s -= lu[ii * n + j] * x[j];
    x[ii] = s / lu[ii * n + ii];
  }
}

}  // namespace detail

inline Tensor solve(const Tensor& a, const Tensor& b) {
  if (a.ndim() != 2 || a.rows() != a.cols())
    throw ShapeError("solve: A must be square, got " + shape_str(a.shape()));
  std::size_t n = a.rows();
  bool b_vec = b.ndim() == 1;
  std::size_t c = b_vec ? 1 : b.cols();
  if ((b_vec ? b.numel() : b.rows()) != n)
    throw ShapeError("solve: B shape " + shape_str(b.shape()) + " does not match A " +
                     shape_str(a.shape()));

  std::vector<double> lu = a.data();
  std::vector<std::size_t> perm = detail::lu_factor(lu, n);

  // Column-by-column forward solve.
  std::vector<double> bt(n * c);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < c; ++j) bt[j * n + i] = b.data()[b_vec ? i : i * c + j];
  std::vector<double> xt(n * c);
  for (std::size_t j = 0; j < c; ++j)
    detail::lu_solve_vec(lu, perm, n, &bt[j * n], &xt[j * n]);
  std::vector<double> out(n * c);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < c; ++j) out[b_vec ? i : i * c + j] = xt[j * n + i];

  Tensor result = detail::attach("solve", b.shape(), std::move(out), {a, b}, nullptr);
  auto* an = a.node();
  auto* bn = b.node();
  auto* on = result.node();
  if (on->requires_grad) {
    bool aw = a.requires_grad(), bw = b.requires_grad();
    on->backprop = [an, bn, on, n, c, b_vec, aw, bw]() {
      // Solve A^T W = G column-wise via LU of A^T (reuse LU of A by
      // factoring the transpose once here; n is small at desk scale).
      std::vector<double> at(n * n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) at[i * n + j] = an->data[j * n + i];
      auto permT = detail::lu_factor(at, n);
      std::vector<double> w(n * c);
      std::vector<double> gcol(n), wcol(n);
      for (std::size_t j = 0; j < c; ++j) {
        for (std::size_t i = 0; i < n; ++i) gcol[i] = on->grad[b_vec ? i : i * c + j];
        detail::lu_solve_vec(at, permT, n, gcol.data(), wcol.data());
        for (std::size_t i = 0; i < n; ++i) w[j * n + i] = wcol[i];
      }
      if (bw) {
        bn->ensure_grad();
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < c; ++j)
            bn->grad[b_vec ? i : i * c + j] += w[j * n + i];
      }
      if (aw) {
        an->ensure_grad();
        // dA_{ip} = -sum_j W_{ij} X_{pj}
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t p = 0; p < n; ++p) {
            double s = 0.0;
            for (std::size_t j = 0; j < c; ++j)
              s += w[j * n + i] * on->data[b_vec ? p : p * c + j];
            an->grad[i * n + p] -= s;
          }
      }
    };
  }
  return result;
}

// ---------------------------------------------------------------------------
// Backward pass
// ---------------------------------------------------------------------------

inline void backward(const Tensor& loss) {
  if (loss.numel() != 1)
    throw Error("backward: loss must be scalar, got shape " + shape_str(loss.shape()));
  detail::TensorNode* root = loss.node();
  if (root->consumed)
    throw Error("backward: trace already consumed; rebuild the forward pass");

  // Post-order DFS: every node is appended after all of its inputs, so the
  // reverse walk reaches a node only once all of its consumers have run.
  std::vector<detail::TensorNode*> order;
  std::unordered_set<detail::TensorNode*> seen;
  std::vector<std::pair<detail::TensorNode*, bool>> dfs{{root, false}};
  while (!dfs.empty()) {
    auto [n, done] = dfs.back();
    dfs.pop_back();
    if (done) {
      order.push_back(n);
      continue;
    }
    if (!seen.insert(n).second) continue;
    if (n->consumed)
      throw Error("backward: trace already consumed; rebuild the forward pass");
    dfs.push_back({n, true});
    for (auto& p : n->parents) dfs.push_back({p.get(), false});
  }

  root->ensure_grad();
  root->grad[0] = 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    detail::TensorNode* n = *it;
    if (n->backprop && n->requires_grad) n->backprop();
  }
  // Free the trace; leaves keep their gradients.
  for (detail::TensorNode* n : order) {
    if (!n->op.empty()) {
      n->consumed = true;
      n->backprop = nullptr;
      n->parents.clear();
    }
  }
}

}  // namespace netemb
