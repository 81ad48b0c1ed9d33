#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace sail::nn {

namespace detail {

// One node of the gradient tape. Nodes are created during the forward pass;
// `pull` distributes this node's gradient into its parents.
struct Node {
  std::vector<std::size_t> shape;
  std::vector<double> value;
  std::vector<double> grad;
  bool requires_grad = false;
  bool leaf = true;
  bool consumed = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> pull;

  std::size_t numel() const { return value.size(); }
  void ensure_grad() {
    if (grad.size() != value.size()) grad.assign(value.size(), 0.0);
  }
};

}  // namespace detail

// Dense tensor of 64-bit floats, rank 1 or 2, participating in a tape-based
// reverse-mode gradient when requires_grad is set anywhere upstream.
// Value-semantic handle; copies share the underlying node.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(std::vector<std::size_t> shape);
  // Non-differentiable value.
  static Tensor constant(std::vector<std::size_t> shape, std::vector<double> data);
  static Tensor scalar(double v) { return constant({1}, {v}); }
  // Differentiable leaf (a trainable parameter or a probed input).
  static Tensor param(std::vector<std::size_t> shape, std::vector<double> data);

  bool defined() const { return node_ != nullptr; }
  const std::vector<std::size_t>& shape() const { return node_->shape; }
  std::size_t numel() const { return node_->numel(); }
  std::size_t rows() const { return node_->shape.size() == 2 ? node_->shape[0] : 1; }
  std::size_t cols() const { return node_->shape.back(); }

  const std::vector<double>& data() const { return node_->value; }
  // Mutable access for optimizers; only meaningful on leaves.
  std::vector<double>& raw() { return node_->value; }

  bool requires_grad() const { return node_->requires_grad; }
  bool has_grad() const { return node_->grad.size() == node_->value.size(); }
  const std::vector<double>& grad() const;
  void zero_grad();
  void set_grad(std::vector<double> g);
  // Drop gradient storage entirely (back to the no-grad state).
  void clear_grad() { node_->grad.clear(); }

  double item() const;

  detail::Node* node() const { return node_.get(); }
  const std::shared_ptr<detail::Node>& node_shared() const { return node_; }

 private:
  explicit Tensor(std::shared_ptr<detail::Node> n) : node_(std::move(n)) {}
  std::shared_ptr<detail::Node> node_;

  friend Tensor make_op(std::vector<std::size_t> shape, std::vector<double> value,
                        std::vector<Tensor> parents,
                        std::function<void(detail::Node&)> pull);
};

// Elementwise / structural ops. Shapes are validated; mismatches throw
// std::invalid_argument naming both shapes.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor add_scalar(const Tensor& a, double c);
Tensor mul_scalar(const Tensor& a, double c);
Tensor neg(const Tensor& a);
// Broadcast a length-d vector across the rows of a [B, d] tensor.
Tensor add_row(const Tensor& x, const Tensor& v);
Tensor mul_row(const Tensor& x, const Tensor& v);
Tensor relu(const Tensor& a);
Tensor exp(const Tensor& a);
Tensor square(const Tensor& a);
Tensor softplus(const Tensor& a);
Tensor minimum(const Tensor& a, const Tensor& b);
Tensor clamp(const Tensor& a, double lo, double hi);
Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);
// Row-wise sum of a [B, d] tensor -> [B, 1].
Tensor row_sum(const Tensor& a);
Tensor slice_cols(const Tensor& a, std::size_t start, std::size_t len);
Tensor concat_cols(const Tensor& a, const Tensor& b);
// y = x * W^T + b with x: [B, in], W: [out, in], b: [out].
Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b);

inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return sub(a, b); }
inline Tensor operator*(const Tensor& a, const Tensor& b) { return mul(a, b); }

// Reverse pass from a one-element loss. Accumulates d(loss)/d(leaf) into
// every requires_grad leaf reachable through the tape, then marks the
// traversed interior nodes consumed and releases their parent links.
void backward(const Tensor& scalar_loss);

std::string shape_str(const std::vector<std::size_t>& s);

}  // namespace sail::nn
