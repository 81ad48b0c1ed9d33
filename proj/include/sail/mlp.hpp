#pragma once

#include <vector>

#include "sail/rng.hpp"
#include "sail/tensor.hpp"

namespace sail::nn {

// Multilayer perceptron: rectifier on hidden layers, identity on the output.
// Default architecture is 3 hidden layers; width 64 at desk scale, 256 for
// the paper-faithful preset.
class Mlp {
 public:
  Mlp() = default;
  // layer_sizes = {input, hidden..., output}
  Mlp(std::vector<std::size_t> layer_sizes, Rng& rng);

  static Mlp make(std::size_t in, std::size_t out, Rng& rng, std::size_t hidden_width = 64,
                  std::size_t hidden_layers = 3);

  Tensor forward(const Tensor& x) const;

  const std::vector<std::size_t>& layer_sizes() const { return layer_sizes_; }
  std::size_t input_size() const { return layer_sizes_.front(); }
  std::size_t output_size() const { return layer_sizes_.back(); }

  std::vector<Tensor> params();
  std::vector<Tensor> params() const;  // same handles; tensors share nodes
  void zero_grad();

  // Convenience for plain-vector callers; wraps the input as a constant.
  std::vector<double> apply(const std::vector<double>& x) const;

  std::vector<Tensor>& weights() { return weights_; }
  std::vector<Tensor>& biases() { return biases_; }
  const std::vector<Tensor>& weights() const { return weights_; }
  const std::vector<Tensor>& biases() const { return biases_; }

 private:
  std::vector<std::size_t> layer_sizes_;
  std::vector<Tensor> weights_;  // [out, in] per layer
  std::vector<Tensor> biases_;   // [out] per layer
};

// d(net(x))/dx for a scalar-headed net; same shape as x. For a [B, d] input
// and a [B, 1] output the rows are independent, so the result holds each
// row's gradient. Parameter gradients are left untouched.
Tensor input_gradient(const Mlp& net, const Tensor& x);

}  // namespace sail::nn
