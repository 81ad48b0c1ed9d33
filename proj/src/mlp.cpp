#include "sail/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace sail::nn {

Mlp::Mlp(std::vector<std::size_t> layer_sizes, Rng& rng) : layer_sizes_(std::move(layer_sizes)) {
  if (layer_sizes_.size() < 2) throw std::invalid_argument("Mlp needs at least input and output sizes");
  for (std::size_t l = 0; l + 1 < layer_sizes_.size(); ++l) {
    std::size_t in = layer_sizes_[l], out = layer_sizes_[l + 1];
    // He-style uniform init for the rectifier layers.
    double bound = std::sqrt(6.0 / static_cast<double>(in));
    weights_.push_back(Tensor::param({out, in}, rng.uniform_vec(out * in, -bound, bound)));
    biases_.push_back(Tensor::param({out}, std::vector<double>(out, 0.0)));
  }
}

Mlp Mlp::make(std::size_t in, std::size_t out, Rng& rng, std::size_t hidden_width,
              std::size_t hidden_layers) {
  std::vector<std::size_t> sizes;
  sizes.push_back(in);
  for (std::size_t i = 0; i < hidden_layers; ++i) sizes.push_back(hidden_width);
  sizes.push_back(out);
  return Mlp(std::move(sizes), rng);
}

Tensor Mlp::forward(const Tensor& x) const {
  if (x.cols() != input_size())
    throw std::invalid_argument("Mlp::forward: input " + shape_str(x.shape()) + " vs expected width " +
                                std::to_string(input_size()));
  Tensor h = x;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    h = linear(h, weights_[l], biases_[l]);
    if (l + 1 < weights_.size()) h = relu(h);
  }
  return h;
}

std::vector<Tensor> Mlp::params() {
  std::vector<Tensor> out;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    out.push_back(weights_[l]);
    out.push_back(biases_[l]);
  }
  return out;
}

std::vector<Tensor> Mlp::params() const {
  std::vector<Tensor> out;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    out.push_back(weights_[l]);
    out.push_back(biases_[l]);
  }
  return out;
}

void Mlp::zero_grad() {
  for (auto& w : weights_) w.zero_grad();
  for (auto& b : biases_) b.zero_grad();
}

std::vector<double> Mlp::apply(const std::vector<double>& x) const {
  Tensor t = Tensor::constant({x.size()}, x);
  return forward(t).data();
}

Tensor input_gradient(const Mlp& net, const Tensor& x) {
  if (net.output_size() != 1)
    throw std::invalid_argument("input_gradient: net head must be scalar, got width " +
                                std::to_string(net.output_size()));
  // Save parameter gradients; backward() below accumulates into them too.
  auto params = net.params();
  std::vector<bool> had(params.size());
  std::vector<std::vector<double>> saved(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    had[i] = params[i].has_grad();
    if (had[i]) saved[i] = params[i].grad();
  }

  Tensor probe = Tensor::param(x.shape(), x.data());
  Tensor y = net.forward(probe);
  backward(sum(y));
  Tensor out = Tensor::constant(x.shape(), probe.grad());

  for (std::size_t i = 0; i < params.size(); ++i) {
    if (had[i])
      params[i].set_grad(std::move(saved[i]));
    else
      params[i].clear_grad();
  }
  return out;
}

}  // namespace sail::nn
