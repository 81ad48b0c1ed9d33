#pragma once

#include <cstddef>
#include <vector>

#include "sail/tensor.hpp"

namespace sail::nn {

// Adam with bias correction over a fixed list of parameter tensors.
// Betas/epsilon are community-standard values; the learning rate default
// is 3e-4.
class Adam {
 public:
  explicit Adam(std::vector<Tensor> params, double lr = 3e-4, double beta1 = 0.9,
                double beta2 = 0.999, double epsilon = 1e-8);

  // One update from the gradients currently stored on the parameters.
  // Throws std::runtime_error (and leaves parameters untouched) on a
  // non-finite gradient.
  void step();

  void zero_grad();

  std::size_t step_count() const { return step_count_; }
  double lr() const { return lr_; }
  void set_lr(double lr) { lr_ = lr; }
  const std::vector<Tensor>& params() const { return params_; }
  const std::vector<std::vector<double>>& first_moment() const { return m_; }
  const std::vector<std::vector<double>>& second_moment() const { return v_; }

 private:
  std::vector<Tensor> params_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  std::size_t step_count_ = 0;
  double lr_, beta1_, beta2_, epsilon_;
};

}  // namespace sail::nn
