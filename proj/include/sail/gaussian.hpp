#pragma once

#include <vector>

#include "sail/rng.hpp"

namespace sail::nn {

// Diagonal Gaussian over a vector, parameterized by mean and log standard
// deviation. log_std entries are clamped to [-10, 2] before use.
struct DiagGaussian {
  std::vector<double> mean;
  std::vector<double> log_std;

  std::size_t dim() const { return mean.size(); }
  std::vector<double> sample(Rng& rng) const;
};

inline constexpr double kLogStdMin = -10.0;
inline constexpr double kLogStdMax = 2.0;

double clamp_log_std(double log_std);

// Sum_i [ -1/2 ((a_i - mu_i)/sigma_i)^2 - log sigma_i - 1/2 log(2 pi) ]
double gaussian_log_prob(const DiagGaussian& d, const std::vector<double>& a);

// Analytic KL(p || q) for diagonal Gaussians of equal dimension. >= 0,
// exactly 0 when p == q.
double gaussian_kl(const DiagGaussian& p, const DiagGaussian& q);

}  // namespace sail::nn
