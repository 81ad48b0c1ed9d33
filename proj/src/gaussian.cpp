#include "sail/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sail::nn {

double clamp_log_std(double log_std) { return std::clamp(log_std, kLogStdMin, kLogStdMax); }

std::vector<double> DiagGaussian::sample(Rng& rng) const {
  std::vector<double> out(mean.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = mean[i] + std::exp(clamp_log_std(log_std[i])) * rng.normal();
  return out;
}

double gaussian_log_prob(const DiagGaussian& d, const std::vector<double>& a) {
  if (a.size() != d.mean.size() || d.log_std.size() != d.mean.size())
    throw std::invalid_argument("gaussian_log_prob: dimension mismatch");
  constexpr double half_log_2pi = 0.9189385332046727;  // 1/2 log(2 pi)
  double lp = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double ls = clamp_log_std(d.log_std[i]);
    double z = (a[i] - d.mean[i]) / std::exp(ls);
    lp += -0.5 * z * z - ls - half_log_2pi;
  }
  return lp;
}

double gaussian_kl(const DiagGaussian& p, const DiagGaussian& q) {
  if (p.dim() != q.dim()) throw std::invalid_argument("gaussian_kl: dimension mismatch");
  double kl = 0.0;
  for (std::size_t i = 0; i < p.dim(); ++i) {
    double lsp = clamp_log_std(p.log_std[i]);
    double lsq = clamp_log_std(q.log_std[i]);
    double vp = std::exp(2.0 * lsp);
    double vq = std::exp(2.0 * lsq);
    double dm = p.mean[i] - q.mean[i];
    kl += lsq - lsp + (vp + dm * dm) / (2.0 * vq) - 0.5;
  }
  return kl;
}

}  // namespace sail::nn
