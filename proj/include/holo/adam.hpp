#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace holo {

struct AdamConfig {
  double learning_rate = 0.015;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const;
};

/// Bias-corrected Adam over a flat parameter vector. Moments only advance on
/// step(), so a caller can freeze a parameter group by not stepping it.
class Adam {
 public:
  Adam() = default;
  Adam(std::size_t size, AdamConfig config);

  void step(std::span<double> params, std::span<const double> grads);
  std::size_t size() const { return m_.size(); }
  std::size_t iterations() const { return iterations_; }
  const AdamConfig& config() const { return config_; }

 private:
  AdamConfig config_;
  std::vector<double> m_, v_;
  std::size_t iterations_ = 0;
};

}  // namespace holo
