#pragma once

#include <array>
#include <span>
#include <vector>

#include "holo/encoding.hpp"
#include "holo/field.hpp"
#include "holo/forward_model.hpp"

namespace holo {

struct LossWeights {
  double image = 3.0;       // w1
  double laser = 0.05;      // w2
  double variation = 0.1;   // w3
  double scale = 0.1;       // w4, reward for a larger scale
  double epsilon_image = 0.01;

  void validate() const;
};

struct LossComponents {
  double image = 0.0;
  double laser = 0.0;
  double variation = 0.0;
};

/// Sum over planes and primaries of the per-pixel mean of (I' - s I)^2.
double image_loss(std::span<const IntensityImage> reconstructions,
                  std::span<const IntensityImage> targets, double scale);

/// Largest target value of each primary across all planes.
std::array<double, 3> channel_peaks(std::span<const IntensityImage> targets);

/// sum_p (sum_t l(p,t)^2 - max(I_p) s)^2
double laser_loss(const LaserSchedule& lasers, const std::array<double, 3>& peaks, double scale);
double laser_loss(const LaserSchedule& lasers, std::span<const IntensityImage> targets,
                  double scale);

/// Optional penalty sum_(p,t) max(0, floor - l(p,t))^2 against lasers stalling at zero.
double laser_floor_loss(const LaserSchedule& lasers, double floor);

/// Mean over pixels of the squared forward differences along both axes.
double total_variation(const RealGrid& grid);
/// Adds scale * d total_variation / d grid into `grad`.
void total_variation_gradient(const RealGrid& grid, double scale, RealGrid& grad);

/// Population standard deviation of all values.
double standard_deviation(const RealGrid& grid);
void standard_deviation_gradient(const RealGrid& grid, double scale, RealGrid& grad);

/// sum_t TV(mean+offset) + TV(mean-offset) + sigma(mean+offset) + sigma(mean-offset).
/// Returns 0 (and logs once) for unconstrained phase variables.
double variation_loss(const PhaseVariables& phases);

/// Factor-2 box downsampling; odd trailing rows/columns are dropped.
RealGrid box_downsample(const RealGrid& grid);

/// Sum of TV over `levels` pyramid levels of every channel of every reconstruction.
double pyramid_variation_loss(std::span<const IntensityImage> reconstructions, int levels);
double pyramid_variation(const RealGrid& grid, int levels);
void pyramid_variation_gradient(const RealGrid& grid, int levels, double scale, RealGrid& grad);

/// w1 L_image + w2 L_laser + w3 L_variation, minus w4 s when dynamic scaling is
/// active and L_image < epsilon_image.
double total_loss(const LossComponents& components, const LossWeights& weights, double scale,
                  bool dynamic_scale_active);

}  // namespace holo
