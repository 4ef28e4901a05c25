#pragma once

#include <array>
#include <memory>
#include <span>
#include <vector>

#include "holo/field.hpp"
#include "holo/propagation.hpp"

namespace holo {

inline constexpr std::size_t kPrimaries = 3;

/// Normalized laser amplitudes l(p, t), one row per primary (R, G, B) and one
/// column per subframe. Every entry lies in [0, 1].
class LaserSchedule {
 public:
  LaserSchedule() = default;
  explicit LaserSchedule(std::size_t subframes, double fill = 0.0);

  std::size_t subframes() const { return subframes_; }
  double& operator()(std::size_t primary, std::size_t subframe) {
    return values_[primary * subframes_ + subframe];
  }
  double operator()(std::size_t primary, std::size_t subframe) const {
    return values_[primary * subframes_ + subframe];
  }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  /// Sum over subframes of l(p, t)^2: the light budget delivered to primary p.
  double power(std::size_t primary) const;
  void validate() const;

  /// Each primary lit at full amplitude in its own subframe only (T = 3).
  static LaserSchedule field_sequential();

 private:
  std::size_t subframes_ = 0;
  std::vector<double> values_;
};

struct DisplayConfig {
  std::array<double, 3> wavelengths{639e-9, 515e-9, 473e-9};  // meters, R G B
  double anchor_wavelength = 515e-9;                          // must equal one primary
  double pitch = 8.0e-6;
  std::size_t width = 1920;
  std::size_t height = 1080;
  std::vector<double> plane_distances{0.0};
  /// Square Fourier-plane pupil as a fraction of the Nyquist frequency. The
  /// pupil removes the checkerboard carrier of double-phase holograms; with
  /// 1.0 there is no filtering and a phase-only field at d = 0 has flat intensity.
  double aperture = 0.5;
  /// Use lambda_anchor / lambda_p instead of lambda_p / lambda_anchor.
  bool phase_scale_inverse = false;

  Shape shape() const { return {width, height}; }
  std::size_t anchor_index() const;
  void validate() const;
};

/// Multiplier applied to the SLM phase as seen by primary p.
double phase_scale(std::size_t primary, const DisplayConfig& config);

/// Transfer functions for every (plane, primary) of a display.
class DisplayKernels {
 public:
  DisplayKernels(const DisplayConfig& config, KernelCache& cache);
  const PropagationKernel& at(std::size_t plane, std::size_t primary) const {
    return *kernels_[plane][primary];
  }
  std::size_t planes() const { return kernels_.size(); }

 private:
  std::vector<std::array<std::shared_ptr<const PropagationKernel>, kPrimaries>> kernels_;
};

/// SLM field of one primary: amplitude * exp(i * scale * wrap(phase)).
void slm_field(const RealGrid& phase, double scale, double amplitude, std::span<Complex> out);

/// I'_p = sum_t | l(p,t) exp(i kappa_p phi_t) * h_p |^2 at one plane.
IntensityImage reconstruct_multicolor(std::span<const RealGrid> phases,
                                      const LaserSchedule& lasers, const DisplayConfig& config,
                                      std::size_t plane, KernelCache& cache);

/// I'_p = | exp(i phi_p) * h_p |^2, one phase map per primary, no cross illumination.
IntensityImage reconstruct_conventional(std::span<const RealGrid> phases,
                                        const DisplayConfig& config, std::size_t plane,
                                        KernelCache& cache);

std::vector<IntensityImage> reconstruct_multiplane(std::span<const RealGrid> phases,
                                                   const LaserSchedule& lasers,
                                                   const DisplayConfig& config,
                                                   KernelCache& cache);

}  // namespace holo
