#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "holo/encoding.hpp"
#include "holo/field.hpp"
#include "holo/forward_model.hpp"
#include "holo/losses.hpp"
#include "holo/propagation.hpp"

namespace holo {

/// Everything that stays fixed during one optimization: targets, display,
/// kernels, weights, and which loss terms and variables are active.
struct Problem {
  DisplayConfig display;
  std::vector<IntensityImage> targets;  // one per plane
  LossWeights weights;

  std::array<bool, 3> active_primaries{true, true, true};
  std::array<double, 3> phase_scales{1.0, 1.0, 1.0};

  bool phase_variation = true;  // double-phase TV + std term
  double phase_variation_weight = 1.0;  // relative to the pyramid term, both under w3
  int pyramid_levels = 3;       // reconstruction TV pyramid, 0 disables
  bool use_laser_loss = true;
  bool use_laser_floor = false;
  double laser_floor = 0.05;

  /// When set, lasers are constants taken from `fixed_lasers` and receive no gradient.
  bool lasers_fixed = false;
  LaserSchedule fixed_lasers;

  std::vector<std::array<std::shared_ptr<const PropagationKernel>, 3>> kernels;

  std::size_t planes() const { return targets.size(); }
  Shape shape() const { return display.shape(); }
  /// Builds kernels and validates targets against the display. Phase scales are set by the caller.
  void prepare(KernelCache& cache);
};

/// Unconstrained optimization variables. Laser amplitudes are sigmoid(laser_raw).
struct Variables {
  PhaseVariables phases;
  std::vector<double> laser_raw;  // 3 x T, row-major by primary
  double scale = 1.0;

  std::size_t subframes() const { return phases.subframes(); }
  LaserSchedule lasers() const;
  /// Interlaced (or direct) SLM phase of every subframe, before wrapping.
  std::vector<RealGrid> slm_phases() const;
};

struct GradientSet {
  std::vector<RealGrid> d_mean;
  std::vector<RealGrid> d_offset;
  std::vector<double> d_laser_raw;
  double d_scale = 0.0;

  /// Flattens into the same order as flatten(Variables).
  std::vector<double> flatten() const;
  bool finite() const;
};

std::vector<double> flatten(const Variables& vars);
void unflatten(std::span<const double> flat, Variables& vars);

/// Intermediates of one forward evaluation needed by backward().
struct ForwardRecord {
  std::vector<RealGrid> slm_phases;                       // per subframe, unwrapped
  LaserSchedule lasers;
  std::vector<std::vector<Complex>> phasors;              // [p * T + t], unit modulus
  std::vector<std::vector<Complex>> fields;               // [(q * 3 + p) * T + t]
  std::vector<IntensityImage> reconstructions;            // per plane
  LossComponents components;
  bool scale_bonus = false;
  double total = 0.0;
};

double sigmoid(double x);
double logit(double p);

ForwardRecord forward(const Problem& problem, const Variables& vars, bool scale_bonus);
GradientSet backward(const Problem& problem, const Variables& vars, const ForwardRecord& record);

/// Compares backward() against central finite differences on `phase_samples`
/// random phase coordinates plus every laser and scale variable. Returns the
/// largest |g - fd| / max(|g|, |fd|, floor).
struct GradientCheck {
  double max_relative_error = 0.0;
  std::size_t coordinates = 0;
};
GradientCheck check_gradients(const Problem& problem, const Variables& point, double step,
                              std::size_t phase_samples, std::uint64_t seed,
                              bool scale_bonus = false, double floor = 1e-7);

}  // namespace holo
