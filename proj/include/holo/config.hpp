#pragma once

#include <string>
#include <vector>

#include "holo/forward_model.hpp"
#include "holo/optimizer.hpp"
#include "holo/scene_io.hpp"

namespace holo {

struct OutputOptions {
  int phase_bits = 8;
  bool gamma_encode = true;
};

/// Everything one CLI invocation needs. Key schema (YAML):
///
///   display:   wavelengths_nm [3], anchor_nm, pitch_um, width, height,
///              aperture, phase_scale_inverse
///   scene:     planes [], distances_m [], gamma_decode, resize (pad|crop|scale),
///              scale  |  dynamic: {s_init, s_max, epsilon}
///   optimizer: lr, steps, T, seed, beta1, beta2, adam_epsilon,
///              weights: {w1, w2, w3, w4},
///              ablation: {no_phase_constraint, no_tv, no_laser},
///              pyramid_levels, phase_variation_weight, init_mean_range,
///              init_offset_range, laser_floor, laser_floor_level
///   output:    phase_bits, gamma_encode
///   compare:   scales []
struct RunConfig {
  DisplayConfig display;
  SceneSpec scene;
  OptimizerConfig optimizer;
  OutputOptions output;
  std::vector<double> compare_scales{1.0, 1.5, 2.0, 2.5, 3.0};
  /// Normalized YAML of the merged document; hashed into the manifest.
  std::string canonical;
};

/// Parses a config document. Each override is "dotted.key=value" with a YAML
/// scalar or flow value and replaces the key before validation. Errors name the
/// origin and line of the offending key.
RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides = {},
                       const std::string& origin = "<config>");

/// Reads a file; relative scene paths resolve against the file's directory.
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

}  // namespace holo
