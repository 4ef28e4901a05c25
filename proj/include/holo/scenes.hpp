#pragma once

#include <string>
#include <vector>

#include "holo/field.hpp"

namespace holo {

/// Procedural linear-intensity test targets in [0, 1]:
///   natural        sky gradient, sun, hill with a hard edge, blob and fine texture
///   colorful       independent sinusoids per channel
///   dark_sparse    a few small bright spots on black
///   bright_complex saturated, high-mean textured pattern
///   black          all zeros
///   gray           uniform 0.5
/// `brightness` multiplies the result (then clipped to [0, 1]).
IntensityImage make_scene(const std::string& name, std::size_t width, std::size_t height,
                          double brightness = 1.0);

std::vector<std::string> scene_names();

}  // namespace holo
