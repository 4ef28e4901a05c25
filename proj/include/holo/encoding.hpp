#pragma once

#include <cstdint>
#include <vector>

#include "holo/field.hpp"

namespace holo {

/// Double-phase variables for T subframes. When the phase constraint is
/// disabled `offset` is empty and `mean` holds the per-pixel SLM phase directly.
struct PhaseVariables {
  std::vector<RealGrid> mean;
  std::vector<RealGrid> offset;

  std::size_t subframes() const { return mean.size(); }
  bool constrained() const { return !offset.empty(); }
  void validate() const;
};

/// True where the checkerboard uses mean + offset. Pixel indices start at 0.
inline bool plus_parity(std::size_t x, std::size_t y) { return ((x + y) & 1U) != 0; }

/// phi = mean + offset where x + y is odd, mean - offset where x + y is even.
RealGrid interlace(const RealGrid& mean, const RealGrid& offset);

/// Adjoint of interlace: accumulates d_phase into d_mean and +/- d_phase into d_offset.
void interlace_adjoint(const RealGrid& d_phase, RealGrid& d_mean, RealGrid& d_offset);

/// Maps to the congruent value in [-pi, pi).
double wrap_phase(double phase);
RealGrid wrap_phase(const RealGrid& phase);

/// Bin-centred linear map of [-pi, pi) onto 0 .. 2^bits - 1 with round-half-up.
/// The phase is wrapped first; bits must lie in [1, 16].
std::uint32_t quantize_phase(double phase, int bits);
std::vector<std::uint16_t> quantize_phase(const RealGrid& phase, int bits);

/// Inverse of quantize_phase; the round trip error is at most pi / 2^bits.
double dequantize_phase(std::uint32_t level, int bits);

}  // namespace holo
