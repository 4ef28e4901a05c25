#include "holo/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace holo {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_bits(int bits) {
  if (bits < 1 || bits > 16) throw Error("quantization bits must lie in [1, 16]");
}

}  // namespace

void PhaseVariables::validate() const {
  if (mean.empty() || mean.size() > 3) throw Error("subframe count must be 1, 2 or 3");
  if (!offset.empty() && offset.size() != mean.size()) {
    throw Error("offset phase count does not match mean phase count");
  }
  for (const auto& m : mean) require_same_shape(mean[0].shape(), m.shape(), "mean phases");
  for (const auto& o : offset) require_same_shape(mean[0].shape(), o.shape(), "offset phases");
}

RealGrid interlace(const RealGrid& mean, const RealGrid& offset) {
  require_same_shape(mean.shape(), offset.shape(), "interlace");
  RealGrid out(mean.width(), mean.height());
  for (std::size_t y = 0; y < mean.height(); ++y) {
    for (std::size_t x = 0; x < mean.width(); ++x) {
      out(x, y) = plus_parity(x, y) ? mean(x, y) + offset(x, y) : mean(x, y) - offset(x, y);
    }
  }
  return out;
}

void interlace_adjoint(const RealGrid& d_phase, RealGrid& d_mean, RealGrid& d_offset) {
  require_same_shape(d_phase.shape(), d_mean.shape(), "interlace adjoint");
  require_same_shape(d_phase.shape(), d_offset.shape(), "interlace adjoint");
  for (std::size_t y = 0; y < d_phase.height(); ++y) {
    for (std::size_t x = 0; x < d_phase.width(); ++x) {
      const double g = d_phase(x, y);
      d_mean(x, y) += g;
      d_offset(x, y) += plus_parity(x, y) ? g : -g;
    }
  }
}

double wrap_phase(double phase) {
  if (phase >= -kPi && phase < kPi) return phase;
  double wrapped = phase - kTwoPi * std::floor((phase + kPi) / kTwoPi);
  // Rounding can land exactly on +pi for inputs just below an odd multiple of pi.
  if (wrapped >= kPi) wrapped -= kTwoPi;
  if (wrapped < -kPi) wrapped = -kPi;
  return wrapped;
}

RealGrid wrap_phase(const RealGrid& phase) {
  RealGrid out(phase.width(), phase.height());
  for (std::size_t i = 0; i < phase.size(); ++i) out.values()[i] = wrap_phase(phase.values()[i]);
  return out;
}

std::uint32_t quantize_phase(double phase, int bits) {
  check_bits(bits);
  if (!std::isfinite(phase)) throw Error("cannot quantize a non-finite phase");
  const double levels = std::ldexp(1.0, bits);
  const double position = (wrap_phase(phase) + kPi) / kTwoPi * levels - 0.5;
  const double rounded = std::floor(position + 0.5);
  return static_cast<std::uint32_t>(std::clamp(rounded, 0.0, levels - 1.0));
}

std::vector<std::uint16_t> quantize_phase(const RealGrid& phase, int bits) {
  std::vector<std::uint16_t> out(phase.size());
  for (std::size_t i = 0; i < phase.size(); ++i) {
    out[i] = static_cast<std::uint16_t>(quantize_phase(phase.values()[i], bits));
  }
  return out;
}

double dequantize_phase(std::uint32_t level, int bits) {
  check_bits(bits);
  const double levels = std::ldexp(1.0, bits);
  if (level >= levels) throw Error("quantized level out of range");
  return -kPi + (static_cast<double>(level) + 0.5) * kTwoPi / levels;
}

}  // namespace holo
