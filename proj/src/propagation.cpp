#include "holo/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "holo/fft.hpp"
#include "holo/simd.hpp"

namespace holo {
namespace {

double fft_frequency(std::size_t index, std::size_t n, double pitch) {
  const auto k = static_cast<double>(index);
  const auto len = static_cast<double>(n);
  return (index < n / 2 ? k : k - len) / (len * pitch);
}

void check_kernel_input(std::size_t n, const PropagationKernel& kernel) {
  if (n != kernel.field_shape.size()) {
    throw Error("field does not match kernel shape " + to_string(kernel.field_shape));
  }
}

}  // namespace

double band_limit_frequency(double wavelength, double distance, double frequency_step) {
  const double t = 2.0 * distance * frequency_step;
  return 1.0 / (wavelength * std::sqrt(t * t + 1.0));
}

PropagationKernel build_kernel(double wavelength, double distance, Shape shape, double pitch,
                               double aperture) {
  if (!(wavelength > 0.0) || !std::isfinite(wavelength)) throw Error("wavelength must be positive");
  if (!(pitch > 0.0) || !std::isfinite(pitch)) throw Error("pitch must be positive");
  if (!std::isfinite(distance)) throw Error("propagation distance must be finite");
  if (!(aperture > 0.0) || aperture > 1.0) throw Error("aperture must lie in (0, 1]");
  if (shape.width < 4 || shape.height < 4) {
    throw Error("propagation grid must be at least 4x4, got " + to_string(shape));
  }
  if (shape.width % 2 != 0 || shape.height % 2 != 0) {
    throw Error("propagation grid must have even dimensions, got " + to_string(shape));
  }

  PropagationKernel k;
  k.wavelength = wavelength;
  k.distance = distance;
  k.pitch = pitch;
  k.aperture = aperture;
  k.field_shape = shape;
  k.padded_shape = {2 * shape.width, 2 * shape.height};
  const std::size_t pw = k.padded_shape.width;
  const std::size_t ph = k.padded_shape.height;
  k.transfer.assign(pw * ph, Complex{});
  k.band_mask.assign(pw * ph, 0);

  const double limit_x = band_limit_frequency(wavelength, distance, 1.0 / (pw * pitch));
  const double limit_y = band_limit_frequency(wavelength, distance, 1.0 / (ph * pitch));
  const double pupil = aperture * 0.5 / pitch;
  const double inv_lambda2 = 1.0 / (wavelength * wavelength);
  const double tau = 2.0 * std::numbers::pi * distance;

  for (std::size_t y = 0; y < ph; ++y) {
    const double fy = fft_frequency(y, ph, pitch);
    for (std::size_t x = 0; x < pw; ++x) {
      const double fx = fft_frequency(x, pw, pitch);
      const double arg = inv_lambda2 - fx * fx - fy * fy;
      const bool in_band = arg > 0.0 && std::abs(fx) <= limit_x && std::abs(fy) <= limit_y &&
                           (aperture >= 1.0 || (std::abs(fx) <= pupil && std::abs(fy) <= pupil));
      if (!in_band) continue;
      const double phase = tau * std::sqrt(arg);
      k.transfer[y * pw + x] = Complex(std::cos(phase), std::sin(phase));
      k.band_mask[y * pw + x] = 1;
    }
  }
  return k;
}

void propagate_into(std::span<const Complex> in, const PropagationKernel& kernel,
                    std::span<Complex> out, bool adjoint) {
  check_kernel_input(in.size(), kernel);
  check_kernel_input(out.size(), kernel);
  const std::size_t w = kernel.field_shape.width;
  const std::size_t h = kernel.field_shape.height;
  const std::size_t pw = kernel.padded_shape.width;

  thread_local std::vector<Complex> padded;
  padded.assign(kernel.padded_shape.size(), Complex{});
  for (std::size_t y = 0; y < h; ++y) {
    std::copy_n(in.begin() + y * w, w, padded.begin() + y * pw);
  }
  fft2_inplace(padded, kernel.padded_shape);
  if (adjoint) {
    simd::multiply_conj(padded, kernel.transfer);
  } else {
    simd::multiply(padded, kernel.transfer);
  }
  ifft2_inplace(padded, kernel.padded_shape);
  for (std::size_t y = 0; y < h; ++y) {
    std::copy_n(padded.begin() + y * pw, w, out.begin() + y * w);
  }
}

ComplexField propagate(const ComplexField& field, const PropagationKernel& kernel) {
  require_same_shape(field.shape(), kernel.field_shape, "propagate");
  ComplexField out(field.width(), field.height(), field.pitch());
  propagate_into(field.values(), kernel, out.values(), false);
  return out;
}

ComplexField adjoint_propagate(const ComplexField& field, const PropagationKernel& kernel) {
  require_same_shape(field.shape(), kernel.field_shape, "adjoint_propagate");
  ComplexField out(field.width(), field.height(), field.pitch());
  propagate_into(field.values(), kernel, out.values(), true);
  return out;
}

std::shared_ptr<const PropagationKernel> KernelCache::get(double wavelength, double distance,
                                                          Shape shape, double pitch,
                                                          double aperture) {
  const Key key{wavelength, distance, shape.width, shape.height, pitch, aperture};
  {
    std::shared_lock lock(mutex_);
    if (auto it = kernels_.find(key); it != kernels_.end()) return it->second;
  }
  auto built = std::make_shared<const PropagationKernel>(
      build_kernel(wavelength, distance, shape, pitch, aperture));
  std::unique_lock lock(mutex_);
  auto [it, inserted] = kernels_.emplace(key, std::move(built));
  return it->second;
}

std::size_t KernelCache::size() const {
  std::shared_lock lock(mutex_);
  return kernels_.size();
}

}  // namespace holo
