#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <shared_mutex>
#include <tuple>
#include <vector>

#include "holo/field.hpp"

namespace holo {

/// Band-limited angular spectrum transfer function on the 2x zero-padded grid.
///
/// Inside the band H(fx, fy) = exp(i 2 pi d sqrt(1/lambda^2 - fx^2 - fy^2)); the
/// band excludes evanescent frequencies, frequencies past the aliasing-free
/// limit 1 / (lambda sqrt((2 d df)^2 + 1)) per axis, and anything outside the
/// optional square pupil |f| <= aperture * f_nyquist per axis.
struct PropagationKernel {
  double wavelength = 0.0;  // meters
  double distance = 0.0;    // meters, negative for back-propagation
  double pitch = 0.0;       // meters
  double aperture = 1.0;    // fraction of the Nyquist frequency, in (0, 1]
  Shape field_shape;        // unpadded
  Shape padded_shape;
  std::vector<Complex> transfer;
  std::vector<std::uint8_t> band_mask;
};

/// Per-axis aliasing-free frequency limit of the band-limited angular spectrum method.
double band_limit_frequency(double wavelength, double distance, double frequency_step);

PropagationKernel build_kernel(double wavelength, double distance, Shape shape, double pitch,
                               double aperture = 1.0);

/// Zero-pad to 2x per axis, transform, apply H, invert, crop.
ComplexField propagate(const ComplexField& field, const PropagationKernel& kernel);

/// Exact adjoint of propagate (same pipeline with conj(H)).
ComplexField adjoint_propagate(const ComplexField& field, const PropagationKernel& kernel);

/// Span-based variants used by the optimizer; `out` must have the field size.
void propagate_into(std::span<const Complex> in, const PropagationKernel& kernel,
                    std::span<Complex> out, bool adjoint = false);

/// Thread-safe kernel store keyed by (wavelength, distance, shape, pitch, aperture).
class KernelCache {
 public:
  std::shared_ptr<const PropagationKernel> get(double wavelength, double distance, Shape shape,
                                               double pitch, double aperture = 1.0);
  std::size_t size() const;

 private:
  using Key = std::tuple<double, double, std::size_t, std::size_t, double, double>;
  mutable std::shared_mutex mutex_;
  std::map<Key, std::shared_ptr<const PropagationKernel>> kernels_;
};

}  // namespace holo
