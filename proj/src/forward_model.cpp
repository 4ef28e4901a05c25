#include "holo/forward_model.hpp"

#include <cmath>

#include "holo/encoding.hpp"
#include "holo/simd.hpp"

namespace holo {

LaserSchedule::LaserSchedule(std::size_t subframes, double fill)
    : subframes_(subframes), values_(kPrimaries * subframes, fill) {}

double LaserSchedule::power(std::size_t primary) const {
  double sum = 0.0;
  for (std::size_t t = 0; t < subframes_; ++t) sum += (*this)(primary, t) * (*this)(primary, t);
  return sum;
}

void LaserSchedule::validate() const {
  if (subframes_ == 0) throw Error("laser schedule has no subframes");
  for (double v : values_) {
    if (!(v >= 0.0 && v <= 1.0)) throw Error("laser amplitudes must lie in [0, 1]");
  }
}

LaserSchedule LaserSchedule::field_sequential() {
  LaserSchedule s(kPrimaries);
  for (std::size_t p = 0; p < kPrimaries; ++p) s(p, p) = 1.0;
  return s;
}

std::size_t DisplayConfig::anchor_index() const {
  for (std::size_t p = 0; p < kPrimaries; ++p) {
    if (wavelengths[p] == anchor_wavelength) return p;
  }
  throw Error("anchor wavelength must equal one of the primary wavelengths");
}

void DisplayConfig::validate() const {
  for (double w : wavelengths) {
    if (!(w > 0.0) || !std::isfinite(w)) throw Error("wavelengths must be positive");
  }
  (void)anchor_index();
  if (!(pitch > 0.0) || !std::isfinite(pitch)) throw Error("pitch must be positive");
  if (width < 4 || height < 4 || width % 2 || height % 2) {
    throw Error("display dimensions must be even and at least 4");
  }
  if (plane_distances.empty()) throw Error("at least one plane distance is required");
  for (double d : plane_distances) {
    if (!std::isfinite(d)) throw Error("plane distances must be finite");
  }
  if (!(aperture > 0.0) || aperture > 1.0) throw Error("aperture must lie in (0, 1]");
}

double phase_scale(std::size_t primary, const DisplayConfig& config) {
  if (primary >= kPrimaries) throw Error("primary index out of range");
  const double anchor = config.wavelengths[config.anchor_index()];
  const double lambda = config.wavelengths[primary];
  return config.phase_scale_inverse ? anchor / lambda : lambda / anchor;
}

DisplayKernels::DisplayKernels(const DisplayConfig& config, KernelCache& cache) {
  config.validate();
  for (double d : config.plane_distances) {
    std::array<std::shared_ptr<const PropagationKernel>, kPrimaries> row;
    for (std::size_t p = 0; p < kPrimaries; ++p) {
      row[p] = cache.get(config.wavelengths[p], d, config.shape(), config.pitch, config.aperture);
    }
    kernels_.push_back(std::move(row));
  }
}

void slm_field(const RealGrid& phase, double scale, double amplitude, std::span<Complex> out) {
  const auto in = phase.values();
  for (std::size_t i = 0; i < in.size(); ++i) {
    const double theta = scale * wrap_phase(in[i]);
    out[i] = Complex(amplitude * std::cos(theta), amplitude * std::sin(theta));
  }
}

namespace {

void check_phases(std::span<const RealGrid> phases, const DisplayConfig& config,
                  std::size_t expected) {
  config.validate();
  if (phases.size() != expected) {
    throw Error("expected " + std::to_string(expected) + " phase maps, got " +
                std::to_string(phases.size()));
  }
  for (const auto& p : phases) require_same_shape(config.shape(), p.shape(), "phase map");
}

}  // namespace

IntensityImage reconstruct_multicolor(std::span<const RealGrid> phases,
                                      const LaserSchedule& lasers, const DisplayConfig& config,
                                      std::size_t plane, KernelCache& cache) {
  check_phases(phases, config, lasers.subframes());
  lasers.validate();
  if (plane >= config.plane_distances.size()) throw Error("plane index out of range");

  IntensityImage out(config.width, config.height);
  std::vector<Complex> slm(config.shape().size());
  std::vector<Complex> image(slm.size());
  for (std::size_t p = 0; p < kPrimaries; ++p) {
    const auto kernel = cache.get(config.wavelengths[p], config.plane_distances[plane],
                                  config.shape(), config.pitch, config.aperture);
    const double kappa = phase_scale(p, config);
    for (std::size_t t = 0; t < lasers.subframes(); ++t) {
      const double amplitude = lasers(p, t);
      if (amplitude == 0.0) continue;
      slm_field(phases[t], kappa, amplitude, slm);
      propagate_into(slm, *kernel, image);
      simd::accumulate_intensity(image, 1.0, out.channels[p].values());
    }
  }
  return out;
}

IntensityImage reconstruct_conventional(std::span<const RealGrid> phases,
                                        const DisplayConfig& config, std::size_t plane,
                                        KernelCache& cache) {
  check_phases(phases, config, kPrimaries);
  if (plane >= config.plane_distances.size()) throw Error("plane index out of range");

  IntensityImage out(config.width, config.height);
  std::vector<Complex> slm(config.shape().size());
  std::vector<Complex> image(slm.size());
  for (std::size_t p = 0; p < kPrimaries; ++p) {
    const auto kernel = cache.get(config.wavelengths[p], config.plane_distances[plane],
                                  config.shape(), config.pitch, config.aperture);
    slm_field(phases[p], 1.0, 1.0, slm);
    propagate_into(slm, *kernel, image);
    simd::accumulate_intensity(image, 1.0, out.channels[p].values());
  }
  return out;
}

std::vector<IntensityImage> reconstruct_multiplane(std::span<const RealGrid> phases,
                                                   const LaserSchedule& lasers,
                                                   const DisplayConfig& config,
                                                   KernelCache& cache) {
  if (config.plane_distances.empty()) throw Error("at least one plane distance is required");
  std::vector<IntensityImage> out;
  out.reserve(config.plane_distances.size());
  for (std::size_t q = 0; q < config.plane_distances.size(); ++q) {
    out.push_back(reconstruct_multicolor(phases, lasers, config, q, cache));
  }
  return out;
}

}  // namespace holo
