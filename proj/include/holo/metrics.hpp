#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "holo/field.hpp"

namespace holo {

/// Returned by psnr() for identical images.
inline constexpr double kPsnrCap = 100.0;

/// 10 log10(peak^2 / MSE) over all pixels (and channels); kPsnrCap when MSE is 0.
double psnr(const RealGrid& reference, const RealGrid& test, double peak);
double psnr(const IntensityImage& reference, const IntensityImage& test, double peak);

/// Gaussian-window SSIM (11x11, sigma 1.5), mean over valid window positions.
/// C1 = (0.01 peak)^2, C2 = (0.03 peak)^2. The RGB overload averages channels.
double ssim(const RealGrid& reference, const RealGrid& test, double peak = 1.0);
double ssim(const IntensityImage& reference, const IntensityImage& test, double peak = 1.0);

struct Region {
  std::size_t x = 0, y = 0, width = 0, height = 0;
};

/// (I_max - I_min) / (I_max + I_min) with I_max, I_min the means of the two regions.
double michelson_contrast(const RealGrid& image, const Region& bright, const Region& dark);
/// Same with arbitrary pixel masks.
double michelson_contrast(const RealGrid& image, const std::vector<bool>& bright,
                          const std::vector<bool>& dark);

struct Histogram {
  double low = 0.0;
  double high = 1.0;
  std::array<std::vector<std::size_t>, 3> counts;

  std::size_t bins() const { return counts[0].size(); }
  double bin_low(std::size_t b) const;
  double bin_high(std::size_t b) const;
};

/// Per-channel counts over [low, high]; values outside the range land in the end bins.
Histogram channel_histograms(const IntensityImage& image, std::size_t bins, double low,
                             double high);

/// 1 - sum(min(p, q)) of the normalized histograms, averaged over channels; 0 for equal
/// distributions, 1 for disjoint ones.
double histogram_distance(const Histogram& a, const Histogram& b);

/// CSV with columns bin_low, bin_high, count_r, count_g, count_b.
std::string histogram_csv(const Histogram& h);

struct MetricReport {
  double psnr_db = 0.0;
  std::array<double, 3> channel_psnr_db{};
  double ssim = 0.0;
  double michelson = 0.0;
  double histogram_distance = 0.0;
  Histogram target_histogram;
  Histogram reconstruction_histogram;
};

/// Compares a reconstruction against a target shown at scale s. Both are
/// normalized by s (reconstruction / s against the [0, 1] target). Michelson
/// contrast uses the brightest and darkest tenth of the target's pixels as regions.
MetricReport evaluate(const IntensityImage& target, const IntensityImage& reconstruction,
                      double scale, std::size_t bins = 64);

}  // namespace holo
