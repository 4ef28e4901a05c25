#include "holo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>

namespace holo {

namespace {

double squared_error(const RealGrid& a, const RealGrid& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.values()[i] - b.values()[i];
    sum += d * d;
  }
  return sum;
}

double to_db(double mse, double peak) {
  if (mse == 0.0) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(peak * peak / mse));
}

void check_peak(double peak) {
  if (!(peak > 0.0) || !std::isfinite(peak)) throw Error("psnr peak must be positive");
}

constexpr int kWindow = 11;
constexpr double kSigma = 1.5;

std::array<double, kWindow> gaussian_taps() {
  std::array<double, kWindow> taps{};
  double sum = 0.0;
  for (int i = 0; i < kWindow; ++i) {
    const double x = i - kWindow / 2;
    taps[i] = std::exp(-x * x / (2.0 * kSigma * kSigma));
    sum += taps[i];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

// Separable "valid" filtering: output is (w - 10) x (h - 10).
RealGrid filter_valid(const RealGrid& in) {
  static const auto taps = gaussian_taps();
  const std::size_t w = in.width(), h = in.height();
  const std::size_t ow = w - kWindow + 1, oh = h - kWindow + 1;
  RealGrid rows(ow, h);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int k = 0; k < kWindow; ++k) s += taps[k] * in(x + k, y);
      rows(x, y) = s;
    }
  }
  RealGrid out(ow, oh);
  for (std::size_t y = 0; y < oh; ++y) {
    for (std::size_t x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int k = 0; k < kWindow; ++k) s += taps[k] * rows(x, y + k);
      out(x, y) = s;
    }
  }
  return out;
}

RealGrid product(const RealGrid& a, const RealGrid& b) {
  RealGrid out(a.width(), a.height());
  for (std::size_t i = 0; i < a.size(); ++i) out.values()[i] = a.values()[i] * b.values()[i];
  return out;
}

double region_mean(const RealGrid& image, const Region& r) {
  if (r.width == 0 || r.height == 0) throw Error("michelson region is empty");
  if (r.x + r.width > image.width() || r.y + r.height > image.height()) {
    throw Error("michelson region exceeds the image");
  }
  double sum = 0.0;
  for (std::size_t y = r.y; y < r.y + r.height; ++y) {
    for (std::size_t x = r.x; x < r.x + r.width; ++x) sum += image(x, y);
  }
  return sum / static_cast<double>(r.width * r.height);
}

double mask_mean(const RealGrid& image, const std::vector<bool>& mask) {
  if (mask.size() != image.size()) throw Error("michelson mask size mismatch");
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) {
      sum += image.values()[i];
      ++n;
    }
  }
  if (n == 0) throw Error("michelson region is empty");
  return sum / static_cast<double>(n);
}

double contrast(double hi, double lo) {
  if (hi + lo == 0.0) throw Error("michelson contrast undefined: both regions are zero");
  return (hi - lo) / (hi + lo);
}

}  // namespace

double psnr(const RealGrid& reference, const RealGrid& test, double peak) {
  require_same_shape(reference.shape(), test.shape(), "psnr");
  check_peak(peak);
  return to_db(squared_error(reference, test) / static_cast<double>(reference.size()), peak);
}

double psnr(const IntensityImage& reference, const IntensityImage& test, double peak) {
  require_same_shape(reference.shape(), test.shape(), "psnr");
  check_peak(peak);
  double sum = 0.0;
  for (std::size_t p = 0; p < 3; ++p) sum += squared_error(reference.channels[p], test.channels[p]);
  return to_db(sum / (3.0 * static_cast<double>(reference.channels[0].size())), peak);
}

double ssim(const RealGrid& x, const RealGrid& y, double peak) {
  require_same_shape(x.shape(), y.shape(), "ssim");
  if (x.width() < kWindow || x.height() < kWindow) {
    throw Error("ssim needs images of at least 11x11 pixels");
  }
  check_peak(peak);
  const double c1 = (0.01 * peak) * (0.01 * peak);
  const double c2 = (0.03 * peak) * (0.03 * peak);
  const auto mx = filter_valid(x), my = filter_valid(y);
  const auto sxx = filter_valid(product(x, x)), syy = filter_valid(product(y, y));
  const auto sxy = filter_valid(product(x, y));
  double sum = 0.0;
  for (std::size_t i = 0; i < mx.size(); ++i) {
    const double ux = mx.values()[i], uy = my.values()[i];
    const double vx = sxx.values()[i] - ux * ux;
    const double vy = syy.values()[i] - uy * uy;
    const double cxy = sxy.values()[i] - ux * uy;
    sum += ((2.0 * ux * uy + c1) * (2.0 * cxy + c2)) /
           ((ux * ux + uy * uy + c1) * (vx + vy + c2));
  }
  return sum / static_cast<double>(mx.size());
}

double ssim(const IntensityImage& x, const IntensityImage& y, double peak) {
  double sum = 0.0;
  for (std::size_t p = 0; p < 3; ++p) sum += ssim(x.channels[p], y.channels[p], peak);
  return sum / 3.0;
}

double michelson_contrast(const RealGrid& image, const Region& bright, const Region& dark) {
  return contrast(region_mean(image, bright), region_mean(image, dark));
}

double michelson_contrast(const RealGrid& image, const std::vector<bool>& bright,
                          const std::vector<bool>& dark) {
  return contrast(mask_mean(image, bright), mask_mean(image, dark));
}

double Histogram::bin_low(std::size_t b) const {
  return low + (high - low) * static_cast<double>(b) / static_cast<double>(bins());
}

double Histogram::bin_high(std::size_t b) const { return bin_low(b + 1); }

Histogram channel_histograms(const IntensityImage& image, std::size_t bins, double low,
                             double high) {
  if (bins < 2) throw Error("histograms need at least 2 bins");
  if (!(high > low)) throw Error("histogram range must be increasing");
  Histogram h;
  h.low = low;
  h.high = high;
  const double width = (high - low) / static_cast<double>(bins);
  for (std::size_t p = 0; p < 3; ++p) {
    h.counts[p].assign(bins, 0);
    for (double v : image.channels[p].values()) {
      const double pos = std::floor((v - low) / width);
      const auto b = static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(bins - 1)));
      ++h.counts[p][b];
    }
  }
  return h;
}

double histogram_distance(const Histogram& a, const Histogram& b) {
  if (a.bins() != b.bins()) throw Error("histograms have different bin counts");
  double total = 0.0;
  for (std::size_t p = 0; p < 3; ++p) {
    const auto na = std::accumulate(a.counts[p].begin(), a.counts[p].end(), std::uint64_t{0});
    const auto nb = std::accumulate(b.counts[p].begin(), b.counts[p].end(), std::uint64_t{0});
    if (na == 0 || nb == 0) throw Error("cannot compare an empty histogram");
    // integer cross-multiplied overlap keeps identical histograms at exactly 0
    std::uint64_t shared = 0;
    for (std::size_t i = 0; i < a.bins(); ++i) {
      shared += std::min<std::uint64_t>(a.counts[p][i] * nb, b.counts[p][i] * na);
    }
    const double overlap = static_cast<double>(shared) / (static_cast<double>(na) * nb);
    total += 1.0 - overlap;
  }
  return total / 3.0;
}

std::string histogram_csv(const Histogram& h) {
  std::ostringstream os;
  os.precision(17);
  os << "bin_low,bin_high,count_r,count_g,count_b\n";
  for (std::size_t b = 0; b < h.bins(); ++b) {
    os << h.bin_low(b) << ',' << h.bin_high(b) << ',' << h.counts[0][b] << ',' << h.counts[1][b]
       << ',' << h.counts[2][b] << '\n';
  }
  return os.str();
}

MetricReport evaluate(const IntensityImage& target, const IntensityImage& reconstruction,
                      double scale, std::size_t bins) {
  require_same_shape(target.shape(), reconstruction.shape(), "evaluate");
  check_peak(scale);
  IntensityImage normalized(target.width(), target.height());
  for (std::size_t p = 0; p < 3; ++p) {
    const auto src = reconstruction.channels[p].values();
    auto dst = normalized.channels[p].values();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] / scale;
  }

  MetricReport r;
  r.psnr_db = psnr(target, normalized, 1.0);
  for (std::size_t p = 0; p < 3; ++p) {
    r.channel_psnr_db[p] = psnr(target.channels[p], normalized.channels[p], 1.0);
  }
  r.ssim = target.width() >= 11 && target.height() >= 11 ? ssim(target, normalized, 1.0)
                                                          : std::nan("");
  r.target_histogram = channel_histograms(target, bins, 0.0, 1.0);
  r.reconstruction_histogram = channel_histograms(normalized, bins, 0.0, 1.0);
  r.histogram_distance = histogram_distance(r.target_histogram, r.reconstruction_histogram);

  // luminance-ranked deciles of the target define the bright and dark regions
  const std::size_t n = target.channels[0].size();
  RealGrid lum(target.width(), target.height()), rec_lum(target.width(), target.height());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t p = 0; p < 3; ++p) {
      lum.values()[i] += target.channels[p].values()[i] / 3.0;
      rec_lum.values()[i] += normalized.channels[p].values()[i] / 3.0;
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return lum.values()[a] < lum.values()[b]; });
  const std::size_t tenth = std::max<std::size_t>(1, n / 10);
  std::vector<bool> dark(n, false), bright(n, false);
  for (std::size_t i = 0; i < tenth; ++i) {
    dark[order[i]] = true;
    bright[order[n - 1 - i]] = true;
  }
  try {
    r.michelson = michelson_contrast(rec_lum, bright, dark);
  } catch (const Error&) {
    r.michelson = 0.0;
  }
  return r;
}

}  // namespace holo
