#include "holo/losses.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <mutex>

#include "holo/simd.hpp"

namespace holo {

void LossWeights::validate() const {
  for (double w : {image, laser, variation, scale, epsilon_image}) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw Error("loss weights must be finite and >= 0");
  }
}

double image_loss(std::span<const IntensityImage> reconstructions,
                  std::span<const IntensityImage> targets, double scale) {
  if (reconstructions.size() != targets.size()) throw Error("plane count mismatch in image loss");
  std::vector<double> scratch;
  double loss = 0.0;
  for (std::size_t q = 0; q < targets.size(); ++q) {
    require_same_shape(reconstructions[q].shape(), targets[q].shape(), "image loss");
    for (std::size_t p = 0; p < kPrimaries; ++p) {
      const auto& rec = reconstructions[q].channels[p];
      scratch.resize(rec.size());
      const double sum =
          simd::residual(rec.values(), targets[q].channels[p].values(), scale, 0.0, scratch);
      loss += sum / static_cast<double>(rec.size());
    }
  }
  return loss;
}

std::array<double, 3> channel_peaks(std::span<const IntensityImage> targets) {
  std::array<double, 3> peaks{0.0, 0.0, 0.0};
  for (const auto& t : targets) {
    for (std::size_t p = 0; p < kPrimaries; ++p) {
      for (double v : t.channels[p].values()) peaks[p] = std::max(peaks[p], v);
    }
  }
  return peaks;
}

double laser_loss(const LaserSchedule& lasers, const std::array<double, 3>& peaks, double scale) {
  double loss = 0.0;
  for (std::size_t p = 0; p < kPrimaries; ++p) {
    const double gap = lasers.power(p) - peaks[p] * scale;
    loss += gap * gap;
  }
  return loss;
}

double laser_loss(const LaserSchedule& lasers, std::span<const IntensityImage> targets,
                  double scale) {
  return laser_loss(lasers, channel_peaks(targets), scale);
}

double laser_floor_loss(const LaserSchedule& lasers, double floor) {
  double loss = 0.0;
  for (double l : lasers.values()) {
    const double d = std::max(0.0, floor - l);
    loss += d * d;
  }
  return loss;
}

double total_variation(const RealGrid& g) {
  const std::size_t w = g.width(), h = g.height();
  double sum = 0.0;
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      if (x + 1 < w) {
        const double d = g(x + 1, y) - g(x, y);
        sum += d * d;
      }
      if (y + 1 < h) {
        const double d = g(x, y + 1) - g(x, y);
        sum += d * d;
      }
    }
  }
  return sum / static_cast<double>(g.size());
}

void total_variation_gradient(const RealGrid& g, double scale, RealGrid& grad) {
  require_same_shape(g.shape(), grad.shape(), "total variation gradient");
  const std::size_t w = g.width(), h = g.height();
  const double c = 2.0 * scale / static_cast<double>(g.size());
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      if (x + 1 < w) {
        const double d = c * (g(x + 1, y) - g(x, y));
        grad(x + 1, y) += d;
        grad(x, y) -= d;
      }
      if (y + 1 < h) {
        const double d = c * (g(x, y + 1) - g(x, y));
        grad(x, y + 1) += d;
        grad(x, y) -= d;
      }
    }
  }
}

namespace {

// Mean and population std computed about the first sample so a constant map
// gives exactly zero.
std::pair<double, double> shifted_moments(std::span<const double> v) {
  const double x0 = v[0];
  double mean = 0.0;
  for (double x : v) mean += x - x0;
  mean /= static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - x0 - mean) * (x - x0 - mean);
  return {x0 + mean, std::sqrt(var / static_cast<double>(v.size()))};
}

}  // namespace

double standard_deviation(const RealGrid& g) {
  if (g.empty()) return 0.0;
  return shifted_moments(g.values()).second;
}

void standard_deviation_gradient(const RealGrid& g, double scale, RealGrid& grad) {
  require_same_shape(g.shape(), grad.shape(), "standard deviation gradient");
  if (g.empty()) return;
  const auto [mean, sigma] = shifted_moments(g.values());
  // Not differentiable at a constant map; use the zero subgradient there.
  if (sigma == 0.0) return;
  const auto v = g.values();
  const double c = scale / (static_cast<double>(v.size()) * sigma);
  auto out = grad.values();
  for (std::size_t i = 0; i < v.size(); ++i) out[i] += c * (v[i] - mean);
}

double variation_loss(const PhaseVariables& phases) {
  if (!phases.constrained()) {
    static std::once_flag notice;
    std::call_once(notice, [] {
      std::clog << "note: phase variation loss is undefined without the double-phase "
                   "constraint; contributing 0\n";
    });
    return 0.0;
  }
  phases.validate();
  double loss = 0.0;
  for (std::size_t t = 0; t < phases.subframes(); ++t) {
    const auto& m = phases.mean[t];
    const auto& o = phases.offset[t];
    RealGrid plus(m.width(), m.height()), minus(m.width(), m.height());
    for (std::size_t i = 0; i < m.size(); ++i) {
      plus.values()[i] = m.values()[i] + o.values()[i];
      minus.values()[i] = m.values()[i] - o.values()[i];
    }
    loss += total_variation(plus) + total_variation(minus) + standard_deviation(plus) +
            standard_deviation(minus);
  }
  return loss;
}

RealGrid box_downsample(const RealGrid& g) {
  const std::size_t w = g.width() / 2, h = g.height() / 2;
  RealGrid out(w, h);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      out(x, y) = 0.25 * (g(2 * x, 2 * y) + g(2 * x + 1, 2 * y) + g(2 * x, 2 * y + 1) +
                          g(2 * x + 1, 2 * y + 1));
    }
  }
  return out;
}

namespace {

void check_levels(const RealGrid& g, int levels) {
  if (levels < 1) throw Error("pyramid needs at least one level");
  const std::size_t need = std::size_t{1} << levels;
  if (g.width() < need || g.height() < need) {
    throw Error("image too small for a " + std::to_string(levels) + "-level pyramid");
  }
}

// Adjoint of box_downsample: spreads each coarse value over its 2x2 block.
void box_upsample_add(const RealGrid& coarse, RealGrid& fine) {
  for (std::size_t y = 0; y < coarse.height(); ++y) {
    for (std::size_t x = 0; x < coarse.width(); ++x) {
      const double v = 0.25 * coarse(x, y);
      fine(2 * x, 2 * y) += v;
      fine(2 * x + 1, 2 * y) += v;
      fine(2 * x, 2 * y + 1) += v;
      fine(2 * x + 1, 2 * y + 1) += v;
    }
  }
}

}  // namespace

double pyramid_variation(const RealGrid& grid, int levels) {
  check_levels(grid, levels);
  double loss = total_variation(grid);
  RealGrid level = grid;
  for (int k = 1; k < levels; ++k) {
    level = box_downsample(level);
    loss += total_variation(level);
  }
  return loss;
}

void pyramid_variation_gradient(const RealGrid& grid, int levels, double scale, RealGrid& grad) {
  check_levels(grid, levels);
  std::vector<RealGrid> pyramid{grid};
  for (int k = 1; k < levels; ++k) pyramid.push_back(box_downsample(pyramid.back()));
  RealGrid carry(pyramid.back().width(), pyramid.back().height());
  for (int k = levels - 1; k >= 0; --k) {
    total_variation_gradient(pyramid[k], scale, carry);
    if (k == 0) break;
    RealGrid finer(pyramid[k - 1].width(), pyramid[k - 1].height());
    box_upsample_add(carry, finer);
    carry = std::move(finer);
  }
  auto out = grad.values();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += carry.values()[i];
}

double pyramid_variation_loss(std::span<const IntensityImage> reconstructions, int levels) {
  double loss = 0.0;
  for (const auto& image : reconstructions) {
    for (const auto& c : image.channels) loss += pyramid_variation(c, levels);
  }
  return loss;
}

double total_loss(const LossComponents& c, const LossWeights& w, double scale,
                  bool dynamic_scale_active) {
  double total = w.image * c.image + w.laser * c.laser + w.variation * c.variation;
  if (dynamic_scale_active && c.image < w.epsilon_image) total -= w.scale * scale;
  return total;
}

}  // namespace holo
