#include "holo/scenes.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

namespace holo {

namespace {

using Rgb = std::array<double, 3>;
using Painter = std::function<Rgb(double x, double y)>;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double gauss(double x, double y, double cx, double cy, double sigma) {
  return std::exp(-((x - cx) * (x - cx) + (y - cy) * (y - cy)) / (2.0 * sigma * sigma));
}

Rgb natural(double x, double y) {
  Rgb c{0.45 + 0.3 * y, 0.6 + 0.25 * y, 0.95 - 0.2 * y};
  const double sun = 0.6 * gauss(x, y, 0.72, 0.22, 0.06);
  c[0] += 1.0 * sun;
  c[1] += 0.85 * sun;
  c[2] += 0.4 * sun;
  if (y > 0.62 + 0.08 * std::sin(6.0 * x)) {
    c = {0.25 + 0.2 * x, 0.55 + 0.1 * std::sin(9.0 * x), 0.2 + 0.1 * x};
  }
  const double blob = gauss(x, y, 0.3, 0.45, 0.08);
  c[0] += 0.5 * blob;
  c[1] += 0.1 * blob;
  c[2] += 0.3 * blob;
  const double texture = 0.05 * std::sin(40.0 * x) * std::sin(33.0 * y);
  for (double& v : c) v += texture;
  return c;
}

Rgb colorful(double x, double y) {
  return {0.5 + 0.5 * std::sin(kTwoPi * 2.0 * x), 0.5 + 0.5 * std::sin(kTwoPi * 2.0 * y + 1.0),
          0.5 + 0.5 * std::sin(kTwoPi * 1.5 * (x + y) + 2.0)};
}

Rgb dark_sparse(double x, double y) {
  const double a = gauss(x, y, 0.25, 0.3, 0.025);
  const double b = gauss(x, y, 0.7, 0.65, 0.03);
  const double c = gauss(x, y, 0.45, 0.8, 0.02);
  return {0.9 * a + 0.2 * c, 0.8 * b + 0.3 * a, 0.9 * c + 0.1 * b};
}

Rgb bright_complex(double x, double y) {
  const double ripple = 0.12 * std::sin(kTwoPi * 5.0 * x) * std::cos(kTwoPi * 4.0 * y);
  return {0.78 + 0.18 * std::sin(kTwoPi * 1.5 * x + 0.4) + ripple,
          0.72 + 0.2 * std::cos(kTwoPi * 1.2 * y) - ripple,
          0.7 + 0.2 * std::sin(kTwoPi * (x - y) + 1.0) + 0.5 * ripple};
}

Painter painter(const std::string& name) {
  if (name == "natural") return natural;
  if (name == "colorful") return colorful;
  if (name == "dark_sparse") return dark_sparse;
  if (name == "bright_complex") return bright_complex;
  if (name == "black") return [](double, double) { return Rgb{0.0, 0.0, 0.0}; };
  if (name == "gray") return [](double, double) { return Rgb{0.5, 0.5, 0.5}; };
  throw Error("unknown scene '" + name + "'");
}

}  // namespace

std::vector<std::string> scene_names() {
  return {"natural", "colorful", "dark_sparse", "bright_complex", "black", "gray"};
}

IntensityImage make_scene(const std::string& name, std::size_t width, std::size_t height,
                          double brightness) {
  if (width == 0 || height == 0) throw Error("scene dimensions must be positive");
  if (!(brightness >= 0.0)) throw Error("scene brightness must be >= 0");
  const Painter paint = painter(name);
  IntensityImage img(width, height);
  for (std::size_t j = 0; j < height; ++j) {
    for (std::size_t i = 0; i < width; ++i) {
      const Rgb c = paint(static_cast<double>(i) / width, static_cast<double>(j) / height);
      for (std::size_t p = 0; p < 3; ++p) {
        img.channels[p](i, j) = std::clamp(brightness * c[p], 0.0, 1.0);
      }
    }
  }
  return img;
}

}  // namespace holo
