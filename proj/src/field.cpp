#include "holo/field.hpp"

#include <cmath>

#include "holo/simd.hpp"

namespace holo {

std::string to_string(const Shape& shape) {
  return std::to_string(shape.width) + "x" + std::to_string(shape.height);
}

RealGrid::RealGrid(std::size_t width, std::size_t height, double fill)
    : shape_{width, height}, data_(width * height, fill) {}

void RealGrid::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

ComplexField::ComplexField(std::size_t width, std::size_t height, double pitch, Complex fill)
    : shape_{width, height}, pitch_(pitch) {
  if (width < 2 || height < 2 || width % 2 != 0 || height % 2 != 0) {
    throw Error("field dimensions must be even and >= 2, got " + to_string(shape_));
  }
  if (!(pitch > 0.0) || !std::isfinite(pitch)) {
    throw Error("field pitch must be positive");
  }
  data_.assign(width * height, fill);
}

IntensityImage::IntensityImage(std::size_t width, std::size_t height, double fill) {
  for (auto& c : channels) c = RealGrid(width, height, fill);
}

void IntensityImage::validate() const {
  for (const auto& c : channels) {
    require_same_shape(channels[0].shape(), c.shape(), "intensity image channels");
    for (double v : c.values()) {
      if (!std::isfinite(v) || v < 0.0) {
        throw Error("intensity image contains a negative or non-finite value");
      }
    }
  }
}

RealGrid intensity(const ComplexField& field) {
  RealGrid out(field.width(), field.height());
  simd::accumulate_intensity(field.values(), 1.0, out.values());
  return out;
}

double energy(const ComplexField& field) {
  double sum = 0.0;
  for (const Complex& v : field.values()) sum += std::norm(v);
  return sum;
}

Complex inner_product(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.size() != b.size()) throw Error("inner product of mismatched lengths");
  Complex sum{};
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::conj(a[i]) * b[i];
  return sum;
}

void require_same_shape(Shape a, Shape b, const char* what) {
  if (!(a == b)) {
    throw Error(std::string("shape mismatch in ") + what + ": " + to_string(a) + " vs " +
                to_string(b));
  }
}

}  // namespace holo
