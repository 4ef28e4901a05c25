#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace holo {

using Complex = std::complex<double>;

/// Thrown for every contract violation detected by the library (bad shapes,
/// out-of-range parameters, malformed files).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Shape {
  std::size_t width = 0;
  std::size_t height = 0;

  std::size_t size() const { return width * height; }
  bool operator==(const Shape&) const = default;
};

std::string to_string(const Shape& shape);

/// Row-major 2D grid of real values.
class RealGrid {
 public:
  RealGrid() = default;
  RealGrid(std::size_t width, std::size_t height, double fill = 0.0);

  std::size_t width() const { return shape_.width; }
  std::size_t height() const { return shape_.height; }
  Shape shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t x, std::size_t y) { return data_[y * shape_.width + x]; }
  double operator()(std::size_t x, std::size_t y) const { return data_[y * shape_.width + x]; }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  void fill(double value);

 private:
  Shape shape_;
  std::vector<double> data_;
};

/// Optical wavefront sampled on an even-sized grid with a physical pixel pitch.
class ComplexField {
 public:
  ComplexField() = default;
  /// Width and height must be even and at least 2; pitch (meters) must be positive.
  ComplexField(std::size_t width, std::size_t height, double pitch, Complex fill = {});

  std::size_t width() const { return shape_.width; }
  std::size_t height() const { return shape_.height; }
  Shape shape() const { return shape_; }
  double pitch() const { return pitch_; }
  std::size_t size() const { return data_.size(); }

  Complex& operator()(std::size_t x, std::size_t y) { return data_[y * shape_.width + x]; }
  const Complex& operator()(std::size_t x, std::size_t y) const {
    return data_[y * shape_.width + x];
  }

  std::span<Complex> values() { return data_; }
  std::span<const Complex> values() const { return data_; }

 private:
  Shape shape_;
  double pitch_ = 0.0;
  std::vector<Complex> data_;
};

/// Linear RGB intensity image; 1.0 is the nominal single-subframe peak.
struct IntensityImage {
  std::array<RealGrid, 3> channels;

  IntensityImage() = default;
  IntensityImage(std::size_t width, std::size_t height, double fill = 0.0);

  std::size_t width() const { return channels[0].width(); }
  std::size_t height() const { return channels[0].height(); }
  Shape shape() const { return channels[0].shape(); }

  /// Throws unless all channels share a shape and every value is finite and >= 0.
  void validate() const;
};

/// Per-pixel squared modulus.
RealGrid intensity(const ComplexField& field);

/// Sum of squared moduli.
double energy(const ComplexField& field);

/// <a, b> = sum(conj(a) * b).
Complex inner_product(std::span<const Complex> a, std::span<const Complex> b);

void require_same_shape(Shape a, Shape b, const char* what);

}  // namespace holo
