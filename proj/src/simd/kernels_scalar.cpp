#include "holo/simd.hpp"

namespace holo::simd::scalar {
namespace {

void accumulate_intensity(std::span<const Complex> u, double weight, std::span<double> out) {
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double re = u[i].real();
    const double im = u[i].imag();
    out[i] += weight * (re * re + im * im);
  }
}

void multiply(std::span<Complex> u, std::span<const Complex> h) {
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double a = u[i].real(), b = u[i].imag();
    const double c = h[i].real(), d = h[i].imag();
    u[i] = Complex(a * c - b * d, a * d + b * c);
  }
}

void multiply_conj(std::span<Complex> u, std::span<const Complex> h) {
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double a = u[i].real(), b = u[i].imag();
    const double c = h[i].real(), d = h[i].imag();
    u[i] = Complex(a * c + b * d, b * c - a * d);
  }
}

void scale(std::span<Complex> u, double c) {
  for (auto& v : u) v = Complex(v.real() * c, v.imag() * c);
}

void modulate(std::span<const Complex> u, std::span<const double> r, double c,
              std::span<Complex> out) {
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double f = c * r[i];
    out[i] = Complex(f * u[i].real(), f * u[i].imag());
  }
}

double phase_adjoint(std::span<const Complex> w, std::span<const Complex> g, double k,
                     std::span<double> dphase) {
  double re_sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double wr = w[i].real(), wi = w[i].imag();
    const double gr = g[i].real(), gi = g[i].imag();
    re_sum += wr * gr + wi * gi;
    dphase[i] += k * (wr * gi - wi * gr);
  }
  return re_sum;
}

double residual(std::span<const double> a, std::span<const double> b, double s, double coeff,
                std::span<double> out) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double r = a[i] - s * b[i];
    sum += r * r;
    out[i] = coeff * r;
  }
  return sum;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

}  // namespace

const KernelTable kTable{
    accumulate_intensity, multiply, multiply_conj, scale, modulate, phase_adjoint, residual, dot,
};

}  // namespace holo::simd::scalar
