#pragma once

// Data-parallel inner loops of the wave pipeline. Every kernel has a scalar
// reference implementation; on x86-64 an AVX2+FMA variant is compiled in a
// separate translation unit and selected at runtime when the CPU supports it.
// Setting HOLO_SIMD=scalar in the environment forces the reference path.

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace holo::simd {

using Complex = std::complex<double>;

enum class Isa { scalar, avx2 };

std::string_view name(Isa isa);
bool available(Isa isa);
Isa active();
/// Selects the kernel set used by the dispatching entry points. Throws if the
/// ISA is not available on this machine.
void select(Isa isa);

struct KernelTable {
  // out[i] += weight * |u[i]|^2
  void (*accumulate_intensity)(std::span<const Complex> u, double weight, std::span<double> out);
  // u[i] *= h[i]
  void (*multiply)(std::span<Complex> u, std::span<const Complex> h);
  // u[i] *= conj(h[i])
  void (*multiply_conj)(std::span<Complex> u, std::span<const Complex> h);
  // u[i] *= c
  void (*scale)(std::span<Complex> u, double c);
  // out[i] = c * r[i] * u[i]
  void (*modulate)(std::span<const Complex> u, std::span<const double> r, double c,
                   std::span<Complex> out);
  // dphase[i] += k * Im(conj(w[i]) * g[i]); returns sum Re(conj(w[i]) * g[i])
  double (*phase_adjoint)(std::span<const Complex> w, std::span<const Complex> g, double k,
                          std::span<double> dphase);
  // out[i] = coeff * (a[i] - s * b[i]); returns sum (a[i] - s * b[i])^2
  double (*residual)(std::span<const double> a, std::span<const double> b, double s,
                     double coeff, std::span<double> out);
  // sum a[i] * b[i]
  double (*dot)(std::span<const double> a, std::span<const double> b);
};

const KernelTable& table(Isa isa);

inline void accumulate_intensity(std::span<const Complex> u, double weight,
                                 std::span<double> out) {
  table(active()).accumulate_intensity(u, weight, out);
}
inline void multiply(std::span<Complex> u, std::span<const Complex> h) {
  table(active()).multiply(u, h);
}
inline void multiply_conj(std::span<Complex> u, std::span<const Complex> h) {
  table(active()).multiply_conj(u, h);
}
inline void scale(std::span<Complex> u, double c) { table(active()).scale(u, c); }
inline void modulate(std::span<const Complex> u, std::span<const double> r, double c,
                     std::span<Complex> out) {
  table(active()).modulate(u, r, c, out);
}
inline double phase_adjoint(std::span<const Complex> w, std::span<const Complex> g, double k,
                            std::span<double> dphase) {
  return table(active()).phase_adjoint(w, g, k, dphase);
}
inline double residual(std::span<const double> a, std::span<const double> b, double s,
                       double coeff, std::span<double> out) {
  return table(active()).residual(a, b, s, coeff, out);
}
inline double dot(std::span<const double> a, std::span<const double> b) {
  return table(active()).dot(a, b);
}

namespace scalar {
extern const KernelTable kTable;
}
#if defined(HOLO_HAVE_AVX2)
namespace avx2 {
extern const KernelTable kTable;
}
#endif

}  // namespace holo::simd
