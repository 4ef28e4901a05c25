// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include "holo/simd.hpp"

namespace holo::simd::avx2 {
namespace {

inline const double* raw(std::span<const Complex> v) {
  return reinterpret_cast<const double*>(v.data());
}
inline double* raw(std::span<Complex> v) { return reinterpret_cast<double*>(v.data()); }

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// [a0 a1] -> [a0 a0 a1 a1]
inline __m256d widen_pairs(const double* p) {
  return _mm256_permute4x64_pd(_mm256_castpd128_pd256(_mm_loadu_pd(p)), 0x50);
}

void accumulate_intensity(std::span<const Complex> u, double weight, std::span<double> out) {
  const double* src = raw(u);
  const std::size_t n = u.size();
  const __m256d w = _mm256_set1_pd(weight);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_loadu_pd(src + 2 * i);
    const __m256d b = _mm256_loadu_pd(src + 2 * i + 4);
    const __m256d sum = _mm256_hadd_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b));
    const __m256d ordered = _mm256_permute4x64_pd(sum, 0xD8);
    _mm256_storeu_pd(out.data() + i, _mm256_fmadd_pd(w, ordered, _mm256_loadu_pd(out.data() + i)));
  }
  for (; i < n; ++i) {
    const double re = u[i].real(), im = u[i].imag();
    out[i] += weight * (re * re + im * im);
  }
}

void multiply(std::span<Complex> u, std::span<const Complex> h) {
  double* dst = raw(u);
  const double* hp = raw(h);
  const std::size_t n = u.size();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d a = _mm256_loadu_pd(dst + 2 * i);
    const __m256d c = _mm256_loadu_pd(hp + 2 * i);
    const __m256d c_re = _mm256_movedup_pd(c);
    const __m256d c_im = _mm256_permute_pd(c, 0xF);
    const __m256d a_sw = _mm256_permute_pd(a, 0x5);
    _mm256_storeu_pd(dst + 2 * i, _mm256_fmaddsub_pd(a, c_re, _mm256_mul_pd(a_sw, c_im)));
  }
  for (; i < n; ++i) {
    const double a = u[i].real(), b = u[i].imag();
    const double c = h[i].real(), d = h[i].imag();
    u[i] = Complex(a * c - b * d, a * d + b * c);
  }
}

void multiply_conj(std::span<Complex> u, std::span<const Complex> h) {
  double* dst = raw(u);
  const double* hp = raw(h);
  const std::size_t n = u.size();
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d a = _mm256_loadu_pd(dst + 2 * i);
    const __m256d c = _mm256_loadu_pd(hp + 2 * i);
    const __m256d c_re = _mm256_movedup_pd(c);
    const __m256d c_im = _mm256_permute_pd(c, 0xF);
    const __m256d a_sw = _mm256_permute_pd(a, 0x5);
    _mm256_storeu_pd(dst + 2 * i, _mm256_fmsubadd_pd(a, c_re, _mm256_mul_pd(a_sw, c_im)));
  }
  for (; i < n; ++i) {
    const double a = u[i].real(), b = u[i].imag();
    const double c = h[i].real(), d = h[i].imag();
    u[i] = Complex(a * c + b * d, b * c - a * d);
  }
}

void scale(std::span<Complex> u, double c) {
  double* dst = raw(u);
  const std::size_t n = 2 * u.size();
  const __m256d f = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(dst + i, _mm256_mul_pd(_mm256_loadu_pd(dst + i), f));
  }
  for (; i < n; ++i) dst[i] *= c;
}

void modulate(std::span<const Complex> u, std::span<const double> r, double c,
              std::span<Complex> out) {
  const double* src = raw(u);
  double* dst = raw(out);
  const std::size_t n = u.size();
  const __m256d f = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d rr = _mm256_mul_pd(f, widen_pairs(r.data() + i));
    _mm256_storeu_pd(dst + 2 * i, _mm256_mul_pd(rr, _mm256_loadu_pd(src + 2 * i)));
  }
  for (; i < n; ++i) {
    const double g = c * r[i];
    out[i] = Complex(g * u[i].real(), g * u[i].imag());
  }
}

double phase_adjoint(std::span<const Complex> w, std::span<const Complex> g, double k,
                     std::span<double> dphase) {
  const double* wp = raw(w);
  const double* gp = raw(g);
  const std::size_t n = w.size();
  const __m256d kk = _mm256_set1_pd(k);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d w0 = _mm256_loadu_pd(wp + 2 * i);
    const __m256d w1 = _mm256_loadu_pd(wp + 2 * i + 4);
    const __m256d g0 = _mm256_loadu_pd(gp + 2 * i);
    const __m256d g1 = _mm256_loadu_pd(gp + 2 * i + 4);
    acc = _mm256_add_pd(acc, _mm256_hadd_pd(_mm256_mul_pd(w0, g0), _mm256_mul_pd(w1, g1)));
    const __m256d c0 = _mm256_mul_pd(w0, _mm256_permute_pd(g0, 0x5));
    const __m256d c1 = _mm256_mul_pd(w1, _mm256_permute_pd(g1, 0x5));
    const __m256d im = _mm256_permute4x64_pd(_mm256_hsub_pd(c0, c1), 0xD8);
    _mm256_storeu_pd(dphase.data() + i,
                     _mm256_fmadd_pd(kk, im, _mm256_loadu_pd(dphase.data() + i)));
  }
  double re_sum = hsum(acc);
  for (; i < n; ++i) {
    const double wr = w[i].real(), wi = w[i].imag();
    const double gr = g[i].real(), gi = g[i].imag();
    re_sum += wr * gr + wi * gi;
    dphase[i] += k * (wr * gi - wi * gr);
  }
  return re_sum;
}

double residual(std::span<const double> a, std::span<const double> b, double s, double coeff,
                std::span<double> out) {
  const std::size_t n = a.size();
  const __m256d ss = _mm256_set1_pd(s);
  const __m256d cc = _mm256_set1_pd(coeff);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r =
        _mm256_fnmadd_pd(ss, _mm256_loadu_pd(b.data() + i), _mm256_loadu_pd(a.data() + i));
    acc = _mm256_fmadd_pd(r, r, acc);
    _mm256_storeu_pd(out.data() + i, _mm256_mul_pd(cc, r));
  }
  double sum = hsum(acc);
  for (; i < n; ++i) {
    const double r = a[i] - s * b[i];
    sum += r * r;
    out[i] = coeff * r;
  }
  return sum;
}

double dot(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i), acc);
  }
  double sum = hsum(acc);
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

}  // namespace

const KernelTable kTable{
    accumulate_intensity, multiply, multiply_conj, scale, modulate, phase_adjoint, residual, dot,
};

}  // namespace holo::simd::avx2
