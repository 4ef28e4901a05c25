#include "holo/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "holo/simd.hpp"

namespace holo {
namespace {

// FFTW's planner is not thread-safe; execution of an existing plan on new
// arrays is. Plans live for the whole process.
class PlanCache {
 public:
  fftw_plan get(Shape shape, int sign) {
    std::lock_guard lock(mutex_);
    auto key = std::make_tuple(shape.width, shape.height, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<Complex> scratch(shape.size());
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    fftw_plan plan = fftw_plan_dft_2d(static_cast<int>(shape.height), static_cast<int>(shape.width),
                                      buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plan) throw Error("FFTW failed to create a plan for " + to_string(shape));
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<std::size_t, std::size_t, int>, fftw_plan> plans_;
};

PlanCache& plans() {
  static PlanCache cache;
  return cache;
}

void transform(std::span<Complex> data, Shape shape, int sign) {
  if (data.size() != shape.size() || shape.size() == 0) {
    throw Error("fft buffer does not match shape " + to_string(shape));
  }
  fftw_plan plan = plans().get(shape, sign);
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, buf, buf);
  simd::scale(data, 1.0 / std::sqrt(static_cast<double>(shape.size())));
}

}  // namespace

void fft2_inplace(std::span<Complex> data, Shape shape) { transform(data, shape, FFTW_FORWARD); }

void ifft2_inplace(std::span<Complex> data, Shape shape) { transform(data, shape, FFTW_BACKWARD); }

ComplexField fft2(const ComplexField& field) {
  ComplexField out = field;
  fft2_inplace(out.values(), out.shape());
  return out;
}

ComplexField ifft2(const ComplexField& field) {
  ComplexField out = field;
  ifft2_inplace(out.values(), out.shape());
  return out;
}

}  // namespace holo
