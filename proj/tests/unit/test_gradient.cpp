#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "holo/gradient.hpp"
#include "holo/simd.hpp"

using namespace holo;

namespace {

Problem make_problem(std::size_t n, std::size_t planes, KernelCache& cache, unsigned seed) {
  Problem pr;
  pr.display.width = pr.display.height = n;
  pr.display.plane_distances.clear();
  for (std::size_t q = 0; q < planes; ++q) pr.display.plane_distances.push_back(0.001 * q);
  for (std::size_t q = 0; q < planes; ++q) {
    IntensityImage t(n, n);
    for (std::size_t p = 0; p < 3; ++p) t.channels[p] = testutil::random_grid(n, n, seed + 7 * q + p, 0.0, 1.0);
    pr.targets.push_back(t);
  }
  for (std::size_t p = 0; p < 3; ++p) pr.phase_scales[p] = phase_scale(p, pr.display);
  pr.prepare(cache);
  return pr;
}

Variables make_point(std::size_t n, std::size_t T, unsigned seed, bool constrained = true) {
  Variables v;
  for (std::size_t t = 0; t < T; ++t) {
    v.phases.mean.push_back(testutil::random_grid(n, n, seed + t, -3.0, 3.0));
    if (constrained) v.phases.offset.push_back(testutil::random_grid(n, n, seed + 50 + t, -0.5, 0.5));
  }
  const auto raw = testutil::random_grid(3 * T, 1, seed + 99, -1.5, 1.5);
  v.laser_raw.assign(raw.values().begin(), raw.values().end());
  v.scale = 1.3;
  return v;
}

}  // namespace

TEST_CASE("full multi-color loss matches finite differences on 8x8, T=2, two planes") {
  KernelCache cache;
  auto pr = make_problem(8, 2, cache, 3);
  pr.active_primaries = {true, false, true};
  pr.pyramid_levels = 2;
  pr.use_laser_floor = true;
  pr.laser_floor = 0.3;
  const auto point = make_point(8, 2, 17);
  const auto check = check_gradients(pr, point, 1e-4, 64, 5);
  CHECK(check.coordinates == 64 + 6 + 1);
  CHECK(check.max_relative_error <= 1e-4);

  const auto bonus = check_gradients(pr, point, 1e-4, 64, 6, true);
  CHECK(bonus.max_relative_error <= 1e-4);
}

TEST_CASE("all three primaries, three subframes, propagated plane") {
  KernelCache cache;
  auto pr = make_problem(8, 1, cache, 8);
  pr.display.plane_distances = {0.002};
  pr.prepare(cache);
  const auto point = make_point(8, 3, 4);
  CHECK(check_gradients(pr, point, 1e-4, 96, 2).max_relative_error <= 1e-4);
}

TEST_CASE("laser gradients near the sigmoid bounds") {
  KernelCache cache;
  auto pr = make_problem(8, 1, cache, 21);
  auto point = make_point(8, 2, 9);
  for (std::size_t i = 0; i < point.laser_raw.size(); ++i) point.laser_raw[i] = (i % 2) ? 4.5 : -4.5;
  CHECK(check_gradients(pr, point, 1e-4, 64, 3).max_relative_error <= 1e-4);
}

TEST_CASE("unconstrained phases") {
  KernelCache cache;
  auto pr = make_problem(8, 1, cache, 30);
  const auto point = make_point(8, 2, 31, false);
  CHECK(check_gradients(pr, point, 1e-4, 64, 4).max_relative_error <= 1e-4);
}

TEST_CASE("quadratic toy loss in the scale is checked to near machine precision") {
  KernelCache cache;
  auto pr = make_problem(8, 1, cache, 40);
  pr.lasers_fixed = true;
  pr.fixed_lasers = LaserSchedule(2, 0.5);
  pr.phase_variation = false;
  pr.pyramid_levels = 0;
  const auto point = make_point(8, 2, 41);
  const auto check = check_gradients(pr, point, 1e-3, 0, 1, true);
  CHECK(check.coordinates == 1);
  CHECK(check.max_relative_error <= 1e-8);
}

TEST_CASE("exact reconstruction is a stationary point") {
  KernelCache cache;
  auto pr = make_problem(8, 1, cache, 50);
  pr.display.aperture = 0.5;
  pr.prepare(cache);
  pr.use_laser_loss = false;
  pr.phase_variation = false;
  pr.pyramid_levels = 0;
  const auto point = make_point(8, 2, 51);
  pr.targets = forward(pr, point, false).reconstructions;
  auto exact = point;
  exact.scale = 1.0;
  const auto rec = forward(pr, exact, false);
  CHECK(rec.total == 0.0);
  for (double g : backward(pr, exact, rec).flatten()) CHECK(g == 0.0);
}

TEST_CASE("phase gradient of a unit-modulus energy vanishes") {
  KernelCache cache;
  auto pr = make_problem(8, 1, cache, 60);
  pr.display.aperture = 1.0;
  pr.prepare(cache);
  for (auto& c : pr.targets[0].channels) c.fill(0.0);
  pr.phase_variation = false;
  pr.pyramid_levels = 0;
  pr.use_laser_loss = false;
  const auto point = make_point(8, 2, 61);
  const auto g = backward(pr, point, forward(pr, point, false));
  for (const auto& d : g.d_mean) {
    for (double v : d.values()) CHECK(std::abs(v) < 1e-12);
  }
  for (const auto& d : g.d_offset) {
    for (double v : d.values()) CHECK(std::abs(v) < 1e-12);
  }
  double laser = 0.0;
  for (double v : g.d_laser_raw) laser += std::abs(v);
  CHECK(laser > 0.0);
}

TEST_CASE("gradients are deterministic and finite") {
  KernelCache cache;
  auto pr = make_problem(16, 1, cache, 70);
  const auto point = make_point(16, 3, 71);
  const auto a = backward(pr, point, forward(pr, point, false)).flatten();
  const auto b = backward(pr, point, forward(pr, point, false)).flatten();
  CHECK(a == b);
  CHECK(backward(pr, point, forward(pr, point, false)).finite());
}

TEST_CASE("scalar and vector paths give the same gradients") {
  if (!simd::available(simd::Isa::avx2)) return;
  KernelCache cache;
  auto pr = make_problem(16, 1, cache, 80);
  const auto point = make_point(16, 2, 81);
  const auto before = simd::active();
  simd::select(simd::Isa::scalar);
  const auto a = backward(pr, point, forward(pr, point, false)).flatten();
  simd::select(simd::Isa::avx2);
  const auto b = backward(pr, point, forward(pr, point, false)).flatten();
  simd::select(before);
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]));
    scale = std::max(scale, std::abs(a[i]));
  }
  CHECK(worst <= 1e-10 * scale);
}

TEST_CASE("mismatched variables are rejected") {
  KernelCache cache;
  auto pr = make_problem(8, 1, cache, 90);
  auto point = make_point(8, 2, 91);
  point.laser_raw.pop_back();
  CHECK_THROWS_AS(forward(pr, point, false), Error);
  auto wrong = make_point(16, 2, 92);
  CHECK_THROWS_AS(forward(pr, wrong, false), Error);
  Problem unprepared = pr;
  unprepared.kernels.clear();
  CHECK_THROWS_AS(forward(unprepared, make_point(8, 2, 93), false), Error);
}

TEST_CASE("flatten and unflatten round trip") {
  auto v = make_point(4, 2, 1);
  auto flat = flatten(v);
  CHECK(flat.size() == 2 * 2 * 16 + 6 + 1);
  flat.back() = 2.5;
  unflatten(flat, v);
  CHECK(v.scale == 2.5);
  flat.push_back(0.0);
  CHECK_THROWS_AS(unflatten(flat, v), Error);
}
