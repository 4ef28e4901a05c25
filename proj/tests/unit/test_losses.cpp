#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "holo/losses.hpp"

using namespace holo;

TEST_CASE("image loss") {
  std::vector<IntensityImage> target{IntensityImage(8, 8, 0.4)};
  std::vector<IntensityImage> exact{IntensityImage(8, 8, 0.8)};
  CHECK(image_loss(exact, target, 2.0) == 0.0);

  std::vector<IntensityImage> black{IntensityImage(8, 8, 0.0)};
  std::vector<IntensityImage> ones{IntensityImage(8, 8, 1.0)};
  CHECK(image_loss(black, ones, 1.0) == 3.0);

  auto r = testutil::random_grid(8, 8, 1, 0.0, 1.0);
  std::vector<IntensityImage> rec{IntensityImage(8, 8, 0.4)};
  rec[0].channels[1] = r;
  const double base = image_loss(rec, target, 1.0);
  for (std::size_t i = 0; i < r.size(); ++i) {
    rec[0].channels[1].values()[i] = 0.4 + 2.0 * (r.values()[i] - 0.4);
  }
  CHECK(image_loss(rec, target, 1.0) == doctest::Approx(4.0 * base).epsilon(1e-13));

  std::vector<IntensityImage> two{IntensityImage(8, 8), IntensityImage(8, 8)};
  CHECK_THROWS_AS(image_loss(two, target, 1.0), Error);
  std::vector<IntensityImage> small{IntensityImage(4, 4)};
  CHECK_THROWS_AS(image_loss(small, target, 1.0), Error);
}

TEST_CASE("laser loss examples") {
  LaserSchedule l(3, 1.0);
  CHECK(laser_loss(l, {3.0, 3.0, 3.0}, 1.0) == 0.0);

  LaserSchedule half(3, 0.0);
  half(0, 0) = half(0, 1) = 0.5;
  CHECK(laser_loss(half, {0.5, 0.0, 0.0}, 1.0) == 0.0);

  LaserSchedule one(3, 0.0);
  one(0, 0) = 1.0;
  CHECK(laser_loss(one, {1.0, 0.0, 0.0}, 2.0) == 1.0);

  // depends on the subframe powers only through their sum
  LaserSchedule a(3, 0.0), b(3, 0.0);
  a(1, 0) = 0.2;
  a(1, 2) = 0.9;
  b(1, 1) = 0.9;
  b(1, 0) = 0.2;
  CHECK(laser_loss(a, {0.3, 0.7, 0.1}, 1.3) == laser_loss(b, {0.3, 0.7, 0.1}, 1.3));

  std::vector<IntensityImage> targets{IntensityImage(4, 4, 0.2), IntensityImage(4, 4, 0.1)};
  targets[1].channels[2](1, 1) = 0.9;
  const auto peaks = channel_peaks(targets);
  CHECK(peaks[0] == 0.2);
  CHECK(peaks[2] == 0.9);
  CHECK(laser_loss(l, targets, 1.0) == laser_loss(l, peaks, 1.0));
}

TEST_CASE("laser floor penalty") {
  LaserSchedule l(2, 0.5);
  CHECK(laser_floor_loss(l, 0.05) == 0.0);
  l(1, 1) = 0.0;
  CHECK(laser_floor_loss(l, 0.05) == doctest::Approx(0.0025));
}

TEST_CASE("variation loss on a constant mean is zero") {
  PhaseVariables v;
  v.mean.assign(2, RealGrid(4, 4, 1.3));
  v.offset.assign(2, RealGrid(4, 4));
  CHECK(variation_loss(v) == 0.0);
}

TEST_CASE("variation loss on a row ramp has the closed form") {
  const double c = 0.3;
  PhaseVariables v;
  v.mean.assign(1, RealGrid(4, 4));
  v.offset.assign(1, RealGrid(4, 4));
  for (std::size_t y = 0; y < 4; ++y) {
    for (std::size_t x = 0; x < 4; ++x) v.mean[0](x, y) = c * y;
  }
  // 12 vertical neighbour pairs of difference c, normalized by 16 pixels, in each branch
  CHECK(total_variation(v.mean[0]) == doctest::Approx(12.0 * c * c / 16.0));
  const double sigma = c * std::sqrt(1.25);
  CHECK(standard_deviation(v.mean[0]) == doctest::Approx(sigma));
  CHECK(variation_loss(v) == doctest::Approx(2.0 * c * c * 12.0 / 16.0 + 2.0 * sigma));
}

TEST_CASE("variation loss is symmetric under sign flips") {
  PhaseVariables v;
  v.mean = {testutil::random_grid(6, 6, 1), testutil::random_grid(6, 6, 2)};
  v.offset = {testutil::random_grid(6, 6, 3), testutil::random_grid(6, 6, 4)};
  const double base = variation_loss(v);
  CHECK(base > 0.0);
  for (auto* set : {&v.mean, &v.offset}) {
    for (auto& g : *set) {
      for (auto& x : g.values()) x = -x;
    }
  }
  CHECK(variation_loss(v) == doctest::Approx(base).epsilon(1e-14));
  PhaseVariables w = v;
  std::swap(w.mean, w.offset);
  CHECK(variation_loss(w) == doctest::Approx(base).epsilon(1e-14));
}

TEST_CASE("unconstrained phases contribute no variation loss") {
  PhaseVariables v;
  v.mean = {testutil::random_grid(4, 4, 1)};
  CHECK(variation_loss(v) == 0.0);
}

TEST_CASE("tv and std gradients match finite differences") {
  const auto g = testutil::random_grid(6, 5, 7);
  RealGrid tv(6, 5), sd(6, 5);
  total_variation_gradient(g, 1.5, tv);
  standard_deviation_gradient(g, 0.5, sd);
  const double h = 1e-6;
  for (std::size_t i = 0; i < g.size(); i += 3) {
    RealGrid up = g, dn = g;
    up.values()[i] += h;
    dn.values()[i] -= h;
    const double ftv = 1.5 * (total_variation(up) - total_variation(dn)) / (2 * h);
    const double fsd = 0.5 * (standard_deviation(up) - standard_deviation(dn)) / (2 * h);
    CHECK(tv.values()[i] == doctest::Approx(ftv).epsilon(1e-6));
    CHECK(sd.values()[i] == doctest::Approx(fsd).epsilon(1e-6));
  }
  RealGrid zero(6, 5);
  standard_deviation_gradient(RealGrid(6, 5, 2.0), 1.0, zero);
  for (double v : zero.values()) CHECK(v == 0.0);
}

TEST_CASE("pyramid variation") {
  CHECK(pyramid_variation(RealGrid(16, 16, 0.7), 3) == 0.0);
  const auto g = testutil::random_grid(16, 16, 5);
  CHECK(pyramid_variation(g, 1) == total_variation(g));

  RealGrid checker(8, 8);
  for (std::size_t y = 0; y < 8; ++y) {
    for (std::size_t x = 0; x < 8; ++x) checker(x, y) = (x + y) % 2;
  }
  const double level0 = total_variation(checker);
  CHECK(level0 == doctest::Approx(2.0 * 7.0 * 8.0 / 64.0));
  CHECK(total_variation(box_downsample(checker)) == 0.0);
  CHECK(pyramid_variation(checker, 2) == level0);
  // no other 0/1 image has larger level-0 TV
  CHECK(level0 >= total_variation(testutil::random_grid(8, 8, 3, 0.0, 1.0)));

  CHECK_THROWS_AS(pyramid_variation(RealGrid(4, 4), 3), Error);
  CHECK_THROWS_AS(pyramid_variation(RealGrid(8, 8), 0), Error);

  std::vector<IntensityImage> imgs{IntensityImage(8, 8, 0.0)};
  imgs[0].channels[2] = checker;
  CHECK(pyramid_variation_loss(imgs, 2) == level0);
}

TEST_CASE("pyramid gradient matches finite differences") {
  const auto g = testutil::random_grid(16, 8, 12);
  RealGrid grad(16, 8);
  pyramid_variation_gradient(g, 3, 2.0, grad);
  const double h = 1e-6;
  for (std::size_t i = 0; i < g.size(); i += 5) {
    RealGrid up = g, dn = g;
    up.values()[i] += h;
    dn.values()[i] -= h;
    const double fd = 2.0 * (pyramid_variation(up, 3) - pyramid_variation(dn, 3)) / (2 * h);
    CHECK(grad.values()[i] == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("total loss") {
  const LossWeights w;
  CHECK(total_loss({}, w, 1.0, false) == 0.0);
  const LossComponents c{1.0, 2.0, 3.0};
  CHECK(total_loss(c, w, 2.0, false) == doctest::Approx(3.4));
  CHECK(total_loss(c, w, 2.0, true) == doctest::Approx(3.4));
  const LossComponents small{0.001, 0.0, 0.0};
  CHECK(total_loss(small, w, 2.0, true) == doctest::Approx(0.003 - 0.2));
  LossWeights bad;
  bad.laser = -1.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}
