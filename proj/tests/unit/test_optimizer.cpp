#include <cmath>

#include "doctest.h"
#include "holo/optimizer.hpp"
#include "holo/scenes.hpp"

using namespace holo;

namespace {

DisplayConfig small_display(std::size_t n) {
  DisplayConfig d;
  d.width = d.height = n;
  return d;
}

OptimizerConfig quick(int steps) {
  OptimizerConfig c;
  c.steps = steps;
  c.seed = 11;
  return c;
}

}  // namespace

TEST_CASE("all-black target drives the dynamic scale to s_max exactly") {
  KernelCache cache;
  auto cfg = quick(300);
  cfg.scale_mode = ScaleMode::dynamic;
  cfg.s_max = 3.0;
  const auto r = optimize_multicolor({make_scene("black", 16, 16)}, small_display(16), cfg, cache);
  CHECK(r.scale == 3.0);
  for (std::size_t k = 1; k < r.history.size(); ++k) CHECK(r.history[k].scale >= r.history[k - 1].scale);
}

TEST_CASE("uniform gray target converges") {
  KernelCache cache;
  auto display = small_display(16);
  display.aperture = 1.0;  // no pupil stop: a flat phase reproduces a flat target exactly
  const auto r = optimize_multicolor({make_scene("gray", 16, 16, 1.0)}, display, quick(500), cache);
  CHECK(r.history.size() == 501);
  CHECK(r.final_losses().image <= 1e-3);
  CHECK(r.final_losses().image < r.history.front().image);
}

TEST_CASE("identical config and seed give identical histories") {
  KernelCache cache;
  const auto target = make_scene("colorful", 16, 16, 0.6);
  const auto a = optimize_multicolor({target}, small_display(16), quick(40), cache);
  const auto b = optimize_multicolor({target}, small_display(16), quick(40), cache);
  REQUIRE(a.history.size() == b.history.size());
  for (std::size_t k = 0; k < a.history.size(); ++k) {
    CHECK(a.history[k].total == b.history[k].total);
    CHECK(a.history[k].image == b.history[k].image);
  }
  CHECK(a.lasers.values()[4] == b.lasers.values()[4]);
  auto other = quick(40);
  other.seed = 12;
  const auto c = optimize_multicolor({target}, small_display(16), other, cache);
  CHECK(c.history.back().total != a.history.back().total);
}

TEST_CASE("a dominant laser term pins the budget to the requested peak") {
  // with the default w2 the image term can pull the budget well off the peak,
  // so this exercises the mechanism with the laser term in charge
  KernelCache cache;
  auto cfg = quick(500);
  cfg.scale = 1.5;
  cfg.weights.laser = 10.0;
  const auto target = make_scene("natural", 16, 16, 0.6);
  const auto r = optimize_multicolor({target}, small_display(16), cfg, cache);
  const std::vector<IntensityImage> targets{target};
  const auto peaks = channel_peaks(targets);
  for (std::size_t p = 0; p < 3; ++p) {
    const double want = cfg.scale * peaks[p];
    CHECK(std::abs(r.lasers.power(p) - want) <= 0.05 * want);
  }
}

TEST_CASE("conventional baseline keeps one primary per subframe") {
  KernelCache cache;
  const auto target = make_scene("natural", 16, 16, 0.6);
  const auto r = optimize_conventional({target}, small_display(16), quick(60), cache);
  CHECK(r.conventional);
  CHECK(r.slm_phases.size() == 3);
  for (std::size_t p = 0; p < 3; ++p)
    for (std::size_t t = 0; t < 3; ++t) CHECK(r.lasers(p, t) == (p == t ? 1.0 : 0.0));

  // primaries are solved independently: changing red leaves green and blue untouched
  auto red = target;
  for (auto& v : red.channels[0].values()) v *= 0.5;
  const auto r2 = optimize_conventional({red}, small_display(16), quick(60), cache);
  CHECK(r2.slm_phases[1].values()[37] == r.slm_phases[1].values()[37]);
  CHECK(r2.slm_phases[2].values()[99] == r.slm_phases[2].values()[99]);
  CHECK(r2.slm_phases[0].values()[37] != r.slm_phases[0].values()[37]);

  auto dyn = quick(10);
  dyn.scale_mode = ScaleMode::dynamic;
  CHECK_THROWS_AS(optimize_conventional({target}, small_display(16), dyn, cache), Error);
}

TEST_CASE("ablation produces the four labelled rows") {
  KernelCache cache;
  const auto rows = run_ablation({make_scene("colorful", 16, 16, 0.6)}, small_display(16), quick(20), cache);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].variant == "Phase Constrain");
  CHECK(rows[1].variant == "TV Loss");
  CHECK(rows[2].variant == "Laser Loss");
  CHECK(rows[3].variant == "-");
  for (const auto& r : rows) CHECK(std::isfinite(r.psnr_db));
}

TEST_CASE("config validation") {
  auto cfg = quick(10);
  cfg.scale_mode = ScaleMode::dynamic;
  cfg.subframes = 2;
  cfg.s_max = 3.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.s_max = 2.0;
  CHECK_NOTHROW(cfg.validate());
  cfg.subframes = 4;
  CHECK_THROWS_AS(cfg.validate(), Error);
  KernelCache cache;
  IntensityImage hot(16, 16, 1.5);
  CHECK_THROWS_AS(optimize_multicolor({hot}, small_display(16), quick(5), cache), Error);
}

TEST_CASE("conventional cannot exceed its energy budget") {
  KernelCache cache;
  auto cfg = quick(60);
  cfg.scale = 3.0;
  const auto r = optimize_conventional({make_scene("gray", 16, 16, 2.0)}, small_display(16), cfg, cache);
  for (const auto& c : r.reconstructions[0].channels) {
    double mean = 0.0;
    for (double v : c.values()) mean += v / static_cast<double>(c.size());
    CHECK(mean <= 1.0 + 1e-9);
  }
  // residual per channel is at least (s - 1) * mean(I) = 2
  CHECK(r.final_losses().image >= 3 * 4.0 - 1e-9);
}
