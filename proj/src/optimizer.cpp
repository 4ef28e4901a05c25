#include "holo/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace holo {

void OptimizerConfig::validate() const {
  adam.validate();
  weights.validate();
  if (steps < 1) throw Error("optimizer steps must be >= 1");
  if (subframes < 1 || subframes > 3) throw Error("subframe count T must be 1, 2 or 3");
  if (scale_mode == ScaleMode::fixed) {
    if (!(scale > 0.0) || !std::isfinite(scale)) throw Error("scale must be positive");
  } else {
    if (!(s_init > 0.0) || !std::isfinite(s_init)) throw Error("s_init must be positive");
    if (!(s_max >= s_init)) throw Error("s_max must be >= s_init");
    if (s_max > static_cast<double>(subframes)) {
      throw Error("s_max cannot exceed the subframe count T");
    }
  }
  if (pyramid_levels < 0) throw Error("pyramid levels must be >= 0");
  if (!(phase_variation_weight >= 0.0)) throw Error("phase variation weight must be >= 0");
  if (!(init_mean_range >= 0.0) || !(init_offset_range >= 0.0)) {
    throw Error("initialization ranges must be >= 0");
  }
  if (!(laser_floor_level >= 0.0 && laser_floor_level < 1.0)) {
    throw Error("laser floor must lie in [0, 1)");
  }
}

namespace {

using Clock = std::chrono::steady_clock;

// Uniform doubles from the raw 64-bit stream so results do not depend on the
// standard library's distribution implementation.
class Uniform {
 public:
  explicit Uniform(std::uint64_t seed) : rng_(seed) {}
  double operator()(double lo, double hi) {
    const double u = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }

 private:
  std::mt19937_64 rng_;
};

void fill_uniform(RealGrid& g, Uniform& u, double range) {
  for (double& v : g.values()) v = range > 0.0 ? u(-range, range) : 0.0;
}

void check_targets(const std::vector<IntensityImage>& targets, const DisplayConfig& display) {
  display.validate();
  if (targets.size() != display.plane_distances.size()) {
    throw Error("expected " + std::to_string(display.plane_distances.size()) +
                " target planes, got " + std::to_string(targets.size()));
  }
  for (const auto& t : targets) {
    t.validate();
    require_same_shape(display.shape(), t.shape(), "target vs display");
    for (const auto& c : t.channels) {
      for (double v : c.values()) {
        if (v > 1.0) throw Error("target values must lie in [0, 1] before scaling");
      }
    }
  }
}

Problem base_problem(const std::vector<IntensityImage>& targets, const DisplayConfig& display,
                     const OptimizerConfig& cfg) {
  Problem pr;
  pr.display = display;
  pr.targets = targets;
  pr.weights = cfg.weights;
  pr.pyramid_levels = cfg.ablation.no_tv_loss ? 0 : cfg.pyramid_levels;
  pr.phase_variation = !cfg.ablation.no_tv_loss && !cfg.ablation.no_phase_constraint;
  pr.phase_variation_weight = cfg.phase_variation_weight;
  pr.use_laser_loss = !cfg.ablation.no_laser_loss;
  pr.use_laser_floor = cfg.laser_floor;
  pr.laser_floor = cfg.laser_floor_level;
  return pr;
}

void check_finite(const ForwardRecord& rec, const GradientSet& g, int step) {
  if (std::isfinite(rec.total) && g.finite()) return;
  std::ostringstream os;
  os << "non-finite loss or gradient at step " << step << " (total " << rec.total << ", image "
     << rec.components.image << ", laser " << rec.components.laser << ", variation "
     << rec.components.variation << ")";
  throw Error(os.str());
}

HistoryRow row(int step, const ForwardRecord& rec, double scale) {
  return {step, rec.total, rec.components.image, rec.components.laser, rec.components.variation,
          scale};
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

OptimizationResult optimize_multicolor(const std::vector<IntensityImage>& targets,
                                       const DisplayConfig& display, const OptimizerConfig& cfg,
                                       KernelCache& cache, const ProgressFn& progress) {
  const auto start = Clock::now();
  cfg.validate();
  check_targets(targets, display);
  const bool dynamic = cfg.scale_mode == ScaleMode::dynamic;
  const std::size_t T = cfg.subframes;

  Problem pr = base_problem(targets, display, cfg);
  for (std::size_t p = 0; p < kPrimaries; ++p) pr.phase_scales[p] = phase_scale(p, display);
  pr.prepare(cache);

  Variables v;
  Uniform uniform(cfg.seed);
  const bool constrained = !cfg.ablation.no_phase_constraint;
  for (std::size_t t = 0; t < T; ++t) {
    RealGrid mean(display.width, display.height);
    fill_uniform(mean, uniform, cfg.init_mean_range);
    v.phases.mean.push_back(std::move(mean));
    if (constrained) {
      RealGrid offset(display.width, display.height);
      fill_uniform(offset, uniform, cfg.init_offset_range);
      v.phases.offset.push_back(std::move(offset));
    }
  }
  // Even energy split; a single subframe starts just below full power since
  // the sigmoid never reaches 1.
  const double l0 = std::min(1.0 / std::sqrt(static_cast<double>(T)), 0.95);
  v.laser_raw.assign(kPrimaries * T, logit(l0));
  v.scale = dynamic ? cfg.s_init : cfg.scale;

  std::vector<double> x = flatten(v);
  const std::size_t n = x.size() - 1;  // the scale is the last entry
  Adam adam(n, cfg.adam);
  Adam scale_adam(1, cfg.adam);

  OptimizationResult result;
  result.history.reserve(static_cast<std::size_t>(cfg.steps) + 1);
  double previous_image = std::numeric_limits<double>::infinity();
  for (int step = 0; step < cfg.steps; ++step) {
    // the scale branch fires on the previous iteration's image loss
    const bool active = dynamic && previous_image < cfg.weights.epsilon_image;
    const ForwardRecord rec = forward(pr, v, active);
    const GradientSet g = backward(pr, v, rec);
    check_finite(rec, g, step);
    result.history.push_back(row(step, rec, v.scale));

    const std::vector<double> grad = g.flatten();
    adam.step(std::span<double>(x).first(n), std::span<const double>(grad).first(n));
    if (active) {
      const double before = x[n];
      scale_adam.step(std::span<double>(x).subspan(n), std::span<const double>(grad).subspan(n));
      x[n] = std::clamp(std::max(before, x[n]), cfg.s_init, cfg.s_max);
    }
    unflatten(x, v);
    previous_image = rec.components.image;
    if (progress && !progress(result.history.back())) break;
  }

  const ForwardRecord final_rec =
      forward(pr, v, dynamic && previous_image < cfg.weights.epsilon_image);
  result.history.push_back(row(static_cast<int>(result.history.size()), final_rec, v.scale));

  result.phases = v.phases;
  result.slm_phases = v.slm_phases();
  result.lasers = v.lasers();
  result.scale = v.scale;
  result.reconstructions = reconstruct_multiplane(result.slm_phases, result.lasers, display, cache);
  result.seconds = seconds_since(start);
  return result;
}

OptimizationResult optimize_conventional(const std::vector<IntensityImage>& targets,
                                         const DisplayConfig& display, const OptimizerConfig& cfg,
                                         KernelCache& cache, const ProgressFn& progress) {
  const auto start = Clock::now();
  if (cfg.scale_mode != ScaleMode::fixed) {
    throw Error("the conventional baseline supports a fixed scale only");
  }
  auto single = cfg;
  single.subframes = 1;
  single.ablation.no_laser_loss = true;
  single.laser_floor = false;
  single.validate();
  check_targets(targets, display);

  OptimizationResult result;
  result.conventional = true;
  result.scale = cfg.scale;
  result.history.assign(static_cast<std::size_t>(cfg.steps) + 1, HistoryRow{});
  std::size_t rows = 0;

  for (std::size_t p = 0; p < kPrimaries; ++p) {
    Problem pr = base_problem(targets, display, single);
    pr.active_primaries = {p == 0, p == 1, p == 2};
    pr.phase_scales = {1.0, 1.0, 1.0};
    pr.lasers_fixed = true;
    pr.fixed_lasers = LaserSchedule(1);
    pr.fixed_lasers(p, 0) = 1.0;
    pr.prepare(cache);

    Variables v;
    Uniform uniform(cfg.seed + 0x9E3779B97F4A7C15ULL * (p + 1));
    RealGrid mean(display.width, display.height);
    fill_uniform(mean, uniform, cfg.init_mean_range);
    v.phases.mean.push_back(std::move(mean));
    if (!cfg.ablation.no_phase_constraint) {
      RealGrid offset(display.width, display.height);
      fill_uniform(offset, uniform, cfg.init_offset_range);
      v.phases.offset.push_back(std::move(offset));
    }
    v.laser_raw.assign(kPrimaries, 0.0);
    v.scale = cfg.scale;

    std::vector<double> x = flatten(v);
    const std::size_t n = v.phases.mean[0].size() * (v.phases.constrained() ? 2 : 1);
    Adam adam(n, cfg.adam);

    int step = 0;
    auto accumulate = [&](int k, const ForwardRecord& rec) {
      auto& h = result.history[static_cast<std::size_t>(k)];
      h.step = k;
      h.total += rec.total;
      h.image += rec.components.image;
      h.laser += rec.components.laser;
      h.variation += rec.components.variation;
      h.scale = cfg.scale;
    };
    for (; step < cfg.steps; ++step) {
      const ForwardRecord rec = forward(pr, v, false);
      const GradientSet g = backward(pr, v, rec);
      check_finite(rec, g, step);
      accumulate(step, rec);
      const std::vector<double> grad = g.flatten();
      adam.step(std::span<double>(x).first(n), std::span<const double>(grad).first(n));
      unflatten(x, v);
      if (progress && !progress(result.history[static_cast<std::size_t>(step)])) {
        ++step;
        break;
      }
    }
    accumulate(step, forward(pr, v, false));
    rows = static_cast<std::size_t>(step) + 1;

    result.phases.mean.push_back(v.phases.mean[0]);
    if (v.phases.constrained()) result.phases.offset.push_back(v.phases.offset[0]);
  }
  result.history.resize(rows);

  for (std::size_t p = 0; p < kPrimaries; ++p) {
    result.slm_phases.push_back(result.phases.constrained()
                                    ? interlace(result.phases.mean[p], result.phases.offset[p])
                                    : result.phases.mean[p]);
  }
  result.lasers = LaserSchedule::field_sequential();
  for (std::size_t q = 0; q < display.plane_distances.size(); ++q) {
    result.reconstructions.push_back(reconstruct_conventional(result.slm_phases, display, q, cache));
  }
  result.seconds = seconds_since(start);
  return result;
}

std::vector<AblationRow> run_ablation(const std::vector<IntensityImage>& targets,
                                      const DisplayConfig& display, const OptimizerConfig& cfg,
                                      KernelCache& cache) {
  struct Variant {
    const char* label;
    Ablation flags;
  };
  const Variant variants[] = {
      {"Phase Constrain", {true, false, false}},
      {"TV Loss", {false, true, false}},
      {"Laser Loss", {false, false, true}},
      {"-", {false, false, false}},
  };
  std::vector<AblationRow> rows;
  for (const auto& variant : variants) {
    auto c = cfg;
    c.ablation = variant.flags;
    const auto result = optimize_multicolor(targets, display, c, cache);
    const auto report = evaluate_result(targets, result);
    rows.push_back({variant.label, report.psnr_db, report.ssim, result.final_losses().image});
  }
  return rows;
}

MetricReport evaluate_result(const std::vector<IntensityImage>& targets,
                             const OptimizationResult& result) {
  if (targets.size() != result.reconstructions.size() || targets.empty()) {
    throw Error("target and reconstruction plane counts differ");
  }
  MetricReport report = evaluate(targets[0], result.reconstructions[0], result.scale);
  if (targets.size() == 1) return report;
  const double planes = static_cast<double>(targets.size());
  report.psnr_db /= planes;
  report.ssim /= planes;
  report.michelson /= planes;
  report.histogram_distance /= planes;
  for (double& c : report.channel_psnr_db) c /= planes;
  for (std::size_t q = 1; q < targets.size(); ++q) {
    const auto r = evaluate(targets[q], result.reconstructions[q], result.scale);
    report.psnr_db += r.psnr_db / planes;
    report.ssim += r.ssim / planes;
    report.michelson += r.michelson / planes;
    report.histogram_distance += r.histogram_distance / planes;
    for (std::size_t p = 0; p < 3; ++p) report.channel_psnr_db[p] += r.channel_psnr_db[p] / planes;
  }
  return report;
}

}  // namespace holo
