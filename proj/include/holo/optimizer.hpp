#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "holo/adam.hpp"
#include "holo/encoding.hpp"
#include "holo/forward_model.hpp"
#include "holo/gradient.hpp"
#include "holo/losses.hpp"
#include "holo/metrics.hpp"

namespace holo {

enum class ScaleMode { fixed, dynamic };

struct Ablation {
  bool no_phase_constraint = false;
  bool no_tv_loss = false;    // drops both the phase and the reconstruction variation terms
  bool no_laser_loss = false;
};

struct OptimizerConfig {
  AdamConfig adam;
  int steps = 1000;
  std::size_t subframes = 3;

  ScaleMode scale_mode = ScaleMode::fixed;
  double scale = 1.0;   // fixed mode
  double s_init = 1.0;  // dynamic mode
  double s_max = 3.0;

  std::uint64_t seed = 0;
  Ablation ablation;
  LossWeights weights;

  int pyramid_levels = 3;
  double phase_variation_weight = 0.03;
  bool laser_floor = false;
  double laser_floor_level = 0.05;

  /// Mean phases start uniform in [-init_mean_range, init_mean_range],
  /// offsets uniform in [-init_offset_range, init_offset_range].
  double init_mean_range = 2.0;
  double init_offset_range = 0.1;

  void validate() const;
};

struct HistoryRow {
  int step = 0;
  double total = 0.0;
  double image = 0.0;
  double laser = 0.0;
  double variation = 0.0;
  double scale = 0.0;
};

struct OptimizationResult {
  bool conventional = false;
  PhaseVariables phases;            // T entries, or one per primary for the baseline
  std::vector<RealGrid> slm_phases; // interlaced maps actually displayed
  LaserSchedule lasers;
  double scale = 1.0;
  std::vector<HistoryRow> history;
  std::vector<IntensityImage> reconstructions;  // per plane
  double seconds = 0.0;

  const HistoryRow& final_losses() const { return history.back(); }
};

/// Called after every step; return false to stop early.
using ProgressFn = std::function<bool(const HistoryRow&)>;

/// Targets: one linear RGB image per configured plane, values in [0, 1].
OptimizationResult optimize_multicolor(const std::vector<IntensityImage>& targets,
                                       const DisplayConfig& display, const OptimizerConfig& cfg,
                                       KernelCache& cache, const ProgressFn& progress = {});

/// Field-sequential baseline: three independent single-primary problems with
/// unit laser amplitude in each primary's own subframe. Fixed scale only.
OptimizationResult optimize_conventional(const std::vector<IntensityImage>& targets,
                                         const DisplayConfig& display, const OptimizerConfig& cfg,
                                         KernelCache& cache, const ProgressFn& progress = {});

struct AblationRow {
  std::string variant;  // removed component, "-" for the full model
  double psnr_db = 0.0;
  double ssim = 0.0;
  double image_loss = 0.0;
};

/// Full model plus the three single-removal variants, in the order
/// Phase Constrain, TV Loss, Laser Loss, full.
std::vector<AblationRow> run_ablation(const std::vector<IntensityImage>& targets,
                                      const DisplayConfig& display, const OptimizerConfig& cfg,
                                      KernelCache& cache);

/// Metrics of a result against the first-plane target (averaged over planes).
MetricReport evaluate_result(const std::vector<IntensityImage>& targets,
                             const OptimizationResult& result);

}  // namespace holo
