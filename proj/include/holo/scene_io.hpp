#pragma once

#include <optional>
#include <string>
#include <vector>

#include "holo/field.hpp"
#include "holo/forward_model.hpp"
#include "holo/optimizer.hpp"

namespace holo {

enum class ResizePolicy { pad, crop, scale };

ResizePolicy parse_resize_policy(const std::string& name);
std::string to_string(ResizePolicy policy);

/// Target description: one image per plane. An entry of the form
/// "scene:<name>" or "scene:<name>@<brightness>" uses a procedural target instead of a file.
struct SceneSpec {
  std::vector<std::string> planes;
  std::vector<double> distances_m{0.0};
  /// Unset: decode gamma 2.2 for 8-bit files, treat 16-bit files as linear.
  std::optional<bool> gamma_decode;
  ResizePolicy resize = ResizePolicy::crop;

  void validate() const;
};

/// Decodes one PNG into linear [0, 1] RGB and fits it to `shape`.
IntensityImage load_image(const std::string& path, Shape shape, std::optional<bool> gamma_decode,
                          ResizePolicy policy);

/// One target per plane.
std::vector<IntensityImage> load_target(const SceneSpec& spec, Shape shape);

/// Centre pad (with black) or centre crop each axis independently.
IntensityImage fit_pad_crop(const IntensityImage& image, Shape shape);
/// Bilinear resampling to `shape` (aspect ratio not preserved).
IntensityImage fit_scale(const IntensityImage& image, Shape shape);

/// Grayscale PNG of wrap+quantize levels; 8-bit file for bits <= 8, else 16-bit.
void save_phase(const RealGrid& phase, int bits, const std::string& path);
/// Reads a phase PNG written by save_phase and dequantizes it.
RealGrid load_phase(const std::string& path, int bits);

/// 8-bit tone map of linear [0, s] with optional 1/2.2 gamma encode.
std::uint8_t tone_map(double value, double scale, bool gamma_encode);
void save_intensity_png(const IntensityImage& image, double scale, bool gamma_encode,
                        const std::string& path);
/// Writes <prefix>_plane<q>.png for every plane, plus <prefix>_strip.png placing each
/// target (scaled by s) above its reconstruction when targets are given.
std::vector<std::string> save_reconstruction(const std::vector<IntensityImage>& images, double scale,
                                             const std::string& prefix, bool gamma_encode = true,
                                             const std::vector<IntensityImage>* targets = nullptr);

/// CSV "primary,l_t1,...,l_tT" with rows R, G, B.
std::string lasers_csv(const LaserSchedule& lasers);
LaserSchedule parse_lasers_csv(const std::string& text);

/// CSV "step,L_total,L_image,L_laser,L_variation,s".
std::string history_csv(const std::vector<HistoryRow>& history);

/// Key/value CSV "key,value".
std::string report_csv(const MetricReport& report, const OptimizationResult& result);

/// Table with rows = metrics and columns = scales.
struct CompareTable {
  std::vector<double> scales;
  std::vector<std::string> metrics;
  std::vector<std::vector<double>> values;  // [metric][scale]

  bool operator==(const CompareTable&) const = default;
};
std::string compare_csv(const CompareTable& table);
CompareTable parse_compare_csv(const std::string& text);

/// "component,PSNR,SSIM"
std::string ablation_csv(const std::vector<AblationRow>& rows);

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& text);

}  // namespace holo
