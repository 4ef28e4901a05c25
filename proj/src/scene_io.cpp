#include "holo/scene_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "holo/encoding.hpp"
#include "holo/png_io.hpp"
#include "holo/scenes.hpp"

namespace holo {

namespace {

constexpr double kGamma = 2.2;
constexpr const char* kScenePrefix = "scene:";

// Shortest representation that parses back to the same double.
std::string num(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double parse_double(const std::string& s, const std::string& what) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end) throw Error("bad number '" + s + "' in " + what);
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

}  // namespace

ResizePolicy parse_resize_policy(const std::string& name) {
  if (name == "pad") return ResizePolicy::pad;
  if (name == "crop") return ResizePolicy::crop;
  if (name == "scale") return ResizePolicy::scale;
  throw Error("unknown resize policy '" + name + "' (pad, crop or scale)");
}

std::string to_string(ResizePolicy policy) {
  switch (policy) {
    case ResizePolicy::pad: return "pad";
    case ResizePolicy::crop: return "crop";
    case ResizePolicy::scale: return "scale";
  }
  return "?";
}

void SceneSpec::validate() const {
  if (planes.empty()) throw Error("scene needs at least one plane image");
  if (planes.size() != distances_m.size()) {
    throw Error("scene lists " + std::to_string(planes.size()) + " plane images but " +
                std::to_string(distances_m.size()) + " distances");
  }
  for (double d : distances_m) {
    if (!std::isfinite(d)) throw Error("plane distances must be finite");
  }
}

IntensityImage fit_pad_crop(const IntensityImage& image, Shape shape) {
  IntensityImage out(shape.width, shape.height);
  // signed offset of the source origin inside the destination
  const long ox = (static_cast<long>(shape.width) - static_cast<long>(image.width())) / 2;
  const long oy = (static_cast<long>(shape.height) - static_cast<long>(image.height())) / 2;
  for (std::size_t y = 0; y < shape.height; ++y) {
    const long sy = static_cast<long>(y) - oy;
    if (sy < 0 || sy >= static_cast<long>(image.height())) continue;
    for (std::size_t x = 0; x < shape.width; ++x) {
      const long sx = static_cast<long>(x) - ox;
      if (sx < 0 || sx >= static_cast<long>(image.width())) continue;
      for (std::size_t p = 0; p < 3; ++p) {
        out.channels[p](x, y) = image.channels[p](static_cast<std::size_t>(sx), static_cast<std::size_t>(sy));
      }
    }
  }
  return out;
}

IntensityImage fit_scale(const IntensityImage& image, Shape shape) {
  IntensityImage out(shape.width, shape.height);
  const double fx = static_cast<double>(image.width()) / shape.width;
  const double fy = static_cast<double>(image.height()) / shape.height;
  for (std::size_t y = 0; y < shape.height; ++y) {
    const double sy = std::clamp((y + 0.5) * fy - 0.5, 0.0, image.height() - 1.0);
    const auto y0 = static_cast<std::size_t>(sy);
    const std::size_t y1 = std::min(y0 + 1, image.height() - 1);
    const double wy = sy - y0;
    for (std::size_t x = 0; x < shape.width; ++x) {
      const double sx = std::clamp((x + 0.5) * fx - 0.5, 0.0, image.width() - 1.0);
      const auto x0 = static_cast<std::size_t>(sx);
      const std::size_t x1 = std::min(x0 + 1, image.width() - 1);
      const double wx = sx - x0;
      for (std::size_t p = 0; p < 3; ++p) {
        const auto& c = image.channels[p];
        out.channels[p](x, y) = (1 - wy) * ((1 - wx) * c(x0, y0) + wx * c(x1, y0)) +
                                wy * ((1 - wx) * c(x0, y1) + wx * c(x1, y1));
      }
    }
  }
  return out;
}

IntensityImage load_image(const std::string& path, Shape shape, std::optional<bool> gamma_decode,
                          ResizePolicy policy) {
  IntensityImage linear;
  if (path.rfind(kScenePrefix, 0) == 0) {
    std::string name = path.substr(std::string(kScenePrefix).size());
    double brightness = 1.0;
    if (const auto at = name.find('@'); at != std::string::npos) {
      brightness = parse_double(name.substr(at + 1), path);
      name.resize(at);
    }
    return make_scene(name, shape.width, shape.height, brightness);
  }
  const PngImage png = read_png(path);
  const bool decode = gamma_decode.value_or(png.bit_depth == 8);
  const double max = png.bit_depth == 8 ? 255.0 : 65535.0;
  linear = IntensityImage(png.width, png.height);
  const bool gray = png.channels < 3;
  for (std::size_t y = 0; y < png.height; ++y) {
    for (std::size_t x = 0; x < png.width; ++x) {
      for (int p = 0; p < 3; ++p) {
        double v = png.at(x, y, gray ? 0 : p) / max;
        if (decode) v = std::pow(v, kGamma);
        linear.channels[static_cast<std::size_t>(p)](x, y) = v;
      }
    }
  }
  return policy == ResizePolicy::scale ? fit_scale(linear, shape) : fit_pad_crop(linear, shape);
}

std::vector<IntensityImage> load_target(const SceneSpec& spec, Shape shape) {
  spec.validate();
  std::vector<IntensityImage> out;
  for (const auto& path : spec.planes) {
    out.push_back(load_image(path, shape, spec.gamma_decode, spec.resize));
  }
  return out;
}

void save_phase(const RealGrid& phase, int bits, const std::string& path) {
  PngImage png;
  png.width = phase.width();
  png.height = phase.height();
  png.channels = 1;
  png.bit_depth = bits <= 8 ? 8 : 16;
  png.samples = quantize_phase(phase, bits);
  write_png(path, png);
}

RealGrid load_phase(const std::string& path, int bits) {
  const PngImage png = read_png(path);
  if (png.channels != 1) throw Error("'" + path + "' is not a grayscale phase map");
  if ((bits <= 8) != (png.bit_depth == 8)) {
    throw Error("'" + path + "' bit depth does not match " + std::to_string(bits) + "-bit phases");
  }
  RealGrid out(png.width, png.height);
  for (std::size_t i = 0; i < out.size(); ++i) out.values()[i] = dequantize_phase(png.samples[i], bits);
  return out;
}

std::uint8_t tone_map(double value, double scale, bool gamma_encode) {
  double v = std::clamp(value / scale, 0.0, 1.0);
  if (gamma_encode) v = std::pow(v, 1.0 / kGamma);
  return static_cast<std::uint8_t>(std::lround(255.0 * v));
}

namespace {

PngImage to_png(const IntensityImage& image, double scale, bool gamma_encode) {
  PngImage png;
  png.width = image.width();
  png.height = image.height();
  png.channels = 3;
  png.bit_depth = 8;
  png.samples.resize(png.width * png.height * 3);
  for (std::size_t i = 0; i < png.width * png.height; ++i) {
    for (std::size_t p = 0; p < 3; ++p) {
      png.samples[3 * i + p] = tone_map(image.channels[p].values()[i], scale, gamma_encode);
    }
  }
  return png;
}

}  // namespace

void save_intensity_png(const IntensityImage& image, double scale, bool gamma_encode,
                        const std::string& path) {
  if (!(scale > 0.0)) throw Error("tone-map scale must be positive");
  write_png(path, to_png(image, scale, gamma_encode));
}

std::vector<std::string> save_reconstruction(const std::vector<IntensityImage>& images, double scale,
                                             const std::string& prefix, bool gamma_encode,
                                             const std::vector<IntensityImage>* targets) {
  if (images.empty()) throw Error("no reconstructions to save");
  if (!(scale > 0.0)) throw Error("tone-map scale must be positive");
  std::vector<std::string> written;
  for (std::size_t q = 0; q < images.size(); ++q) {
    const std::string path = prefix + "_plane" + std::to_string(q) + ".png";
    save_intensity_png(images[q], scale, gamma_encode, path);
    written.push_back(path);
  }

  // strip: planes side by side, targets (if any) on the top row
  const std::size_t w = images[0].width(), h = images[0].height();
  const std::size_t rows = targets ? 2 : 1;
  PngImage strip;
  strip.width = w * images.size();
  strip.height = h * rows;
  strip.channels = 3;
  strip.bit_depth = 8;
  strip.samples.assign(strip.width * strip.height * 3, 0);
  auto blit = [&](const IntensityImage& img, double tone_scale, std::size_t col, std::size_t row) {
    require_same_shape(img.shape(), images[0].shape(), "comparison strip");
    const PngImage tile = to_png(img, tone_scale, gamma_encode);
    for (std::size_t y = 0; y < h; ++y) {
      std::copy_n(tile.samples.begin() + static_cast<long>(y * w * 3), w * 3,
                  strip.samples.begin() + static_cast<long>(((row * h + y) * strip.width + col * w) * 3));
    }
  };
  for (std::size_t q = 0; q < images.size(); ++q) {
    if (targets) {
      if (targets->size() != images.size()) throw Error("target and reconstruction plane counts differ");
      blit((*targets)[q], 1.0, q, 0);
    }
    blit(images[q], scale, q, rows - 1);
  }
  const std::string strip_path = prefix + "_strip.png";
  write_png(strip_path, strip);
  written.push_back(strip_path);
  return written;
}

std::string lasers_csv(const LaserSchedule& lasers) {
  std::ostringstream os;
  os << "primary";
  for (std::size_t t = 0; t < lasers.subframes(); ++t) os << ",l_t" << t + 1;
  os << '\n';
  const char* names[] = {"R", "G", "B"};
  for (std::size_t p = 0; p < kPrimaries; ++p) {
    os << names[p];
    for (std::size_t t = 0; t < lasers.subframes(); ++t) os << ',' << num(lasers(p, t));
    os << '\n';
  }
  return os.str();
}

LaserSchedule parse_lasers_csv(const std::string& text) {
  const auto rows = lines(text);
  if (rows.size() != 1 + kPrimaries) throw Error("laser schedule CSV needs a header and 3 rows");
  const auto header = split(rows[0], ',');
  if (header.size() < 2 || header.size() > 4 || header[0] != "primary") {
    throw Error("laser schedule CSV header must be primary,l_t1[,l_t2[,l_t3]]");
  }
  LaserSchedule out(header.size() - 1);
  const char* names[] = {"R", "G", "B"};
  for (std::size_t p = 0; p < kPrimaries; ++p) {
    const auto cells = split(rows[p + 1], ',');
    if (cells.size() != header.size() || cells[0] != names[p]) {
      throw Error("laser schedule CSV row " + std::to_string(p + 2) + " is malformed");
    }
    for (std::size_t t = 0; t < out.subframes(); ++t) {
      out(p, t) = parse_double(cells[t + 1], "laser schedule CSV");
    }
  }
  out.validate();
  return out;
}

std::string history_csv(const std::vector<HistoryRow>& history) {
  std::ostringstream os;
  os << "step,L_total,L_image,L_laser,L_variation,s\n";
  for (const auto& r : history) {
    os << r.step << ',' << num(r.total) << ',' << num(r.image) << ',' << num(r.laser) << ','
       << num(r.variation) << ',' << num(r.scale) << '\n';
  }
  return os.str();
}

std::string report_csv(const MetricReport& report, const OptimizationResult& result) {
  std::ostringstream os;
  os << "key,value\n";
  os << "scheme," << (result.conventional ? "conventional" : "multicolor") << '\n';
  os << "psnr_db," << num(report.psnr_db) << '\n';
  const char* names[] = {"r", "g", "b"};
  for (std::size_t p = 0; p < 3; ++p) {
    os << "psnr_db_" << names[p] << ',' << num(report.channel_psnr_db[p]) << '\n';
  }
  os << "ssim," << num(report.ssim) << '\n';
  os << "michelson," << num(report.michelson) << '\n';
  os << "histogram_distance," << num(report.histogram_distance) << '\n';
  os << "final_scale," << num(result.scale) << '\n';
  const auto& last = result.final_losses();
  os << "L_total," << num(last.total) << '\n';
  os << "L_image," << num(last.image) << '\n';
  os << "L_laser," << num(last.laser) << '\n';
  os << "L_variation," << num(last.variation) << '\n';
  os << "steps," << result.history.size() - 1 << '\n';
  return os.str();
}

std::string compare_csv(const CompareTable& table) {
  std::ostringstream os;
  os << "metric";
  for (double s : table.scales) os << ',' << num(s);
  os << '\n';
  for (std::size_t m = 0; m < table.metrics.size(); ++m) {
    os << table.metrics[m];
    for (double v : table.values[m]) os << ',' << num(v);
    os << '\n';
  }
  return os.str();
}

CompareTable parse_compare_csv(const std::string& text) {
  const auto rows = lines(text);
  if (rows.empty()) throw Error("empty compare table");
  const auto header = split(rows[0], ',');
  if (header.size() < 2 || header[0] != "metric") throw Error("compare table header must start with 'metric'");
  CompareTable t;
  for (std::size_t i = 1; i < header.size(); ++i) t.scales.push_back(parse_double(header[i], "compare header"));
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto cells = split(rows[r], ',');
    if (cells.size() != header.size()) {
      throw Error("compare table row " + std::to_string(r + 1) + " has the wrong column count");
    }
    t.metrics.push_back(cells[0]);
    std::vector<double> values;
    for (std::size_t i = 1; i < cells.size(); ++i) values.push_back(parse_double(cells[i], "compare table"));
    t.values.push_back(std::move(values));
  }
  return t;
}

std::string ablation_csv(const std::vector<AblationRow>& rows) {
  std::ostringstream os;
  os << "component,PSNR,SSIM\n";
  for (const auto& r : rows) os << r.variant << ',' << num(r.psnr_db) << ',' << num(r.ssim) << '\n';
  return os.str();
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw Error("cannot write '" + path + "'");
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace holo
