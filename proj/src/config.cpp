#include "holo/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <filesystem>
#include <map>
#include <set>

namespace holo {

namespace {

// Allowed keys per mapping path; "" is the document root.
const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"", {"display", "scene", "optimizer", "output", "compare"}},
      {"display",
       {"wavelengths_nm", "anchor_nm", "pitch_um", "width", "height", "aperture",
        "phase_scale_inverse"}},
      {"scene", {"planes", "distances_m", "gamma_decode", "resize", "scale", "dynamic"}},
      {"scene.dynamic", {"s_init", "s_max", "epsilon"}},
      {"optimizer",
       {"lr", "steps", "T", "seed", "beta1", "beta2", "adam_epsilon", "weights", "ablation",
        "pyramid_levels", "phase_variation_weight", "init_mean_range", "init_offset_range",
        "laser_floor", "laser_floor_level"}},
      {"optimizer.weights", {"w1", "w2", "w3", "w4"}},
      {"optimizer.ablation", {"no_phase_constraint", "no_tv", "no_laser"}},
      {"output", {"phase_bits", "gamma_encode"}},
      {"compare", {"scales"}},
  };
  return s;
}

class Reader {
 public:
  Reader(std::string origin, std::set<std::string> overridden)
      : origin_(std::move(origin)), overridden_(std::move(overridden)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& key,
                         const std::string& message) const {
    std::string where = origin_;
    if (overridden_.count(key)) {
      where = "override " + key;
    } else if (node.IsDefined() && node.Mark().line >= 0) {
      where += ":" + std::to_string(node.Mark().line + 1);
    }
    throw Error(where + ": " + key + ": " + message);
  }

  void check_keys(const YAML::Node& node, const std::string& path) const {
    if (!node.IsDefined() || node.IsNull()) return;
    if (!node.IsMap()) fail(node, path.empty() ? "<root>" : path, "expected a mapping");
    const auto it = schema().find(path);
    for (const auto& kv : node) {
      const std::string key = kv.first.as<std::string>();
      const std::string full = path.empty() ? key : path + "." + key;
      if (it == schema().end() || !it->second.count(key)) fail(kv.first, full, "unknown key");
      if (schema().count(full)) check_keys(kv.second, full);
    }
  }

  template <typename T>
  void get(const YAML::Node& parent, const std::string& path, const char* key, T& out) const {
    const YAML::Node node = parent[key];
    if (!node.IsDefined() || node.IsNull()) return;
    const std::string full = path + "." + key;
    try {
      out = node.as<T>();
    } catch (const YAML::Exception&) {
      fail(node, full, std::string("expected ") + type_name<T>());
    }
  }

  template <typename T>
  void get_list(const YAML::Node& parent, const std::string& path, const char* key,
                std::vector<T>& out) const {
    const YAML::Node node = parent[key];
    if (!node.IsDefined() || node.IsNull()) return;
    const std::string full = path + "." + key;
    if (!node.IsSequence()) fail(node, full, "expected a list");
    out.clear();
    for (const auto& item : node) {
      try {
        out.push_back(item.as<T>());
      } catch (const YAML::Exception&) {
        fail(item, full, std::string("expected a list of ") + type_name<T>());
      }
    }
  }

  template <typename T>
  static const char* type_name() {
    if constexpr (std::is_same_v<T, bool>) return "true or false";
    else if constexpr (std::is_integral_v<T>) return "an integer";
    else if constexpr (std::is_floating_point_v<T>) return "a number";
    else return "a string";
  }

 private:
  std::string origin_;
  std::set<std::string> overridden_;
};

void apply_override(YAML::Node& root, const std::string& spec, std::set<std::string>& keys) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw Error("override '" + spec + "' must look like dotted.key=value");
  }
  const std::string key = spec.substr(0, eq);
  YAML::Node value;
  try {
    value = YAML::Load(spec.substr(eq + 1));
  } catch (const YAML::Exception& e) {
    throw Error("override " + key + ": cannot parse value: " + e.msg);
  }
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    parts.push_back(key.substr(start, dot - start));
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  YAML::Node cur = root;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    if (cur[parts[i]].IsDefined() && !cur[parts[i]].IsMap() && !cur[parts[i]].IsNull()) {
      throw Error("override " + key + ": '" + parts[i] + "' is not a mapping");
    }
    if (!cur[parts[i]].IsDefined() || cur[parts[i]].IsNull()) cur[parts[i]] = YAML::Node(YAML::NodeType::Map);
    YAML::Node next = cur[parts[i]];
    cur.reset(next);
  }
  cur[parts.back()] = value;
  keys.insert(key);
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::vector<std::string>& overrides,
                       const std::string& origin) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw Error(origin + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  if (!root.IsDefined() || root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  std::set<std::string> overridden;
  for (const auto& o : overrides) apply_override(root, o, overridden);

  Reader r(origin, overridden);
  r.check_keys(root, "");

  RunConfig cfg;
  if (const auto d = root["display"]) {
    std::vector<double> wl;
    r.get_list(d, "display", "wavelengths_nm", wl);
    if (!wl.empty()) {
      if (wl.size() != 3) r.fail(d["wavelengths_nm"], "display.wavelengths_nm", "expected 3 values");
      for (std::size_t p = 0; p < 3; ++p) cfg.display.wavelengths[p] = wl[p] * 1e-9;
    }
    double anchor = cfg.display.anchor_wavelength * 1e9, pitch = cfg.display.pitch * 1e6;
    r.get(d, "display", "anchor_nm", anchor);
    r.get(d, "display", "pitch_um", pitch);
    cfg.display.anchor_wavelength = anchor * 1e-9;
    cfg.display.pitch = pitch * 1e-6;
    r.get(d, "display", "width", cfg.display.width);
    r.get(d, "display", "height", cfg.display.height);
    r.get(d, "display", "aperture", cfg.display.aperture);
    r.get(d, "display", "phase_scale_inverse", cfg.display.phase_scale_inverse);
    // nm -> m conversion can round; snap the anchor to the matching primary
    for (double w : cfg.display.wavelengths) {
      if (std::abs(w - cfg.display.anchor_wavelength) < 1e-18) cfg.display.anchor_wavelength = w;
    }
  }

  bool have_scale = false;
  if (const auto s = root["scene"]) {
    r.get_list(s, "scene", "planes", cfg.scene.planes);
    r.get_list(s, "scene", "distances_m", cfg.scene.distances_m);
    if (s["gamma_decode"].IsDefined() && !s["gamma_decode"].IsNull()) {
      bool g = true;
      r.get(s, "scene", "gamma_decode", g);
      cfg.scene.gamma_decode = g;
    }
    std::string resize = to_string(cfg.scene.resize);
    r.get(s, "scene", "resize", resize);
    try {
      cfg.scene.resize = parse_resize_policy(resize);
    } catch (const Error& e) {
      r.fail(s["resize"], "scene.resize", e.what());
    }
    if (s["scale"].IsDefined() && !s["scale"].IsNull()) {
      have_scale = true;
      r.get(s, "scene", "scale", cfg.optimizer.scale);
    }
    if (const auto dyn = s["dynamic"]; dyn.IsDefined() && !dyn.IsNull()) {
      if (have_scale) r.fail(dyn, "scene.dynamic", "give either scene.scale or scene.dynamic, not both");
      cfg.optimizer.scale_mode = ScaleMode::dynamic;
      r.get(dyn, "scene.dynamic", "s_init", cfg.optimizer.s_init);
      r.get(dyn, "scene.dynamic", "s_max", cfg.optimizer.s_max);
      r.get(dyn, "scene.dynamic", "epsilon", cfg.optimizer.weights.epsilon_image);
    }
    if (!cfg.scene.planes.empty() && cfg.scene.planes.size() != cfg.scene.distances_m.size()) {
      const auto node = s["distances_m"].IsDefined() ? s["distances_m"] : s["planes"];
      r.fail(node, "scene.distances_m", "expected one distance per plane image");
    }
  }
  cfg.display.plane_distances = cfg.scene.distances_m;

  if (const auto o = root["optimizer"]) {
    auto& oc = cfg.optimizer;
    r.get(o, "optimizer", "lr", oc.adam.learning_rate);
    r.get(o, "optimizer", "beta1", oc.adam.beta1);
    r.get(o, "optimizer", "beta2", oc.adam.beta2);
    r.get(o, "optimizer", "adam_epsilon", oc.adam.epsilon);
    r.get(o, "optimizer", "steps", oc.steps);
    r.get(o, "optimizer", "T", oc.subframes);
    r.get(o, "optimizer", "seed", oc.seed);
    r.get(o, "optimizer", "pyramid_levels", oc.pyramid_levels);
    r.get(o, "optimizer", "phase_variation_weight", oc.phase_variation_weight);
    r.get(o, "optimizer", "init_mean_range", oc.init_mean_range);
    r.get(o, "optimizer", "init_offset_range", oc.init_offset_range);
    r.get(o, "optimizer", "laser_floor", oc.laser_floor);
    r.get(o, "optimizer", "laser_floor_level", oc.laser_floor_level);
    if (const auto w = o["weights"]) {
      r.get(w, "optimizer.weights", "w1", oc.weights.image);
      r.get(w, "optimizer.weights", "w2", oc.weights.laser);
      r.get(w, "optimizer.weights", "w3", oc.weights.variation);
      r.get(w, "optimizer.weights", "w4", oc.weights.scale);
    }
    if (const auto a = o["ablation"]) {
      r.get(a, "optimizer.ablation", "no_phase_constraint", oc.ablation.no_phase_constraint);
      r.get(a, "optimizer.ablation", "no_tv", oc.ablation.no_tv_loss);
      r.get(a, "optimizer.ablation", "no_laser", oc.ablation.no_laser_loss);
    }
  }

  if (const auto out = root["output"]) {
    r.get(out, "output", "phase_bits", cfg.output.phase_bits);
    r.get(out, "output", "gamma_encode", cfg.output.gamma_encode);
  }
  if (const auto c = root["compare"]) r.get_list(c, "compare", "scales", cfg.compare_scales);

  // semantic validation, reported against the owning section
  auto check = [&](const char* section, auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      YAML::Node key;  // point at the section's own key line
      for (const auto& kv : root) {
        if (kv.first.as<std::string>() == section) key = kv.first;
      }
      r.fail(key, section, e.what());
    }
  };
  check("display", [&] { cfg.display.validate(); });
  check("scene", [&] {
    if (!cfg.scene.planes.empty()) cfg.scene.validate();
  });
  check("optimizer", [&] { cfg.optimizer.validate(); });
  check("output", [&] {
    if (cfg.output.phase_bits < 1 || cfg.output.phase_bits > 16) {
      throw Error("phase_bits must lie in [1, 16]");
    }
  });
  check("compare", [&] {
    if (cfg.compare_scales.empty()) throw Error("scales must not be empty");
    for (double s : cfg.compare_scales) {
      if (!(s > 0.0)) throw Error("scales must be positive");
    }
  });

  YAML::Emitter emitter;
  emitter << root;
  cfg.canonical = emitter.c_str();
  return cfg;
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  RunConfig cfg = parse_config(read_text(path), overrides, path);
  const auto base = std::filesystem::path(path).parent_path();
  for (auto& plane : cfg.scene.planes) {
    if (plane.rfind("scene:", 0) == 0) continue;
    const std::filesystem::path p(plane);
    if (p.is_relative()) plane = (base / p).lexically_normal().string();
  }
  return cfg;
}

}  // namespace holo
