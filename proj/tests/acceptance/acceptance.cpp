// Runs the ten acceptance checks and prints one PASS/FAIL line per check.
// Usage: acceptance [check numbers...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "holo/calibration.hpp"
#include "holo/cli.hpp"
#include "holo/config.hpp"
#include "holo/encoding.hpp"
#include "holo/gradient.hpp"
#include "holo/optimizer.hpp"
#include "holo/propagation.hpp"
#include "holo/scene_io.hpp"
#include "holo/scenes.hpp"

using namespace holo;
namespace fs = std::filesystem;

namespace {

constexpr std::size_t kSize = 256;
constexpr int kSteps = 500;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string f(double v, int prec = 3) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

fs::path scratch() {
  const auto dir = fs::temp_directory_path() / "holo_acceptance";
  fs::create_directories(dir);
  return dir;
}

ComplexField random_field(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexField u(n, n, 8e-6);
  for (auto& v : u.values()) v = {g(rng), g(rng)};
  return u;
}

double norm(std::span<const Complex> a) {
  double s = 0.0;
  for (auto v : a) s += std::norm(v);
  return std::sqrt(s);
}

double diff_norm(std::span<const Complex> a, std::span<const Complex> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::norm(a[i] - b[i]);
  return std::sqrt(s);
}

// Fixed-scale multicolor runs made by the other checks, reused by the laser budget check.
struct BudgetCase {
  std::string label;
  LaserSchedule lasers;
  std::array<double, 3> peaks{};
  double scale = 1.0;
};
std::vector<BudgetCase> budget_cases;

Outcome gradient_check() {
  const auto t0 = std::chrono::steady_clock::now();
  KernelCache cache;
  Problem pr;
  pr.display.width = pr.display.height = 8;
  pr.display.plane_distances = {0.0, 0.002};
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (std::size_t q = 0; q < 2; ++q) {
    IntensityImage t(8, 8);
    for (auto& c : t.channels)
      for (auto& v : c.values()) v = u01(rng);
    pr.targets.push_back(t);
  }
  pr.phase_variation_weight = OptimizerConfig{}.phase_variation_weight;
  for (std::size_t p = 0; p < 3; ++p) pr.phase_scales[p] = phase_scale(p, pr.display);
  pr.prepare(cache);

  Variables v;
  std::uniform_real_distribution<double> ph(-3.0, 3.0), off(-0.5, 0.5), raw(-1.5, 1.5);
  for (std::size_t t = 0; t < 2; ++t) {
    RealGrid m(8, 8), o(8, 8);
    for (auto& x : m.values()) x = ph(rng);
    for (auto& x : o.values()) x = off(rng);
    v.phases.mean.push_back(m);
    v.phases.offset.push_back(o);
  }
  for (int i = 0; i < 6; ++i) v.laser_raw.push_back(raw(rng));
  v.scale = 1.3;

  const auto plain = check_gradients(pr, v, 1e-4, 64, 7, false);
  const auto bonus = check_gradients(pr, v, 1e-4, 64, 8, true);
  const double err = std::max(plain.max_relative_error, bonus.max_relative_error);
  const double secs = seconds_since(t0);
  return {err <= 1e-4 && plain.coordinates >= 64 + 6 + 1 && secs <= 60.0,
          "max relative error " + f(err) + " over " + std::to_string(plain.coordinates) +
              " coordinates (64 phase + 6 laser + scale), with and without the scale bonus, " + f(secs) + " s"};
}

Outcome propagation_check() {
  const double green = 520e-9, pitch = 8e-6;
  // d = 0 identity
  const auto k0 = build_kernel(green, 0.0, {64, 64}, pitch);
  const auto u = random_field(64, 3);
  const double identity = diff_norm(propagate(u, k0).values(), u.values()) / norm(u.values());

  // band-limited field: two Gaussian beams well inside the frame
  const std::size_t n = 128;
  ComplexField g(n, n, pitch);
  for (std::size_t y = 0; y < n; ++y) {
    for (std::size_t x = 0; x < n; ++x) {
      const double dx = x - 59.0, dy = y - 67.0, ex = x - 70.0, ey = y - 60.0;
      g(x, y) = std::polar(std::exp(-(dx * dx + dy * dy) / 72.0), 0.3 * x) +
                std::polar(0.5 * std::exp(-(ex * ex + ey * ey) / 50.0), -0.2 * y);
    }
  }
  const auto kf = build_kernel(green, 0.005, {n, n}, pitch);
  const auto kb = build_kernel(green, -0.005, {n, n}, pitch);
  const auto moved = propagate(g, kf);
  const double e0 = norm(g.values()), e1 = norm(moved.values());
  const double energy = std::abs(e1 * e1 - e0 * e0) / (e0 * e0);
  const double round_trip = diff_norm(propagate(moved, kb).values(), g.values()) / e0;

  double adjoint = 0.0;
  for (double d : {0.0, 0.004, -0.01}) {
    const auto k = build_kernel(green, d, {64, 64}, pitch, 0.7);
    const auto a = random_field(64, 11), b = random_field(64, 12);
    const Complex lhs = inner_product(propagate(a, k).values(), b.values());
    const Complex rhs = inner_product(a.values(), adjoint_propagate(b, k).values());
    adjoint = std::max(adjoint, std::abs(lhs - rhs) / std::abs(lhs));
  }
  const bool pass = identity <= 1e-9 && round_trip <= 1e-6 && energy <= 1e-6 && adjoint <= 1e-9;
  return {pass, "identity " + f(identity) + ", round trip " + f(round_trip) + ", energy " + f(energy) +
                    ", adjoint " + f(adjoint)};
}

RunConfig natural_config(const fs::path& dir) {
  const auto path = dir / "natural.yaml";
  write_text(path.string(),
             "display: {width: " + std::to_string(kSize) + ", height: " + std::to_string(kSize) + "}\n" +
                 "scene:\n  planes: [\"scene:natural\"]\n  distances_m: [0.0]\n  scale: 1.0\n" +
                 "optimizer: {steps: " + std::to_string(kSteps) + ", T: 3, seed: 1}\n" +
                 "compare:\n  scales: [1.0, 1.5, 2.0, 2.5, 3.0]\n");
  return load_config(path.string());
}

Outcome headroom_check() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto dir = scratch() / "compare";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto cfg = natural_config(dir);
  std::ostringstream out, err;
  const int status = cli::run({"holo", "compare", "-c", (dir / "natural.yaml").string(), "-o", (dir / "out").string(),
                               "-q"}, out, err);
  if (status != 0) return {false, "compare failed: " + err.str()};
  const auto table = parse_compare_csv(read_text((dir / "out/compare.csv").string()));
  const double secs = seconds_since(t0);

  const auto targets = load_target(cfg.scene, cfg.display.shape());
  const auto peaks = channel_peaks(targets);
  for (double s : table.scales) {
    std::ostringstream name;
    name << s;
    budget_cases.push_back({"natural s=" + name.str(),
                            parse_lasers_csv(read_text((dir / "out" / ("lasers_multicolor_s" + name.str() + ".csv")).string())),
                            peaks, s});
  }

  const auto& multi = table.values[0];
  const auto& conv = table.values[3];
  const std::size_t n = table.scales.size();
  std::vector<double> gap(n);
  for (std::size_t i = 0; i < n; ++i) gap[i] = multi[i] - conv[i];
  const bool a = multi[0] >= 30.0 && conv[0] >= 30.0;
  const bool b = conv[0] - conv[n - 1] >= 10.0;
  bool c = true, d = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (table.scales[i] >= 2.0 && gap[i] < 3.0) c = false;
    if (i > 0 && gap[i] < gap[i - 1]) d = false;
  }
  std::string detail = "s/multi/conv/gap:";
  for (std::size_t i = 0; i < n; ++i) {
    detail += " " + f(table.scales[i]) + "/" + f(multi[i], 4) + "/" + f(conv[i], 4) + "/" + f(gap[i], 3);
  }
  detail += std::string("; (a) ") + (a ? "ok" : "NO") + " (b) " + (b ? "ok" : "NO") + " (c) " + (c ? "ok" : "NO") +
            " (d) " + (d ? "ok" : "NO") + ", " + f(secs, 4) + " s";
  return {a && b && c && d && secs <= 1800.0, detail};
}

Outcome subframe_check() {
  DisplayConfig display;
  display.width = display.height = kSize;
  const auto target = make_scene("colorful", kSize, kSize);
  const std::vector<IntensityImage> targets{target};
  KernelCache cache;
  std::vector<double> loss;
  for (std::size_t T = 1; T <= 3; ++T) {
    OptimizerConfig cfg;
    cfg.steps = kSteps;
    cfg.subframes = T;
    cfg.seed = 1;
    const auto r = optimize_multicolor(targets, display, cfg, cache);
    loss.push_back(r.final_losses().image);
    budget_cases.push_back({"colorful T=" + std::to_string(T), r.lasers, channel_peaks(targets), 1.0});
  }
  return {loss[2] <= loss[1] && loss[1] <= loss[0],
          "L_image T=1 " + f(loss[0], 4) + ", T=2 " + f(loss[1], 4) + ", T=3 " + f(loss[2], 4)};
}

Outcome budget_check() {
  if (budget_cases.empty()) return {false, "needs the runs of checks 3 and 5"};
  bool pass = true;
  double worst = 0.0;
  std::string worst_label, failing;
  for (const auto& c : budget_cases) {
    for (std::size_t p = 0; p < 3; ++p) {
      const double want = c.scale * c.peaks[p];
      const double rel = std::abs(c.lasers.power(p) - want) / want;
      if (rel > worst) {
        worst = rel;
        worst_label = c.label + " primary " + "RGB"[p];
      }
      if (rel > 0.05) {
        pass = false;
        failing += " " + c.label + "/" + "RGB"[p] + "=" + f(rel, 2);
      }
    }
  }
  return {pass, std::to_string(budget_cases.size()) + " fixed-s runs, worst |sum l^2 - s max I| / (s max I) = " +
                    f(worst) + " (" + worst_label + ")" + (failing.empty() ? "" : "; over 0.05:" + failing)};
}

Outcome dynamic_check() {
  KernelCache cache;
  auto dyn = [&](const std::string& scene, std::size_t n) {
    DisplayConfig display;
    display.width = display.height = n;
    OptimizerConfig cfg;
    cfg.steps = kSteps;
    cfg.seed = 1;
    cfg.scale_mode = ScaleMode::dynamic;
    cfg.s_init = 1.0;
    cfg.s_max = 3.0;
    return optimize_multicolor({make_scene(scene, n, n)}, display, cfg, cache);
  };
  const auto black = dyn("black", 64);
  const auto bright = dyn("bright_complex", 128);
  const auto sparse = dyn("dark_sparse", 128);
  const double eps = OptimizerConfig{}.weights.epsilon_image;
  const bool a = black.scale == 3.0;
  const bool b = bright.scale >= 1.0 && bright.scale < 3.0 && bright.final_losses().image <= 1.5 * eps;
  const bool c = sparse.scale >= bright.scale;
  return {a && b && c, "black s=" + f(black.scale, 17) + "; bright_complex s=" + f(bright.scale, 4) + " L_image " +
                           f(bright.final_losses().image, 3) + " (limit " + f(1.5 * eps) + "); dark_sparse s=" +
                           f(sparse.scale, 4)};
}

Outcome ablation_check() {
  DisplayConfig display;
  display.width = display.height = kSize;
  OptimizerConfig cfg;
  cfg.steps = kSteps;
  cfg.seed = 1;
  cfg.scale = 1.8;
  KernelCache cache;
  const auto rows = run_ablation({make_scene("colorful", kSize, kSize)}, display, cfg, cache);
  std::map<std::string, double> psnr;
  for (const auto& r : rows) psnr[r.variant] = r.psnr_db;
  const double full = psnr.at("-");
  const double no_pc = psnr.at("Phase Constrain"), no_tv = psnr.at("TV Loss");
  const bool pass = full - no_pc >= 3.0 && full - no_tv >= 1.0;
  return {pass, "PSNR full " + f(full, 4) + ", no phase constraint " + f(no_pc, 4) + " (need <= " + f(full - 3.0, 4) +
                    "), no TV " + f(no_tv, 4) + " (need <= " + f(full - 1.0, 4) + "), no laser loss " +
                    f(psnr.at("Laser Loss"), 4)};
}

Outcome calibration_check() {
  const auto model = fit(synth_response("saturating", 64));
  bool monotone = true;
  double prev = -1e300;
  for (int i = 0; i < 100; ++i) {
    const double d = map_power(model, i / 99.0);
    if (d < prev) monotone = false;
    prev = d;
  }
  return {model.training_mse <= 1e-4 && monotone,
          "training MSE " + f(model.training_mse) + ", map_power " + (monotone ? "non-decreasing" : "NOT monotone") +
              " over 100 points"};
}

Outcome reproducibility_check() {
  const auto dir = scratch() / "repro";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto cfg = (dir / "run.yaml").string();
  write_text(cfg,
             "display: {width: 64, height: 64}\nscene:\n  planes: [\"scene:colorful\"]\n  distances_m: [0.001]\n"
             "  scale: 1.2\noptimizer: {steps: 150, T: 3, seed: 9}\n");
  for (const char* run : {"a", "b"}) {
    std::ostringstream out, err;
    if (cli::run({"holo", "optimize", "-c", cfg, "-o", (dir / run).string(), "-q"}, out, err) != 0) {
      return {false, "optimize failed: " + err.str()};
    }
  }
  bool same = true;
  for (const char* file : {"history.csv", "lasers.csv"}) {
    same = same && read_text((dir / "a" / file).string()) == read_text((dir / "b" / file).string());
  }
  return {same, std::string("history.csv and lasers.csv ") + (same ? "byte-identical" : "DIFFER") + " across two runs"};
}

Outcome encoding_check() {
  std::vector<std::string> bad;
  auto expect = [&](bool ok, const std::string& what) {
    if (!ok) bad.push_back(what);
  };
  RealGrid mean(4, 4, 0.5), offset(4, 4, 0.2);
  const auto phi = interlace(mean, offset);
  expect(phi(1, 2) == 0.5 + 0.2, "interlace (1,2)");
  expect(phi(2, 2) == 0.5 - 0.2, "interlace (2,2)");
  const auto flat = interlace(mean, RealGrid(4, 4, 0.0));
  for (double v : flat.values()) expect(v == 0.5, "zero offset");
  for (std::size_t y = 0; y < 4; ++y)
    for (std::size_t x = 0; x + 1 < 4; ++x) expect(phi(x, y) + phi(x + 1, y) == 1.0, "pair sum");
  constexpr double pi = std::numbers::pi;
  expect(wrap_phase(1.5 * pi) == -0.5 * pi, "wrap 3pi/2");
  expect(wrap_phase(-pi) == -pi, "wrap -pi");
  expect(wrap_phase(0.0) == 0.0, "wrap 0");
  expect(quantize_phase(-pi, 8) == 0, "quantize -pi");
  expect(quantize_phase(std::nextafter(pi, 0.0), 8) == 255, "quantize pi-");
  expect(quantize_phase(0.0, 8) == 128, "quantize 0");
  std::string detail = "interlace/parity, wrap and quantize examples: ";
  if (bad.empty()) return {true, detail + "all exact"};
  for (const auto& b : bad) detail += b + "; ";
  return {false, detail};
}

}  // namespace

int main(int argc, char** argv) {
  struct Check {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  // 4 reuses the runs of 3 and 5, so it is evaluated after them
  const std::vector<Check> checks{
      {1, "gradient correctness", gradient_check},   {2, "propagation physics", propagation_check},
      {3, "brightness headroom trend", headroom_check}, {5, "subframe monotonicity", subframe_check},
      {4, "laser budget", budget_check},             {6, "dynamic scaling", dynamic_check},
      {7, "ablation ordering", ablation_check},       {8, "calibration", calibration_check},
      {9, "reproducibility", reproducibility_check},  {10, "encoding exactness", encoding_check},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  if (std::find(selected.begin(), selected.end(), 4) != selected.end()) {
    for (int dep : {3, 5})
      if (std::find(selected.begin(), selected.end(), dep) == selected.end()) selected.push_back(dep);
  }

  std::map<int, std::string> lines;
  int failures = 0;
  for (const auto& c : checks) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (!o.pass) ++failures;
    lines[c.id] = std::string(o.pass ? "PASS" : "FAIL") + "  " + std::to_string(c.id) + ". " + c.name + ": " + o.detail;
    std::cerr << "[" << f(seconds_since(t0), 4) << " s] " << lines[c.id] << std::endl;
  }
  std::cout << "\nacceptance summary\n";
  for (const auto& [id, line] : lines) std::cout << line << '\n';
  std::cout << (lines.size() - failures) << "/" << lines.size() << " passed\n";
  return failures == 0 ? 0 : 1;
}
