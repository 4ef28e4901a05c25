#include "holo/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

#include "holo/calibration.hpp"
#include "holo/config.hpp"
#include "holo/metrics.hpp"
#include "holo/optimizer.hpp"
#include "holo/png_io.hpp"
#include "holo/scene_io.hpp"

namespace holo::cli {

namespace fs = std::filesystem;

namespace {

struct Common {
  std::string config;
  std::vector<std::string> overrides;
  bool phase_scale_inverse = false;
  std::string out_dir;
  bool quiet = false;
};

void add_common(CLI::App* cmd, Common& c, bool needs_out = true) {
  cmd->add_option("-c,--config", c.config, "YAML run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--set", c.overrides, "override a config key, e.g. --set optimizer.steps=200")
      ->allow_extra_args(false);
  cmd->add_flag("--phase-scale-inverse", c.phase_scale_inverse,
                "use lambda_anchor / lambda_p as the per-primary phase scale");
  auto* out = cmd->add_option("-o,--out", c.out_dir, "output directory");
  if (needs_out) out->required();
  cmd->add_flag("-q,--quiet", c.quiet, "no progress output");
}

RunConfig load(const Common& c) {
  auto overrides = c.overrides;
  if (c.phase_scale_inverse) overrides.push_back("display.phase_scale_inverse=true");
  return c.config.empty() ? parse_config("", overrides, "<defaults>") : load_config(c.config, overrides);
}

std::vector<IntensityImage> targets_of(const RunConfig& cfg) {
  if (cfg.scene.planes.empty()) throw Error("scene.planes is empty; give one image per plane");
  return load_target(cfg.scene, cfg.display.shape());
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

using Manifest = std::map<std::string, std::string>;

void write_manifest(const fs::path& dir, const std::string& command, const RunConfig& cfg,
                    Manifest extra) {
  extra["format_version"] = std::to_string(kArtifactFormat);
  extra["tool"] = "holo";
  extra["tool_version"] = kToolVersion;
  extra["command"] = command;
  extra["config_hash"] = hex64(fnv1a(cfg.canonical));
  extra["seed"] = std::to_string(cfg.optimizer.seed);
  std::string text;
  for (const auto& [k, v] : extra) text += k + "=" + v + "\n";
  write_text((dir / "manifest.txt").string(), text);
  write_text((dir / "config.yaml").string(), cfg.canonical + "\n");
}

Manifest read_manifest(const fs::path& dir) {
  const auto path = dir / "manifest.txt";
  if (!fs::exists(path)) throw Error("no manifest.txt in " + dir.string());
  Manifest m;
  std::istringstream is(read_text(path.string()));
  std::string line;
  while (std::getline(is, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) m[line.substr(0, eq)] = line.substr(eq + 1);
  }
  if (m["tool"] != "holo" || m["format_version"] != std::to_string(kArtifactFormat)) {
    throw Error(path.string() + " is not a holo artifact manifest (format " + std::to_string(kArtifactFormat) + ")");
  }
  return m;
}

ProgressFn progress_printer(const Common& c, std::ostream& err, const std::string& label, int steps) {
  if (c.quiet) return {};
  return [&err, label, steps](const HistoryRow& row) {
    if (row.step % 100 == 0 || row.step == steps) {
      err << label << " step " << row.step << "/" << steps << "  L_image " << row.image << "  s " << row.scale
          << '\n';
    }
    return true;
  };
}

std::string metric_csv(const std::vector<MetricReport>& per_plane) {
  std::ostringstream os;
  os << "plane,psnr_db,psnr_db_r,psnr_db_g,psnr_db_b,ssim,michelson,histogram_distance\n";
  for (std::size_t q = 0; q < per_plane.size(); ++q) {
    const auto& r = per_plane[q];
    os << q << ',' << fmt(r.psnr_db) << ',' << fmt(r.channel_psnr_db[0]) << ',' << fmt(r.channel_psnr_db[1])
       << ',' << fmt(r.channel_psnr_db[2]) << ',' << fmt(r.ssim) << ',' << fmt(r.michelson) << ','
       << fmt(r.histogram_distance) << '\n';
  }
  return os.str();
}

void write_artifacts(const fs::path& dir, const std::string& command, const RunConfig& cfg,
                     const OptimizationResult& result, const std::vector<IntensityImage>& targets) {
  fs::create_directories(dir);
  for (std::size_t t = 0; t < result.slm_phases.size(); ++t) {
    save_phase(result.slm_phases[t], cfg.output.phase_bits,
               (dir / ("phase_t" + std::to_string(t + 1) + ".png")).string());
  }
  write_text((dir / "lasers.csv").string(), lasers_csv(result.lasers));
  write_text((dir / "history.csv").string(), history_csv(result.history));
  save_reconstruction(result.reconstructions, result.scale, (dir / "reconstruction").string(),
                      cfg.output.gamma_encode, &targets);
  const auto report = evaluate_result(targets, result);
  write_text((dir / "report.csv").string(), report_csv(report, result));
  write_text((dir / "histogram_target.csv").string(), histogram_csv(report.target_histogram));
  write_text((dir / "histogram_reconstruction.csv").string(), histogram_csv(report.reconstruction_histogram));
  write_manifest(dir, command, cfg,
                 {{"scheme", result.conventional ? "conventional" : "multicolor"},
                  {"subframes", std::to_string(result.slm_phases.size())},
                  {"planes", std::to_string(result.reconstructions.size())},
                  {"phase_bits", std::to_string(cfg.output.phase_bits)},
                  {"scale", fmt(result.scale)}});
}

int cmd_optimize(const Common& c, bool conventional, std::ostream& out, std::ostream& err) {
  const auto cfg = load(c);
  const auto targets = targets_of(cfg);
  KernelCache cache;
  const auto progress = progress_printer(c, err, conventional ? "conventional" : "multicolor", cfg.optimizer.steps);
  const auto result = conventional ? optimize_conventional(targets, cfg.display, cfg.optimizer, cache, progress)
                                   : optimize_multicolor(targets, cfg.display, cfg.optimizer, cache, progress);
  write_artifacts(c.out_dir, conventional ? "optimize-conventional" : "optimize", cfg, result, targets);
  const auto& last = result.final_losses();
  out << "wrote " << c.out_dir << "  L_image " << last.image << "  s " << result.scale << "  ("
      << result.seconds << " s)\n";
  return 0;
}

struct Simulated {
  Manifest manifest;
  RunConfig cfg;
  std::vector<IntensityImage> images;
  double scale = 1.0;
};

// Re-simulates an artifact directory from its quantized phases and laser schedule.
Simulated simulate_artifacts(const Common& c, const fs::path& dir) {
  Simulated sim;
  sim.manifest = read_manifest(dir);
  Common local = c;
  if (local.config.empty()) local.config = (dir / "config.yaml").string();
  sim.cfg = load(local);
  const auto& m = sim.manifest;
  const std::size_t T = std::stoul(m.at("subframes"));
  const int bits = std::stoi(m.at("phase_bits"));
  sim.scale = std::stod(m.at("scale"));

  const auto lasers_path = dir / "lasers.csv";
  if (!fs::exists(lasers_path)) throw Error("missing laser schedule " + lasers_path.string());
  const auto lasers = parse_lasers_csv(read_text(lasers_path.string()));
  if (lasers.subframes() != T) throw Error("artifact/config mismatch: lasers.csv has " +
                                           std::to_string(lasers.subframes()) + " subframes, manifest " +
                                           std::to_string(T));
  std::vector<RealGrid> phases;
  for (std::size_t t = 0; t < T; ++t) {
    const auto path = dir / ("phase_t" + std::to_string(t + 1) + ".png");
    if (!fs::exists(path)) throw Error("missing phase map " + path.string());
    phases.push_back(load_phase(path.string(), bits));
    if (phases.back().shape() != sim.cfg.display.shape()) {
      throw Error("artifact/config mismatch: " + path.filename().string() + " is " +
                  std::to_string(phases.back().width()) + "x" + std::to_string(phases.back().height()) +
                  ", display is " + std::to_string(sim.cfg.display.width) + "x" +
                  std::to_string(sim.cfg.display.height));
    }
  }

  KernelCache cache;
  if (m.at("scheme") == "conventional") {
    if (T != 3) throw Error("artifact/config mismatch: conventional artifacts have 3 subframes");
    for (std::size_t q = 0; q < sim.cfg.display.plane_distances.size(); ++q) {
      auto img = reconstruct_conventional(phases, sim.cfg.display, q, cache);
      for (std::size_t p = 0; p < 3; ++p) {
        const double power = lasers(p, p) * lasers(p, p);
        for (auto& v : img.channels[p].values()) v *= power;
      }
      sim.images.push_back(std::move(img));
    }
  } else {
    sim.images = reconstruct_multiplane(phases, lasers, sim.cfg.display, cache);
  }
  return sim;
}

double eight_bit_psnr(const IntensityImage& a, double scale, bool gamma, const PngImage& b) {
  if (b.width != a.width() || b.height != a.height() || b.channels != 3) return 0.0;
  double se = 0.0;
  for (std::size_t y = 0; y < a.height(); ++y) {
    for (std::size_t x = 0; x < a.width(); ++x) {
      for (int p = 0; p < 3; ++p) {
        const double d = (tone_map(a.channels[p](x, y), scale, gamma) - b.at(x, y, p)) / 255.0;
        se += d * d;
      }
    }
  }
  const double mse = se / static_cast<double>(3 * a.width() * a.height());
  return mse == 0.0 ? kPsnrCap : std::min(kPsnrCap, -10.0 * std::log10(mse));
}

int cmd_simulate(const Common& c, const std::string& artifacts, std::ostream& out) {
  const fs::path dir(artifacts);
  const auto sim = simulate_artifacts(c, dir);
  const fs::path out_dir(c.out_dir);
  fs::create_directories(out_dir);
  save_reconstruction(sim.images, sim.scale, (out_dir / "simulated").string(), sim.cfg.output.gamma_encode);
  std::ostringstream report;
  report << "plane,psnr_vs_saved_db\n";
  for (std::size_t q = 0; q < sim.images.size(); ++q) {
    const auto saved = dir / ("reconstruction_plane" + std::to_string(q) + ".png");
    double psnr = 0.0;
    if (fs::exists(saved)) psnr = eight_bit_psnr(sim.images[q], sim.scale, sim.cfg.output.gamma_encode, read_png(saved.string()));
    report << q << ',' << fmt(psnr) << '\n';
    out << "plane " << q << ": PSNR vs saved reconstruction " << psnr << " dB\n";
  }
  write_text((out_dir / "simulate.csv").string(), report.str());
  return 0;
}

int cmd_evaluate(const Common& c, const std::string& artifacts, std::ostream& out) {
  const auto sim = simulate_artifacts(c, artifacts);
  const auto targets = targets_of(sim.cfg);
  if (targets.size() != sim.images.size()) throw Error("artifact/config mismatch: plane count differs");
  std::vector<MetricReport> reports;
  for (std::size_t q = 0; q < targets.size(); ++q) reports.push_back(evaluate(targets[q], sim.images[q], sim.scale));
  const fs::path out_dir(c.out_dir);
  fs::create_directories(out_dir);
  write_text((out_dir / "evaluation.csv").string(), metric_csv(reports));
  for (std::size_t q = 0; q < reports.size(); ++q) {
    const auto tag = "_plane" + std::to_string(q) + ".csv";
    write_text((out_dir / ("histogram_target" + tag)).string(), histogram_csv(reports[q].target_histogram));
    write_text((out_dir / ("histogram_reconstruction" + tag)).string(), histogram_csv(reports[q].reconstruction_histogram));
    out << "plane " << q << ": PSNR " << reports[q].psnr_db << " dB  SSIM " << reports[q].ssim << '\n';
  }
  return 0;
}

int cmd_compare(const Common& c, std::vector<double> scales, std::ostream& out, std::ostream& err) {
  auto cfg = load(c);
  if (scales.empty()) scales = cfg.compare_scales;
  for (double s : scales) {
    if (!(s > 0.0)) throw Error("compare scales must be positive");
  }
  const auto targets = targets_of(cfg);
  const fs::path dir(c.out_dir);
  fs::create_directories(dir);
  KernelCache cache;
  CompareTable table;
  table.scales = scales;
  // LPIPS needs a pretrained network; the histogram distance stands in as the third column.
  table.metrics = {"multicolor_psnr_db", "multicolor_ssim", "multicolor_histdist_lpips_substitute",
                   "conventional_psnr_db", "conventional_ssim", "conventional_histdist_lpips_substitute"};
  table.values.assign(table.metrics.size(), {});
  for (double s : scales) {
    auto oc = cfg.optimizer;
    oc.scale_mode = ScaleMode::fixed;
    oc.scale = s;
    const auto tag = " s=" + fmt(s);
    const auto multi = optimize_multicolor(targets, cfg.display, oc, cache, progress_printer(c, err, "multicolor" + tag, oc.steps));
    const auto conv = optimize_conventional(targets, cfg.display, oc, cache, progress_printer(c, err, "conventional" + tag, oc.steps));
    write_text((dir / ("lasers_multicolor_s" + fmt(s) + ".csv")).string(), lasers_csv(multi.lasers));
    const auto rm = evaluate_result(targets, multi), rc = evaluate_result(targets, conv);
    const double row[] = {rm.psnr_db, rm.ssim, rm.histogram_distance, rc.psnr_db, rc.ssim, rc.histogram_distance};
    for (std::size_t k = 0; k < 6; ++k) table.values[k].push_back(row[k]);
    out << "s=" << s << ": multicolor " << rm.psnr_db << " dB, conventional " << rc.psnr_db << " dB\n";
  }
  write_text((dir / "compare.csv").string(), compare_csv(table));
  write_manifest(dir, "compare", cfg, {});
  return 0;
}

int cmd_ablate(const Common& c, std::ostream& out) {
  const auto cfg = load(c);
  const auto targets = targets_of(cfg);
  KernelCache cache;
  const auto rows = run_ablation(targets, cfg.display, cfg.optimizer, cache);
  const fs::path dir(c.out_dir);
  fs::create_directories(dir);
  write_text((dir / "ablation.csv").string(), ablation_csv(rows));
  write_manifest(dir, "ablate", cfg, {});
  for (const auto& r : rows) out << r.variant << ": PSNR " << r.psnr_db << " dB  SSIM " << r.ssim << '\n';
  return 0;
}

struct CalibrateArgs {
  std::string response;
  std::string synthetic;
  std::size_t samples = 64;
  std::string model_out;
  int epochs = FitOptions{}.epochs;
  std::uint64_t seed = 1;
  std::string apply;
  std::vector<std::string> models;
  std::string drivers_out;
};

int cmd_calibrate(const CalibrateArgs& a, std::ostream& out) {
  if (!a.apply.empty()) {
    // lasers.csv + one model per primary -> driver settings for each subframe
    std::array<CalibrationModel, 3> models;
    std::array<bool, 3> have{false, false, false};
    for (const auto& spec : a.models) {
      const auto eq = spec.find('=');
      const std::string name = eq == std::string::npos ? "" : spec.substr(0, eq);
      const std::size_t p = name == "R" ? 0 : name == "G" ? 1 : name == "B" ? 2 : 3;
      if (p == 3) throw Error("--model expects R=<file>, G=<file> or B=<file>, got '" + spec + "'");
      models[p] = deserialize(read_text(spec.substr(eq + 1)));
      have[p] = true;
    }
    if (!have[0] || !have[1] || !have[2]) throw Error("--apply needs a --model for each of R, G and B");
    if (a.drivers_out.empty()) throw Error("--apply needs --drivers-out");
    const auto lasers = parse_lasers_csv(read_text(a.apply));
    std::ostringstream os;
    os << "primary";
    for (std::size_t t = 0; t < lasers.subframes(); ++t) os << ",driver_t" << t + 1;
    os << '\n';
    const char* names[] = {"R", "G", "B"};
    for (std::size_t p = 0; p < 3; ++p) {
      os << names[p];
      for (std::size_t t = 0; t < lasers.subframes(); ++t) {
        os << ',' << fmt(map_power(models[p], lasers(p, t) * lasers(p, t)));
      }
      os << '\n';
    }
    write_text(a.drivers_out, os.str());
    out << "wrote " << a.drivers_out << '\n';
    return 0;
  }
  if (a.response.empty() == a.synthetic.empty()) throw Error("give exactly one of --response or --synthetic");
  if (a.model_out.empty()) throw Error("--model-out is required when fitting");
  const auto samples = a.response.empty() ? synth_response(a.synthetic, a.samples)
                                          : parse_response_csv(read_text(a.response));
  FitOptions opts;
  opts.epochs = a.epochs;
  opts.seed = a.seed;
  const auto model = fit(samples, opts);
  write_text(a.model_out, serialize(model));
  out << "fitted " << samples.size() << " samples, training MSE " << model.training_mse << "; wrote "
      << a.model_out << '\n';
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-color holography optimizer"};
  app.name(args.empty() ? "holo" : args[0]);
  app.set_version_flag("--version", std::string("holo ") + kToolVersion);
  app.require_subcommand(1, 1);

  Common opt, conv, sim, eval, cmp, abl;
  auto* c_opt = app.add_subcommand("optimize", "jointly optimize phases and laser powers");
  add_common(c_opt, opt);
  auto* c_conv = app.add_subcommand("optimize-conventional", "field-sequential baseline, one primary per subframe");
  add_common(c_conv, conv);

  std::string sim_dir, eval_dir;
  auto* c_sim = app.add_subcommand("simulate", "re-simulate reconstructions from exported phases and lasers");
  add_common(c_sim, sim);
  c_sim->add_option("-a,--artifacts", sim_dir, "artifact directory from optimize")->required();
  auto* c_eval = app.add_subcommand("evaluate", "metrics of exported artifacts against the configured targets");
  add_common(c_eval, eval);
  c_eval->add_option("-a,--artifacts", eval_dir, "artifact directory from optimize")->required();

  std::vector<double> scales;
  auto* c_cmp = app.add_subcommand("compare", "both schemes over a list of brightness scales");
  add_common(c_cmp, cmp);
  c_cmp->add_option("--scales", scales, "overrides compare.scales")->delimiter(',');

  auto* c_abl = app.add_subcommand("ablate", "full model and the three single-component removals");
  add_common(c_abl, abl);

  CalibrateArgs cal;
  auto* c_cal = app.add_subcommand("calibrate", "fit a laser response model, or map a schedule to driver settings");
  c_cal->add_option("--response", cal.response, "CSV driver_setting,normalized_intensity")->check(CLI::ExistingFile);
  c_cal->add_option("--synthetic", cal.synthetic, "linear | saturating | thresholded");
  c_cal->add_option("--samples", cal.samples, "synthetic sample count");
  c_cal->add_option("--epochs", cal.epochs, "Adam iterations");
  c_cal->add_option("--seed", cal.seed, "weight initialization seed");
  c_cal->add_option("--model-out", cal.model_out, "where to write the fitted model");
  c_cal->add_option("--apply", cal.apply, "lasers.csv to convert into driver settings")->check(CLI::ExistingFile);
  c_cal->add_option("--model", cal.models, "R=<file>, G=<file>, B=<file>");
  c_cal->add_option("--drivers-out", cal.drivers_out, "output CSV for --apply");

  std::vector<const char*> argv;
  std::vector<std::string> storage = args.empty() ? std::vector<std::string>{"holo"} : args;
  for (const auto& s : storage) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (c_opt->parsed()) return cmd_optimize(opt, false, out, err);
    if (c_conv->parsed()) return cmd_optimize(conv, true, out, err);
    if (c_sim->parsed()) return cmd_simulate(sim, sim_dir, out);
    if (c_eval->parsed()) return cmd_evaluate(eval, eval_dir, out);
    if (c_cmp->parsed()) return cmd_compare(cmp, scales, out, err);
    if (c_abl->parsed()) return cmd_ablate(abl, out);
    if (c_cal->parsed()) return cmd_calibrate(cal, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace holo::cli
