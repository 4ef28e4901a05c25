#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "holo/cli.hpp"
#include "holo/png_io.hpp"
#include "holo/scene_io.hpp"

using namespace holo;
namespace fs = std::filesystem;

namespace {

struct Run {
  int status = 0;
  std::string out, err;
};

Run holo_run(std::vector<std::string> args) {
  args.insert(args.begin(), "holo");
  std::ostringstream out, err;
  const int status = cli::run(args, out, err);
  return {status, out.str(), err.str()};
}

fs::path workdir() {
  const auto dir = fs::temp_directory_path() / "holo_unit_cli";
  fs::remove_all(dir);
  fs::create_directories(dir);
  write_text((dir / "run.yaml").string(),
             "display: {width: 32, height: 32}\n"
             "scene:\n  planes: [\"scene:natural@0.6\"]\n  distances_m: [0.0]\n  scale: 1.0\n"
             "optimizer: {steps: 30, T: 2, seed: 5}\n");
  return dir;
}

}  // namespace

TEST_CASE("optimize writes the artifact directory deterministically") {
  const auto dir = workdir();
  const auto cfg = (dir / "run.yaml").string();
  const auto a = holo_run({"optimize", "-c", cfg, "-o", (dir / "a").string(), "-q"});
  REQUIRE_MESSAGE(a.status == 0, a.err);
  for (const char* f : {"manifest.txt", "phase_t1.png", "phase_t2.png", "lasers.csv", "history.csv", "report.csv",
                        "reconstruction_plane0.png", "reconstruction_strip.png", "histogram_target.csv", "config.yaml"}) {
    CHECK_MESSAGE(fs::exists(dir / "a" / f), f);
  }
  CHECK_FALSE(fs::exists(dir / "a" / "phase_t3.png"));
  const auto b = holo_run({"optimize", "-c", cfg, "-o", (dir / "b").string(), "-q"});
  REQUIRE(b.status == 0);
  for (const char* f : {"history.csv", "lasers.csv", "phase_t1.png", "manifest.txt"}) {
    CHECK(read_text((dir / "a" / f).string()) == read_text((dir / "b" / f).string()));
  }
  CHECK(read_text((dir / "a/manifest.txt").string()).find("tool_version=") != std::string::npos);
}

TEST_CASE("simulate reproduces the saved reconstruction") {
  const auto dir = workdir();
  const auto cfg = (dir / "run.yaml").string();
  REQUIRE(holo_run({"optimize", "-c", cfg, "-o", (dir / "a").string(), "-q"}).status == 0);
  const auto sim = holo_run({"simulate", "-a", (dir / "a").string(), "-o", (dir / "s").string()});
  REQUIRE_MESSAGE(sim.status == 0, sim.err);
  const auto csv = read_text((dir / "s/simulate.csv").string());
  const double psnr = std::stod(csv.substr(csv.find("\n0,") + 3));
  CHECK(psnr >= 40.0);

  // zero schedule -> black output
  write_text((dir / "a/lasers.csv").string(), "primary,l_t1,l_t2\nR,0,0\nG,0,0\nB,0,0\n");
  REQUIRE(holo_run({"simulate", "-a", (dir / "a").string(), "-o", (dir / "z").string()}).status == 0);
  const auto black = read_png((dir / "z/simulated_plane0.png").string());
  for (auto v : black.samples) CHECK(v == 0);

  fs::remove(dir / "a/lasers.csv");
  const auto missing = holo_run({"simulate", "-a", (dir / "a").string(), "-o", (dir / "m").string()});
  CHECK(missing.status != 0);
  CHECK(missing.err.find("lasers.csv") != std::string::npos);
}

TEST_CASE("artifact and config mismatch is reported") {
  const auto dir = workdir();
  const auto cfg = (dir / "run.yaml").string();
  REQUIRE(holo_run({"optimize", "-c", cfg, "-o", (dir / "a").string(), "-q"}).status == 0);
  const auto r = holo_run({"evaluate", "-a", (dir / "a").string(), "-c", cfg, "--set", "display.width=64",
                           "-o", (dir / "e").string()});
  CHECK(r.status != 0);
  CHECK(r.err.find("mismatch") != std::string::npos);
  const auto ok = holo_run({"evaluate", "-a", (dir / "a").string(), "-o", (dir / "e").string()});
  CHECK_MESSAGE(ok.status == 0, ok.err);
  CHECK(fs::exists(dir / "e/evaluation.csv"));
}

TEST_CASE("dynamic mode reports the chosen scale") {
  const auto dir = workdir();
  const auto r = holo_run({"optimize", "-c", (dir / "run.yaml").string(), "-o", (dir / "d").string(), "-q",
                           "--set", "scene.scale=null", "--set", "scene.dynamic={s_max: 2.0}"});
  REQUIRE_MESSAGE(r.status == 0, r.err);
  CHECK(read_text((dir / "d/report.csv").string()).find("final_scale,") != std::string::npos);
}

TEST_CASE("compare with a single scale gives one column") {
  const auto dir = workdir();
  const auto r = holo_run({"compare", "-c", (dir / "run.yaml").string(), "-o", (dir / "c").string(), "-q",
                           "--scales", "1.5", "--set", "optimizer.steps=5"});
  REQUIRE_MESSAGE(r.status == 0, r.err);
  const auto table = parse_compare_csv(read_text((dir / "c/compare.csv").string()));
  CHECK(table.scales == std::vector<double>{1.5});
  CHECK(table.metrics.size() == 6);
  CHECK(compare_csv(table) == read_text((dir / "c/compare.csv").string()));
}

TEST_CASE("ablate writes four rows") {
  const auto dir = workdir();
  const auto r = holo_run({"ablate", "-c", (dir / "run.yaml").string(), "-o", (dir / "ab").string(), "-q",
                           "--set", "optimizer.steps=5"});
  REQUIRE_MESSAGE(r.status == 0, r.err);
  const auto csv = read_text((dir / "ab/ablation.csv").string());
  CHECK(csv.rfind("component,PSNR,SSIM\nPhase Constrain,", 0) == 0);
  CHECK(csv.find("\n-,") != std::string::npos);
}

TEST_CASE("calibrate fits and applies models") {
  const auto dir = workdir();
  for (const char* p : {"R", "G", "B"}) {
    const auto r = holo_run({"calibrate", "--synthetic", "linear", "--samples", "16", "--epochs", "300",
                             "--model-out", (dir / (std::string("m") + p + ".txt")).string()});
    REQUIRE_MESSAGE(r.status == 0, r.err);
  }
  write_text((dir / "lasers.csv").string(), "primary,l_t1\nR,1\nG,0\nB,0.5\n");
  const auto r = holo_run({"calibrate", "--apply", (dir / "lasers.csv").string(), "--model",
                           "R=" + (dir / "mR.txt").string(), "--model", "G=" + (dir / "mG.txt").string(),
                           "--model", "B=" + (dir / "mB.txt").string(), "--drivers-out",
                           (dir / "drivers.csv").string()});
  REQUIRE_MESSAGE(r.status == 0, r.err);
  CHECK(read_text((dir / "drivers.csv").string()).rfind("primary,driver_t1\nR,", 0) == 0);
  CHECK(holo_run({"calibrate", "--synthetic", "linear", "--samples", "0", "--model-out", "x"}).status != 0);
}

TEST_CASE("errors give a nonzero status") {
  const auto dir = workdir();
  const auto cfg = (dir / "run.yaml").string();
  auto r = holo_run({"optimize", "-c", cfg, "-o", (dir / "x").string(), "--set", "optimizer.stepz=3"});
  CHECK(r.status != 0);
  CHECK(r.err.find("optimizer.stepz: unknown key") != std::string::npos);
  CHECK(holo_run({}).status != 0);
  CHECK(holo_run({"optimize", "-o", (dir / "x").string()}).status != 0);  // no scene planes
  CHECK(holo_run({"optimize", "-c", (dir / "nope.yaml").string(), "-o", "x"}).status != 0);
  CHECK(holo_run({"--version"}).status == 0);
}
