#include "holo/gradient.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "holo/simd.hpp"

namespace holo {

void Problem::prepare(KernelCache& cache) {
  display.validate();
  weights.validate();
  if (targets.empty()) throw Error("problem needs at least one target plane");
  if (targets.size() != display.plane_distances.size()) {
    throw Error("target plane count does not match the configured plane distances");
  }
  for (const auto& t : targets) {
    t.validate();
    require_same_shape(display.shape(), t.shape(), "target vs display");
  }
  if (pyramid_levels < 0) throw Error("pyramid levels must be >= 0");
  kernels.clear();
  for (double d : display.plane_distances) {
    std::array<std::shared_ptr<const PropagationKernel>, 3> row;
    for (std::size_t p = 0; p < kPrimaries; ++p) {
      row[p] = cache.get(display.wavelengths[p], d, display.shape(), display.pitch,
                         display.aperture);
    }
    kernels.push_back(std::move(row));
  }
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double logit(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error("logit argument must lie in (0, 1)");
  return std::log(p / (1.0 - p));
}

LaserSchedule Variables::lasers() const {
  LaserSchedule s(subframes());
  for (std::size_t i = 0; i < laser_raw.size(); ++i) s.values()[i] = sigmoid(laser_raw[i]);
  return s;
}

std::vector<RealGrid> Variables::slm_phases() const {
  std::vector<RealGrid> out;
  out.reserve(subframes());
  for (std::size_t t = 0; t < subframes(); ++t) {
    out.push_back(phases.constrained() ? interlace(phases.mean[t], phases.offset[t])
                                       : phases.mean[t]);
  }
  return out;
}

std::vector<double> GradientSet::flatten() const {
  std::vector<double> out;
  for (const auto& g : d_mean) out.insert(out.end(), g.values().begin(), g.values().end());
  for (const auto& g : d_offset) out.insert(out.end(), g.values().begin(), g.values().end());
  out.insert(out.end(), d_laser_raw.begin(), d_laser_raw.end());
  out.push_back(d_scale);
  return out;
}

bool GradientSet::finite() const {
  const auto flat = flatten();
  return std::all_of(flat.begin(), flat.end(), [](double v) { return std::isfinite(v); });
}

std::vector<double> flatten(const Variables& vars) {
  std::vector<double> out;
  for (const auto& g : vars.phases.mean) out.insert(out.end(), g.values().begin(), g.values().end());
  for (const auto& g : vars.phases.offset) {
    out.insert(out.end(), g.values().begin(), g.values().end());
  }
  out.insert(out.end(), vars.laser_raw.begin(), vars.laser_raw.end());
  out.push_back(vars.scale);
  return out;
}

void unflatten(std::span<const double> flat, Variables& vars) {
  std::size_t i = 0;
  auto take = [&](std::span<double> dst) {
    if (i + dst.size() > flat.size()) throw Error("flat variable vector too short");
    std::copy_n(flat.begin() + i, dst.size(), dst.begin());
    i += dst.size();
  };
  for (auto& g : vars.phases.mean) take(g.values());
  for (auto& g : vars.phases.offset) take(g.values());
  take(vars.laser_raw);
  if (i + 1 != flat.size()) throw Error("flat variable vector has the wrong length");
  vars.scale = flat[i];
}

namespace {

void check_variables(const Problem& problem, const Variables& vars) {
  vars.phases.validate();
  require_same_shape(problem.shape(), vars.phases.mean[0].shape(), "variables vs display");
  if (vars.laser_raw.size() != kPrimaries * vars.subframes()) {
    throw Error("laser parameter count must be 3 x subframes");
  }
  if (problem.lasers_fixed && problem.fixed_lasers.subframes() != vars.subframes()) {
    throw Error("fixed laser schedule does not match the subframe count");
  }
  if (problem.kernels.size() != problem.planes()) throw Error("problem kernels not prepared");
  if (!std::isfinite(vars.scale)) throw Error("scale must be finite");
}

std::size_t field_index(std::size_t plane, std::size_t primary, std::size_t subframe,
                        std::size_t subframes) {
  return (plane * kPrimaries + primary) * subframes + subframe;
}

}  // namespace

ForwardRecord forward(const Problem& problem, const Variables& vars, bool scale_bonus) {
  check_variables(problem, vars);
  const std::size_t T = vars.subframes();
  const std::size_t n = problem.shape().size();
  const Shape shape = problem.shape();

  ForwardRecord rec;
  rec.scale_bonus = scale_bonus;
  rec.slm_phases = vars.slm_phases();
  rec.lasers = problem.lasers_fixed ? problem.fixed_lasers : vars.lasers();

  rec.phasors.resize(kPrimaries * T);
  for (std::size_t p = 0; p < kPrimaries; ++p) {
    if (!problem.active_primaries[p]) continue;
    for (std::size_t t = 0; t < T; ++t) {
      auto& w = rec.phasors[p * T + t];
      w.resize(n);
      slm_field(rec.slm_phases[t], problem.phase_scales[p], 1.0, w);
    }
  }

  rec.fields.resize(problem.planes() * kPrimaries * T);
  rec.reconstructions.assign(problem.planes(), IntensityImage(shape.width, shape.height));
  std::vector<Complex> slm(n);
  for (std::size_t q = 0; q < problem.planes(); ++q) {
    for (std::size_t p = 0; p < kPrimaries; ++p) {
      if (!problem.active_primaries[p]) continue;
      for (std::size_t t = 0; t < T; ++t) {
        const double l = rec.lasers(p, t);
        const auto& w = rec.phasors[p * T + t];
        for (std::size_t i = 0; i < n; ++i) slm[i] = l * w[i];
        auto& u = rec.fields[field_index(q, p, t, T)];
        u.resize(n);
        propagate_into(slm, *problem.kernels[q][p], u);
        simd::accumulate_intensity(u, 1.0, rec.reconstructions[q].channels[p].values());
      }
    }
  }

  LossComponents& c = rec.components;
  std::vector<double> scratch(n);
  const auto peaks = channel_peaks(problem.targets);
  for (std::size_t q = 0; q < problem.planes(); ++q) {
    for (std::size_t p = 0; p < kPrimaries; ++p) {
      if (!problem.active_primaries[p]) continue;
      c.image += simd::residual(rec.reconstructions[q].channels[p].values(),
                                problem.targets[q].channels[p].values(), vars.scale, 0.0,
                                scratch) /
                 static_cast<double>(n);
      if (problem.pyramid_levels > 0) {
        c.variation +=
            pyramid_variation(rec.reconstructions[q].channels[p], problem.pyramid_levels);
      }
    }
  }
  if (!problem.lasers_fixed) {
    for (std::size_t p = 0; p < kPrimaries; ++p) {
      if (!problem.active_primaries[p]) continue;
      if (problem.use_laser_loss) {
        const double gap = rec.lasers.power(p) - peaks[p] * vars.scale;
        c.laser += gap * gap;
      }
      if (problem.use_laser_floor) {
        for (std::size_t t = 0; t < T; ++t) {
          const double d = std::max(0.0, problem.laser_floor - rec.lasers(p, t));
          c.laser += d * d;
        }
      }
    }
  }
  if (problem.phase_variation && vars.phases.constrained()) {
    c.variation += problem.phase_variation_weight * variation_loss(vars.phases);
  }

  const auto& w = problem.weights;
  rec.total = w.image * c.image + w.laser * c.laser + w.variation * c.variation;
  if (scale_bonus) rec.total -= w.scale * vars.scale;
  return rec;
}

GradientSet backward(const Problem& problem, const Variables& vars, const ForwardRecord& rec) {
  check_variables(problem, vars);
  const std::size_t T = vars.subframes();
  const Shape shape = problem.shape();
  const std::size_t n = shape.size();
  if (rec.fields.size() != problem.planes() * kPrimaries * T ||
      rec.reconstructions.size() != problem.planes() || rec.slm_phases.size() != T) {
    throw Error("forward record does not match the variables");
  }
  const auto& w = problem.weights;

  GradientSet g;
  g.d_mean.assign(T, RealGrid(shape.width, shape.height));
  if (vars.phases.constrained()) g.d_offset.assign(T, RealGrid(shape.width, shape.height));
  g.d_laser_raw.assign(kPrimaries * T, 0.0);

  std::vector<RealGrid> d_phase(T, RealGrid(shape.width, shape.height));
  std::vector<double> d_laser(kPrimaries * T, 0.0);
  RealGrid d_intensity(shape.width, shape.height);
  std::vector<Complex> grad_field(n), grad_slm(n);
  const double image_coeff = 2.0 * w.image / static_cast<double>(n);

  for (std::size_t q = 0; q < problem.planes(); ++q) {
    for (std::size_t p = 0; p < kPrimaries; ++p) {
      if (!problem.active_primaries[p]) continue;
      const auto& recon = rec.reconstructions[q].channels[p];
      const auto& target = problem.targets[q].channels[p];
      simd::residual(recon.values(), target.values(), vars.scale, image_coeff,
                     d_intensity.values());
      g.d_scale -= simd::dot(d_intensity.values(), target.values());
      if (problem.pyramid_levels > 0) {
        pyramid_variation_gradient(recon, problem.pyramid_levels, w.variation, d_intensity);
      }
      const double kappa = problem.phase_scales[p];
      for (std::size_t t = 0; t < T; ++t) {
        const auto& u = rec.fields[field_index(q, p, t, T)];
        simd::modulate(u, d_intensity.values(), 2.0, grad_field);
        propagate_into(grad_field, *problem.kernels[q][p], grad_slm, true);
        d_laser[p * T + t] += simd::phase_adjoint(rec.phasors[p * T + t], grad_slm,
                                                  kappa * rec.lasers(p, t), d_phase[t].values());
      }
    }
  }

  if (!problem.lasers_fixed) {
    const auto peaks = channel_peaks(problem.targets);
    for (std::size_t p = 0; p < kPrimaries; ++p) {
      if (!problem.active_primaries[p]) continue;
      if (problem.use_laser_loss) {
        const double gap = rec.lasers.power(p) - peaks[p] * vars.scale;
        for (std::size_t t = 0; t < T; ++t) {
          d_laser[p * T + t] += w.laser * 4.0 * gap * rec.lasers(p, t);
        }
        g.d_scale -= w.laser * 2.0 * gap * peaks[p];
      }
      if (problem.use_laser_floor) {
        for (std::size_t t = 0; t < T; ++t) {
          const double d = std::max(0.0, problem.laser_floor - rec.lasers(p, t));
          d_laser[p * T + t] -= w.laser * 2.0 * d;
        }
      }
    }
    for (std::size_t i = 0; i < d_laser.size(); ++i) {
      const double l = rec.lasers.values()[i];
      g.d_laser_raw[i] = d_laser[i] * l * (1.0 - l);
    }
  }

  for (std::size_t t = 0; t < T; ++t) {
    if (vars.phases.constrained()) {
      interlace_adjoint(d_phase[t], g.d_mean[t], g.d_offset[t]);
    } else {
      g.d_mean[t] = std::move(d_phase[t]);
    }
  }

  if (problem.phase_variation && vars.phases.constrained()) {
    const double weight = w.variation * problem.phase_variation_weight;
    RealGrid plus(shape.width, shape.height), minus(shape.width, shape.height);
    RealGrid d_plus(shape.width, shape.height), d_minus(shape.width, shape.height);
    for (std::size_t t = 0; t < T; ++t) {
      const auto m = vars.phases.mean[t].values();
      const auto o = vars.phases.offset[t].values();
      for (std::size_t i = 0; i < n; ++i) {
        plus.values()[i] = m[i] + o[i];
        minus.values()[i] = m[i] - o[i];
      }
      d_plus.fill(0.0);
      d_minus.fill(0.0);
      total_variation_gradient(plus, weight, d_plus);
      total_variation_gradient(minus, weight, d_minus);
      standard_deviation_gradient(plus, weight, d_plus);
      standard_deviation_gradient(minus, weight, d_minus);
      auto dm = g.d_mean[t].values();
      auto dof = g.d_offset[t].values();
      for (std::size_t i = 0; i < n; ++i) {
        dm[i] += d_plus.values()[i] + d_minus.values()[i];
        dof[i] += d_plus.values()[i] - d_minus.values()[i];
      }
    }
  }

  if (rec.scale_bonus) g.d_scale -= w.scale;
  return g;
}

GradientCheck check_gradients(const Problem& problem, const Variables& point, double step,
                              std::size_t phase_samples, std::uint64_t seed, bool scale_bonus,
                              double floor) {
  const ForwardRecord rec = forward(problem, point, scale_bonus);
  const std::vector<double> analytic = backward(problem, point, rec).flatten();
  const std::vector<double> x0 = flatten(point);

  std::size_t phase_count = 0;
  for (const auto& m : point.phases.mean) phase_count += m.size();
  for (const auto& o : point.phases.offset) phase_count += o.size();

  std::vector<std::size_t> coords(phase_count);
  std::iota(coords.begin(), coords.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(coords.begin(), coords.end(), rng);
  coords.resize(std::min(phase_samples, phase_count));
  if (!problem.lasers_fixed) {
    for (std::size_t i = 0; i < point.laser_raw.size(); ++i) coords.push_back(phase_count + i);
  }
  coords.push_back(x0.size() - 1);

  Variables probe = point;
  std::vector<double> x = x0;
  GradientCheck result;
  for (std::size_t c : coords) {
    x[c] = x0[c] + step;
    unflatten(x, probe);
    const double up = forward(problem, probe, scale_bonus).total;
    x[c] = x0[c] - step;
    unflatten(x, probe);
    const double down = forward(problem, probe, scale_bonus).total;
    x[c] = x0[c];
    const double fd = (up - down) / (2.0 * step);
    const double denom = std::max({std::abs(fd), std::abs(analytic[c]), floor});
    result.max_relative_error =
        std::max(result.max_relative_error, std::abs(fd - analytic[c]) / denom);
    ++result.coordinates;
  }
  return result;
}

}  // namespace holo
