#include "holo/calibration.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>
#include <sstream>

#include "holo/adam.hpp"

namespace holo {

namespace {

constexpr int kHiddenLayers = 4;

std::string num(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

// Activations of every layer for one input; acts[0] is the input itself.
std::vector<std::vector<double>> run(const CalibrationModel& m, double x) {
  std::vector<std::vector<double>> acts{{x}};
  for (std::size_t k = 0; k < m.layers.size(); ++k) {
    const auto& L = m.layers[k];
    std::vector<double> out(L.outputs);
    for (std::size_t o = 0; o < L.outputs; ++o) {
      double s = L.bias[o];
      for (std::size_t i = 0; i < L.inputs; ++i) s += L.weights[o * L.inputs + i] * acts.back()[i];
      out[o] = k + 1 < m.layers.size() ? std::tanh(s) : s;
    }
    acts.push_back(std::move(out));
  }
  return acts;
}

std::size_t parameter_count(const CalibrationModel& m) {
  std::size_t n = 0;
  for (const auto& L : m.layers) n += L.weights.size() + L.bias.size();
  return n;
}

void gather(const CalibrationModel& m, std::vector<double>& flat) {
  flat.clear();
  for (const auto& L : m.layers) {
    flat.insert(flat.end(), L.weights.begin(), L.weights.end());
    flat.insert(flat.end(), L.bias.begin(), L.bias.end());
  }
}

void scatter(const std::vector<double>& flat, CalibrationModel& m) {
  std::size_t i = 0;
  for (auto& L : m.layers) {
    for (auto& w : L.weights) w = flat[i++];
    for (auto& b : L.bias) b = flat[i++];
  }
}

}  // namespace

double CalibrationModel::evaluate(double x) const {
  if (layers.empty()) throw Error("calibration model has no layers");
  const double y = run(*this, x).back()[0];
  return driver_min + y * (driver_max - driver_min);
}

CalibrationModel fit(const std::vector<ResponseSample>& samples, const FitOptions& options) {
  if (samples.size() < 8) throw Error("calibration needs at least 8 samples");
  double lo = samples[0].normalized_intensity, hi = lo;
  double dmin = samples[0].driver_setting, dmax = dmin;
  for (const auto& s : samples) {
    if (!std::isfinite(s.driver_setting) || !(s.normalized_intensity >= 0.0 && s.normalized_intensity <= 1.0)) {
      throw Error("calibration samples need finite settings and intensities in [0, 1]");
    }
    lo = std::min(lo, s.normalized_intensity);
    hi = std::max(hi, s.normalized_intensity);
    dmin = std::min(dmin, s.driver_setting);
    dmax = std::max(dmax, s.driver_setting);
  }
  if (hi == lo || dmax == dmin) throw Error("calibration samples are degenerate (constant data)");
  if (lo > 0.1 || hi < 0.9) throw Error("calibration samples must span the intensity range [0, 1]");
  if (options.hidden_width < 1 || options.epochs < 1) throw Error("invalid calibration fit options");

  CalibrationModel m;
  m.driver_min = dmin;
  m.driver_max = dmax;
  std::mt19937_64 rng(options.seed);
  std::size_t in = 1;
  for (int k = 0; k <= kHiddenLayers; ++k) {
    const std::size_t out = k < kHiddenLayers ? options.hidden_width : 1;
    CalibrationModel::Layer L{in, out, std::vector<double>(in * out), std::vector<double>(out, 0.0)};
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));  // Glorot uniform
    for (auto& w : L.weights) w = (static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0) * limit;
    m.layers.push_back(std::move(L));
    in = out;
  }

  const double n = static_cast<double>(samples.size());
  std::vector<double> targets;
  for (const auto& s : samples) targets.push_back((s.driver_setting - dmin) / (dmax - dmin));

  std::vector<double> params, grad(parameter_count(m));
  gather(m, params);
  AdamConfig cfg;
  cfg.learning_rate = options.learning_rate;
  Adam adam(params.size(), cfg);
  double mse = 0.0;
  for (int epoch = 0; epoch <= options.epochs; ++epoch) {
    std::fill(grad.begin(), grad.end(), 0.0);
    mse = 0.0;
    for (std::size_t j = 0; j < samples.size(); ++j) {
      const auto acts = run(m, samples[j].normalized_intensity);
      const double err = acts.back()[0] - targets[j];
      mse += err * err / n;
      // backward through the layers; offsets index the flat parameter vector
      std::vector<double> delta{2.0 * err / n};
      std::size_t offset = grad.size();
      for (std::size_t k = m.layers.size(); k-- > 0;) {
        const auto& L = m.layers[k];
        offset -= L.weights.size() + L.bias.size();
        const auto& a_in = acts[k];
        std::vector<double> back(L.inputs, 0.0);
        for (std::size_t o = 0; o < L.outputs; ++o) {
          for (std::size_t i = 0; i < L.inputs; ++i) {
            grad[offset + o * L.inputs + i] += delta[o] * a_in[i];
            back[i] += delta[o] * L.weights[o * L.inputs + i];
          }
          grad[offset + L.weights.size() + o] += delta[o];
        }
        if (k > 0) {
          for (std::size_t i = 0; i < L.inputs; ++i) back[i] *= 1.0 - a_in[i] * a_in[i];  // tanh'
        }
        delta = std::move(back);
      }
    }
    if (epoch == options.epochs) break;  // report the loss of the final weights
    adam.step(params, grad);
    scatter(params, m);
  }
  m.training_mse = mse;
  return m;
}

double map_power(const CalibrationModel& model, double normalized_power) {
  if (!(normalized_power >= 0.0 && normalized_power <= 1.0)) {
    throw Error("normalized power must lie in [0, 1]");
  }
  return std::clamp(model.evaluate(normalized_power), model.driver_min, model.driver_max);
}

std::vector<ResponseSample> synth_response(const std::string& curve, std::size_t n) {
  if (n == 0) throw Error("sample count must be positive");
  std::vector<ResponseSample> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
    double y = 0.0;
    if (curve == "linear") {
      y = d;
    } else if (curve == "saturating") {
      y = (1.0 - std::exp(-3.0 * d)) / (1.0 - std::exp(-3.0));
    } else if (curve == "thresholded") {
      y = std::max(0.0, (d - 0.2) / 0.8);
    } else {
      throw Error("unknown response curve '" + curve + "' (linear, saturating, thresholded)");
    }
    out.push_back({d, std::clamp(y, 0.0, 1.0)});
  }
  return out;
}

std::vector<ResponseSample> parse_response_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw Error("response CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "driver_setting,normalized_intensity") {
    throw Error("response CSV header must be driver_setting,normalized_intensity");
  }
  std::vector<ResponseSample> out;
  int row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    ResponseSample s;
    try {
      if (comma == std::string::npos) throw std::invalid_argument("missing column");
      std::size_t used = 0;
      s.driver_setting = std::stod(line.substr(0, comma), &used);
      s.normalized_intensity = std::stod(line.substr(comma + 1));
    } catch (const std::exception&) {
      throw Error("response CSV row " + std::to_string(row) + " is malformed");
    }
    if (!(s.normalized_intensity >= 0.0 && s.normalized_intensity <= 1.0)) {
      throw Error("response CSV row " + std::to_string(row) + ": intensity outside [0, 1]");
    }
    out.push_back(s);
  }
  return out;
}

std::string response_csv(const std::vector<ResponseSample>& samples) {
  std::ostringstream os;
  os << "driver_setting,normalized_intensity\n";
  for (const auto& s : samples) os << num(s.driver_setting) << ',' << num(s.normalized_intensity) << '\n';
  return os.str();
}

std::string serialize(const CalibrationModel& m) {
  std::ostringstream os;
  os << "holo-calibration-mlp 1\n";
  os << "layers " << m.layers.size() << '\n';
  for (const auto& L : m.layers) {
    os << "layer " << L.inputs << ' ' << L.outputs << '\n';
    for (std::size_t o = 0; o < L.outputs; ++o) {
      for (std::size_t i = 0; i < L.inputs; ++i) os << (i ? " " : "") << num(L.weights[o * L.inputs + i]);
      os << '\n';
    }
    for (std::size_t o = 0; o < L.outputs; ++o) os << (o ? " " : "") << num(L.bias[o]);
    os << '\n';
  }
  os << "driver_range " << num(m.driver_min) << ' ' << num(m.driver_max) << '\n';
  os << "training_mse " << num(m.training_mse) << '\n';
  return os.str();
}

CalibrationModel deserialize(const std::string& text) {
  std::istringstream is(text);
  std::string word;
  int version = 0;
  if (!(is >> word >> version) || word != "holo-calibration-mlp" || version != 1) {
    throw Error("not a calibration model file");
  }
  std::size_t count = 0;
  if (!(is >> word >> count) || word != "layers" || count == 0 || count > 64) {
    throw Error("calibration model: bad layer count");
  }
  CalibrationModel m;
  std::size_t expected_in = 1;
  for (std::size_t k = 0; k < count; ++k) {
    CalibrationModel::Layer L;
    if (!(is >> word >> L.inputs >> L.outputs) || word != "layer" || L.inputs != expected_in ||
        L.outputs == 0 || L.outputs > 4096) {
      throw Error("calibration model: bad header for layer " + std::to_string(k + 1));
    }
    L.weights.resize(L.inputs * L.outputs);
    L.bias.resize(L.outputs);
    for (auto& w : L.weights) {
      if (!(is >> w)) throw Error("calibration model: truncated weights");
    }
    for (auto& b : L.bias) {
      if (!(is >> b)) throw Error("calibration model: truncated biases");
    }
    expected_in = L.outputs;
    m.layers.push_back(std::move(L));
  }
  if (expected_in != 1) throw Error("calibration model: network must end in one output");
  if (!(is >> word >> m.driver_min >> m.driver_max) || word != "driver_range") {
    throw Error("calibration model: missing driver_range");
  }
  if (!(is >> word >> m.training_mse) || word != "training_mse") {
    throw Error("calibration model: missing training_mse");
  }
  return m;
}

}  // namespace holo
