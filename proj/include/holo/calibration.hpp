#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "holo/field.hpp"

namespace holo {

/// One measured point of a laser's response: driver input and the resulting
/// normalized (linear) intensity.
struct ResponseSample {
  double driver_setting = 0.0;
  double normalized_intensity = 0.0;
};

/// Feed-forward network normalized intensity -> driver setting:
/// 1 input, four tanh hidden layers, 1 linear output. Outputs are trained on
/// driver settings rescaled to [0, 1] over the observed range.
struct CalibrationModel {
  struct Layer {
    std::size_t inputs = 0, outputs = 0;
    std::vector<double> weights;  // outputs x inputs, row-major
    std::vector<double> bias;
  };
  std::vector<Layer> layers;
  double driver_min = 0.0;
  double driver_max = 1.0;
  double training_mse = 0.0;  // in normalized driver units

  /// Raw network output mapped back to device units (unclamped).
  double evaluate(double normalized_intensity) const;
};

struct FitOptions {
  std::size_t hidden_width = 16;
  int epochs = 6000;
  double learning_rate = 0.005;
  std::uint64_t seed = 1;
};

/// Full-batch Adam on squared error. Needs >= 8 samples whose intensities span
/// [0, 1] (min <= 0.1, max >= 0.9).
CalibrationModel fit(const std::vector<ResponseSample>& samples, const FitOptions& options = {});

/// Driver setting for a normalized power l^2 in [0, 1], clamped to the observed driver range.
double map_power(const CalibrationModel& model, double normalized_power);

/// n evenly spaced driver settings in [0, 1] through a named monotone response:
/// linear, saturating (1 - e^-3d) / (1 - e^-3), thresholded max(0, (d - 0.2) / 0.8).
std::vector<ResponseSample> synth_response(const std::string& curve, std::size_t n);

/// CSV with header driver_setting,normalized_intensity. Values are taken as linear.
std::vector<ResponseSample> parse_response_csv(const std::string& text);
std::string response_csv(const std::vector<ResponseSample>& samples);

/// Plain-text weight file:
///   holo-calibration-mlp 1
///   layers <count>
///   layer <inputs> <outputs>      (then outputs*inputs weights, then outputs biases)
///   driver_range <min> <max>
///   training_mse <value>
std::string serialize(const CalibrationModel& model);
CalibrationModel deserialize(const std::string& text);

}  // namespace holo
