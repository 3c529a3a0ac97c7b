#pragma once

#include <filesystem>

#include "creve/pipeline.hpp"
#include "creve/sim.hpp"

namespace creve {

// Estimator configuration; defaults follow the reference setup (g = 9.81,
// zero-velocity threshold 0.05, RANSAC 0.99/0.4, bias low-pass 0.01 Hz,
// gamma bounds from the radar velocity resolution and expected top speed).
struct PipelineConfig {
  GammaBounds gamma;
  RansacParams ransac;
  double z_threshold = 0.05;
  double bias_cutoff_hz = 0.01;
  double gravity = 9.81;
  // Leading stationary window used for coarse alignment; 0 disables it.
  double alignment_duration = 10.0;

  void validate() const;
};

struct EvaluationConfig {
  double max_dt = 0.05;  // s, nearest-timestamp association window

  void validate() const;
};

struct AppConfig {
  PipelineConfig pipeline;
  ScenarioConfig scenario;
  EvaluationConfig evaluation;

  void validate() const;
};

// JSON config with three optional sections: "pipeline", "scenario",
// "evaluation". An empty or missing section keeps the documented defaults;
// unknown keys anywhere are a ConfigError.
AppConfig load_config(const std::filesystem::path& path);
AppConfig parse_config(const std::string& text, const std::string& origin);

// Config snapshot for run manifests.
std::string config_to_json(const AppConfig& config);

}  // namespace creve
