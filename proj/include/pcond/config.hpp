#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pcond/geometry.hpp"

namespace pcond::io {

enum class Method { Forward, Enclose, Probe, BemCheck };

std::string method_name(Method m);

struct EnclosureParams {
  int directions = 32;
  std::vector<double> tau_grid;  // empty: hull grid chosen from p
  double t_ref = std::numeric_limits<double>::quiet_NaN();
  double h_base = 0.08;
  double tau_h = 0.4;
  double noise_sigma = 0.0;
  bool classify_first = true;
};

struct ProbeParams {
  int needles = 64;
  int t_grid = 200;
  int k = 3;
  double h_max = 0.03;
  double threshold_factor = 50.0;
  double tube_radius = 0.08;
};

struct ForwardParams {
  double h_max = 0.05;
  // boundary data: "coordinate" (x . direction), "fourier" (cos/sin modes)
  std::string data_kind = "coordinate";
  Vec2 direction{1, 0};
  std::vector<double> cos_coeffs;
  std::vector<double> sin_coeffs;
};

struct BemCheckParams {
  int panels = 256;
  double h_max = 0.03;  // FEM cross-check resolution
};

struct ExperimentConfig {
  geom::Scenario scenario;
  Method method = Method::Forward;
  EnclosureParams enclosure;
  ProbeParams probe;
  ForwardParams forward;
  BemCheckParams bem;
  std::string out_dir = "out";
  bool svg = false;
  unsigned seed = 0;
  int threads = 1;
};

struct ParseOutcome {
  std::optional<ExperimentConfig> config;
  std::vector<std::string> errors;  // all of them, not just the first
};

/// Parses and validates a JSON experiment configuration. Collects every
/// error instead of stopping at the first.
ParseOutcome parse_config_text(const std::string& text);
ParseOutcome parse_config(const std::string& path);

}  // namespace pcond::io
