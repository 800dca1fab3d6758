#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "pcond/acceptance.hpp"
#include "pcond/runner.hpp"


int main(int argc, char** argv) {
  CLI::App app{"2D inverse-boundary-value workbench: p-conductivity forward solves,"
               " enclosure and probe reconstructions, boundary-element cross-checks"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  unsigned seed = 0;
  int threads = 0;
  bool svg = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "experiment configuration (JSON)")->required();
    sub->add_option("--out-dir", out_dir, "output directory (env PCOND2D_OUT_DIR overrides)");
    sub->add_option("--seed", seed, "seed for randomized families / noise");
    sub->add_option("--threads", threads, "worker threads for sweeps");
    sub->add_flag("--svg", svg, "emit SVG overlays");
  };

  auto* s_forward = app.add_subcommand("forward", "direct p-conductivity solve");
  auto* s_enclose = app.add_subcommand("enclose", "enclosure-method hull recovery");
  auto* s_probe = app.add_subcommand("probe", "probe-method boundary sampling");
  auto* s_bem = app.add_subcommand("bem-check", "single-layer potential cross-check");
  auto* s_verify = app.add_subcommand("verify", "run the acceptance checks for the config's method");
  for (auto* sub : {s_forward, s_enclose, s_probe, s_bem, s_verify}) add_common(sub);

  // Extra CLI shortcuts mirroring the config keys.
  int directions = 0, needles = 0, tgrid = 0, k = 0;
  double noise = -1.0;
  std::string tau_spec;
  s_enclose->add_option("--directions", directions, "number of probing directions");
  s_enclose->add_option("--noise", noise, "relative Gaussian noise on the pairings");
  s_enclose->add_option("--tau", tau_spec, "tau grid as lo..hi (geometric, 6 points) or a,b,c");
  s_probe->add_option("--needles", needles, "number of chords in the fan");
  s_probe->add_option("--tgrid", tgrid, "needle parameter grid size");
  s_probe->add_option("--k", k, "Runge sequence index");

  CLI11_PARSE(app, argc, argv);

  std::optional<pcond::io::Method> method;
  bool want_verify = false;
  if (s_forward->parsed()) method = pcond::io::Method::Forward;
  if (s_enclose->parsed()) method = pcond::io::Method::Enclose;
  if (s_probe->parsed()) method = pcond::io::Method::Probe;
  if (s_bem->parsed()) method = pcond::io::Method::BemCheck;
  if (s_verify->parsed()) want_verify = true;

  auto outcome = pcond::io::parse_config(config_path);
  if (!outcome.config) {
    for (const auto& e : outcome.errors) std::fprintf(stderr, "%s\n", e.c_str());
    return 1;
  }
  auto cfg = *outcome.config;
  if (method) cfg.method = *method;
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (const char* env = std::getenv("PCOND2D_OUT_DIR")) cfg.out_dir = env;
  if (seed != 0) cfg.seed = seed;
  if (threads > 0) cfg.threads = threads;
  if (svg) cfg.svg = true;
  if (directions > 0) cfg.enclosure.directions = directions;
  if (noise >= 0.0) cfg.enclosure.noise_sigma = noise;
  if (needles > 0) cfg.probe.needles = needles;
  if (tgrid > 0) cfg.probe.t_grid = tgrid;
  if (k > 0) cfg.probe.k = k;
  if (!tau_spec.empty()) {
    cfg.enclosure.tau_grid.clear();
    auto dots = tau_spec.find("..");
    if (dots != std::string::npos) {
      double lo = std::stod(tau_spec.substr(0, dots));
      double hi = std::stod(tau_spec.substr(dots + 2));
      for (int i = 0; i < 6; ++i)
        cfg.enclosure.tau_grid.push_back(lo * std::pow(hi / lo, i / 5.0));
    } else {
      std::string rest = tau_spec;
      while (!rest.empty()) {
        auto comma = rest.find(',');
        cfg.enclosure.tau_grid.push_back(std::stod(rest.substr(0, comma)));
        if (comma == std::string::npos) break;
        rest = rest.substr(comma + 1);
      }
    }
  }

  try {
    auto rep = want_verify ? pcond::io::verify(cfg) : pcond::io::run(cfg);
    std::printf("%s", rep.to_json().c_str());
    for (const auto& note : rep.notes) std::printf("%s\n", note.c_str());
    return rep.exit_code;
  } catch (const pcond::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
