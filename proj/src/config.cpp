#include "pcond/config.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace pcond::io {

using nlohmann::json;

std::string method_name(Method m) {
  switch (m) {
    case Method::Forward: return "forward";
    case Method::Enclose: return "enclose";
    case Method::Probe: return "probe";
    case Method::BemCheck: return "bem-check";
  }
  return "?";
}

namespace {

Vec2 parse_vec(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

geom::Shape parse_shape(const json& j, const std::string& where, std::vector<std::string>& errors,
                        bool domain_level) {
  std::string kind_key = domain_level ? "kind" : "shape";
  std::string kind = j.value(kind_key, "circle");
  if (kind == "circle") {
    geom::Circle c;
    if (j.contains("center")) c.center = parse_vec(j.at("center"));
    if (j.contains("radius"))
      c.radius = j.at("radius").get<double>();
    else
      errors.push_back(where + ": missing radius");
    return c;
  }
  if (kind == "polygon") {
    geom::Polygon p;
    if (!j.contains("vertices")) {
      errors.push_back(where + ": missing vertices");
      return p;
    }
    for (const auto& v : j.at("vertices")) p.vertices.push_back(parse_vec(v));
    return p;
  }
  errors.push_back(where + ": unknown shape kind '" + kind + "'");
  return geom::Circle{{0, 0}, 1.0};
}

const char* kKnownTop[] = {"scenario", "method",   "enclosure", "probe", "forward",
                           "bem_check", "output",  "seed",      "threads"};
const char* kKnownScenario[] = {"domain", "inclusions", "sigma_background", "p"};

}  // namespace

ParseOutcome parse_config_text(const std::string& text) {
  ParseOutcome out;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    out.errors.push_back(std::string("ParseError: ") + e.what());
    return out;
  }

  ExperimentConfig cfg;
  auto& errors = out.errors;

  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : kKnownTop) known |= it.key() == k;
    if (!known) errors.push_back("ParseError: unknown key '" + it.key() + "'");
  }

  if (!j.contains("scenario")) {
    errors.push_back("ValidationError: missing scenario");
  } else {
    const auto& js = j.at("scenario");
    for (auto it = js.begin(); it != js.end(); ++it) {
      bool known = false;
      for (const char* k : kKnownScenario) known |= it.key() == k;
      if (!known) errors.push_back("ParseError: unknown key 'scenario." + it.key() + "'");
    }
    geom::Shape domain = geom::Circle{{0, 0}, 1.0};
    if (js.contains("domain"))
      domain = parse_shape(js.at("domain"), "scenario.domain", errors, true);
    else
      errors.push_back("ValidationError: missing scenario.domain");
    std::vector<geom::InclusionComponent> incs;
    if (js.contains("inclusions")) {
      int idx = 0;
      for (const auto& ji : js.at("inclusions")) {
        std::string where = "scenario.inclusions[" + std::to_string(idx++) + "]";
        geom::InclusionComponent inc;
        std::string kind = ji.value("kind", "");
        if (kind == "superconducting")
          inc.kind = geom::InclusionKind::Superconducting;
        else if (kind == "insulating")
          inc.kind = geom::InclusionKind::Insulating;
        else
          errors.push_back(where + ": kind must be 'superconducting' or 'insulating'");
        inc.shape = parse_shape(ji, where, errors, false);
        incs.push_back(inc);
      }
    }
    double sigma = js.value("sigma_background", 1.0);
    double p = js.value("p", 2.0);
    if (!(p > 1.0)) errors.push_back("ValidationError: BadExponent, p must exceed 1 (got " +
                                     std::to_string(p) + ")");
    if (errors.empty()) {
      try {
        cfg.scenario = geom::build_scenario(domain, std::move(incs), sigma, p);
      } catch (const Error& e) {
        errors.push_back(std::string("ValidationError: ") + e.what());
      }
    }
  }

  std::string method = j.value("method", "forward");
  if (method == "forward")
    cfg.method = Method::Forward;
  else if (method == "enclose")
    cfg.method = Method::Enclose;
  else if (method == "probe")
    cfg.method = Method::Probe;
  else if (method == "bem-check")
    cfg.method = Method::BemCheck;
  else
    errors.push_back("ValidationError: unknown method '" + method + "'");

  if (j.contains("enclosure")) {
    const auto& je = j.at("enclosure");
    cfg.enclosure.directions = je.value("directions", cfg.enclosure.directions);
    if (cfg.enclosure.directions < 3)
      errors.push_back("ValidationError: enclosure.directions must be >= 3");
    if (je.contains("tau_grid")) {
      for (const auto& t : je.at("tau_grid")) cfg.enclosure.tau_grid.push_back(t.get<double>());
      for (std::size_t i = 1; i < cfg.enclosure.tau_grid.size(); ++i)
        if (cfg.enclosure.tau_grid[i] <= cfg.enclosure.tau_grid[i - 1])
          errors.push_back("ValidationError: enclosure.tau_grid must be increasing");
    }
    if (je.contains("t_ref")) cfg.enclosure.t_ref = je.at("t_ref").get<double>();
    cfg.enclosure.h_base = je.value("h_base", cfg.enclosure.h_base);
    cfg.enclosure.noise_sigma = je.value("noise_sigma", cfg.enclosure.noise_sigma);
    cfg.enclosure.classify_first = je.value("classify_first", cfg.enclosure.classify_first);
  }
  if (j.contains("probe")) {
    const auto& jp = j.at("probe");
    cfg.probe.needles = jp.value("needles", cfg.probe.needles);
    cfg.probe.t_grid = jp.value("t_grid", cfg.probe.t_grid);
    cfg.probe.k = jp.value("k", cfg.probe.k);
    cfg.probe.h_max = jp.value("h_max", cfg.probe.h_max);
    cfg.probe.threshold_factor = jp.value("threshold_factor", cfg.probe.threshold_factor);
    cfg.probe.tube_radius = jp.value("tube_radius", cfg.probe.tube_radius);
    if (cfg.probe.needles < 1) errors.push_back("ValidationError: probe.needles must be >= 1");
    if (cfg.probe.k < 1) errors.push_back("ValidationError: probe.k must be >= 1");
    if (cfg.probe.t_grid < 4) errors.push_back("ValidationError: probe.t_grid must be >= 4");
  }
  if (j.contains("forward")) {
    const auto& jf = j.at("forward");
    cfg.forward.h_max = jf.value("h_max", cfg.forward.h_max);
    if (!(cfg.forward.h_max > 0)) errors.push_back("ValidationError: forward.h_max must be > 0");
    if (jf.contains("boundary_data")) {
      const auto& jb = jf.at("boundary_data");
      cfg.forward.data_kind = jb.value("kind", cfg.forward.data_kind);
      if (jb.contains("direction")) cfg.forward.direction = parse_vec(jb.at("direction"));
      if (jb.contains("cos"))
        for (const auto& c : jb.at("cos")) cfg.forward.cos_coeffs.push_back(c.get<double>());
      if (jb.contains("sin"))
        for (const auto& c : jb.at("sin")) cfg.forward.sin_coeffs.push_back(c.get<double>());
      if (cfg.forward.data_kind != "coordinate" && cfg.forward.data_kind != "fourier")
        errors.push_back("ValidationError: forward.boundary_data.kind must be 'coordinate' or 'fourier'");
    }
  }
  if (j.contains("bem_check")) {
    const auto& jb = j.at("bem_check");
    cfg.bem.panels = jb.value("panels", cfg.bem.panels);
    cfg.bem.h_max = jb.value("h_max", cfg.bem.h_max);
    if (cfg.bem.panels < 16) errors.push_back("ValidationError: bem_check.panels must be >= 16");
  }
  if (j.contains("output")) {
    const auto& jo = j.at("output");
    cfg.out_dir = jo.value("dir", cfg.out_dir);
    cfg.svg = jo.value("svg", cfg.svg);
  }
  cfg.seed = j.value("seed", 0u);
  cfg.threads = j.value("threads", 1);
  if (cfg.threads < 1) errors.push_back("ValidationError: threads must be >= 1");

  if (errors.empty()) out.config = std::move(cfg);
  return out;
}

ParseOutcome parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    ParseOutcome out;
    out.errors.push_back("ParseError: cannot open " + path);
    return out;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace pcond::io
