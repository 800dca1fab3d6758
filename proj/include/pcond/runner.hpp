#pragma once

#include "pcond/config.hpp"
#include "pcond/report.hpp"

namespace pcond::io {

/// Executes the configured experiment and writes its artifacts (CSV, optional
/// SVG) under cfg.out_dir with write-then-rename persistence. Deterministic
/// for a fixed config and seed.
RunReport run(const ExperimentConfig& cfg);

/// Runs the acceptance checks relevant to the config's method and reports one
/// pass/fail line per criterion. exit_code 1 when any criterion fails.
RunReport verify(const ExperimentConfig& cfg);

}  // namespace pcond::io
