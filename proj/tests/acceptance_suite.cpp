// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria. Expected state of this build is documented in the README
// ("Known limitations"): the probe-fan criterion reports its two deep-hit
// sub-checks as FAIL; everything else is green.

#include <cstdio>
#include <cstdlib>

#include "pcond/acceptance.hpp"

int main(int argc, char** argv) {
  int threads = 1;
  std::vector<int> ids = pcond::acceptance::all_criteria();
  for (int a = 1; a < argc; ++a) {
    std::string arg = argv[a];
    if (arg == "--threads" && a + 1 < argc) {
      threads = std::atoi(argv[++a]);
    } else if (arg == "--only" && a + 1 < argc) {
      ids.clear();
      std::string rest = argv[++a];
      while (!rest.empty()) {
        auto comma = rest.find(',');
        ids.push_back(std::atoi(rest.substr(0, comma).c_str()));
        if (comma == std::string::npos) break;
        rest = rest.substr(comma + 1);
      }
    }
  }

  int failed = 0;
  for (int id : ids) {
    pcond::acceptance::CriterionResult res;
    try {
      res = pcond::acceptance::run_criterion(id, threads);
    } catch (const std::exception& e) {
      std::printf("[FAIL] %2d (exception: %s)\n", id, e.what());
      ++failed;
      continue;
    }
    std::printf("[%s] %2d %-28s (%.1fs)\n", res.pass() ? "PASS" : "FAIL", res.id,
                res.name.c_str(), res.seconds);
    for (const auto& c : res.checks)
      std::printf("        %s  %s: %s\n", c.pass ? "ok  " : "FAIL", c.name.c_str(),
                  c.detail.c_str());
    if (!res.pass()) ++failed;
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, ids.size());
  return failed;
}
