// Acceptance suite runner: executes every criterion at its pinned threshold
// and prints one pass/fail line per criterion.  Exit code 0 iff all pass.

#include <cstdio>
#include <string>
#include <vector>

#include "fidlab/acceptance.hpp"

int main(int argc, char** argv) {
  fidlab::RunConfig cfg;
  std::vector<std::string> only;
  bool serial = false;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--serial") {
      serial = true;
    } else if (arg == "--seed" && i + 1 < argc) {
      cfg.seed = std::stoull(argv[++i]);
    } else if (arg == "--only" && i + 1 < argc) {
      std::string cur;
      for (char ch : std::string(argv[++i]) + ",") {
        if (ch == ',') {
          if (!cur.empty()) only.push_back(cur);
          cur.clear();
        } else {
          cur += ch;
        }
      }
    } else {
      std::fprintf(stderr, "usage: %s [--serial] [--seed N] [--only id,id,...]\n",
                   argv[0]);
      return 2;
    }
  }

  std::vector<fidlab::CriterionResult> results =
      fidlab::run_acceptance(cfg, !serial, only);
  std::fputs(fidlab::format_results(results).c_str(), stdout);
  const bool ok = fidlab::all_pass(results);
  std::printf("%s\n", ok ? "acceptance: all criteria passed"
                         : "acceptance: FAILURES present");
  return ok ? 0 : 1;
}
