// Acceptance criteria, one line per criterion. Exit status 1 if any fails.
#include "rigidlab/selftest.hpp"

#include <cstdio>

int main() {
  bool ok = true;
  for (int id = 1; id <= rigidlab::kCriterionCount; ++id) {
    const rigidlab::CriterionResult r = rigidlab::run_criterion(id);
    std::printf("%s\n", rigidlab::format_line(r).c_str());
    std::fflush(stdout);
    ok = ok && r.pass;
  }
  return ok ? 0 : 1;
}
