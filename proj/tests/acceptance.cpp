// Runs every acceptance check at desk scale (32 x 32 plane, 33 levels per layer)
// and prints one PASS/FAIL line per criterion. Exit status is nonzero if any fails.

#include <cstdio>
#include <iostream>

#include "seaice/verification.hpp"

int main() {
  seaice::VerificationSetup setup;
  const auto entries = seaice::suite_all(setup);
  int failed = 0;
  for (const auto& e : entries) {
    if (!e.passed) ++failed;
    std::printf("[%s] %2d %-15s %s  (%.1f s)\n", e.passed ? "PASS" : "FAIL", e.id, e.suite.c_str(),
                e.detail.c_str(), e.seconds);
  }
  std::printf("%zu checks, %d failed\n", entries.size(), failed);
  return failed == 0 ? 0 : 1;
}
