// Runs the acceptance criteria and prints one PASS/FAIL line per row.
//   acceptance [--row N] [--fixtures DIR]
#include <cstdlib>
#include <iostream>
#include <string>

#include "pst/acceptance.hpp"

int main(int argc, char** argv) {
  int only = 0;
  std::string dir = PST_FIXTURES_DIR;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--row" && i + 1 < argc) only = std::atoi(argv[++i]);
    else if (arg == "--fixtures" && i + 1 < argc) dir = argv[++i];
    else {
      std::cerr << "usage: acceptance [--row N] [--fixtures DIR]\n";
      return 2;
    }
  }
  if (only < 0 || only > pst::acceptance::row_count) {
    std::cerr << "row must be in 1.." << pst::acceptance::row_count << '\n';
    return 2;
  }
  int failed = 0;
  for (int row = 1; row <= pst::acceptance::row_count; ++row) {
    if (only && row != only) continue;
    const auto r = pst::acceptance::run_row(row, dir);
    std::cout << pst::acceptance::summary_line(r) << std::endl;
    failed += !r.pass();
  }
  if (!only) std::cout << (pst::acceptance::row_count - failed) << "/" << pst::acceptance::row_count << " rows pass\n";
  return failed ? 1 : 0;
}
