#include <cstdlib>
#include <cstring>
#include <iostream>

#include "monotest/acceptance.hpp"

int main(int argc, char** argv) {
  monotest::AcceptanceOptions opt;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--quick") == 0) opt.quick = true;
    else if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc) opt.seed = std::strtoull(argv[++i], nullptr, 10);
  }
  int failed = 0;
  monotest::run_acceptance(opt, [&](const monotest::CriterionResult& r) {
    std::cout << monotest::format_result(r) << std::endl;
    failed += !r.passed;
  });
  std::cout << (monotest::kCriterionCount - failed) << "/" << monotest::kCriterionCount << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
