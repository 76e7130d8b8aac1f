#pragma once

#include <functional>
#include <string>
#include <vector>

namespace sdist::acceptance {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string name;
  std::string summary;
  std::function<Outcome()> run;
  double time_limit_seconds = 0.0;  // 0 = no limit
};

std::vector<Criterion> distance_criteria();
std::vector<Criterion> experiment_criteria();
std::vector<Criterion> fitting_criteria();

std::string fmt(double value, int precision = 6);

}  // namespace sdist::acceptance
