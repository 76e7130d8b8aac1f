#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sdist/distributions.hpp"

namespace sdist::harness {

/// Named "true" / "model" distribution pairs used by the sweeps.
///
///   gauss        N(0, I) vs N(0, I)
///   shift-first  N(0, I) vs N(shift e_1, I)
///   shift-all    N(0, I) vs N(shift 1, I)
///   var-all      N(0, I) vs N(0, (1 + shift) I)
///   mog2d        reference 2d mixture vs its moment-matched Gaussian (d = 2)
struct GeneratorSpec {
  std::string name = "gauss";
  double shift = 1.0;
};

struct GeneratorPair {
  DistributionModel truth;
  DistributionModel model;
};

GeneratorPair make_generator(const GeneratorSpec& spec, std::size_t dim);
const std::vector<std::string>& generator_names();

}  // namespace sdist::harness
