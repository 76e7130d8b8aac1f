#include "sdist/generators.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sdist::harness {

const std::vector<std::string>& generator_names() {
  static const std::vector<std::string> names{"gauss", "shift-first", "shift-all", "var-all", "mog2d"};
  return names;
}

GeneratorPair make_generator(const GeneratorSpec& spec, std::size_t dim) {
  if (dim < 1) throw std::invalid_argument("generator: dimension must be >= 1");
  if (!std::isfinite(spec.shift)) throw std::invalid_argument("generator: shift must be finite");
  const auto d = static_cast<Eigen::Index>(dim);
  const GaussianModel standard = GaussianModel::standard(dim);
  if (spec.name == "gauss") return {standard, standard};
  if (spec.name == "shift-first") {
    Vector mu = Vector::Zero(d);
    mu(0) = spec.shift;
    return {standard, GaussianModel(mu, SquareMatrix::Identity(d, d))};
  }
  if (spec.name == "shift-all") return {standard, GaussianModel(Vector::Constant(d, spec.shift), SquareMatrix::Identity(d, d))};
  if (spec.name == "var-all") {
    if (!(1.0 + spec.shift > 0.0)) throw std::invalid_argument("generator var-all: 1 + shift must be positive");
    return {standard, GaussianModel(Vector::Zero(d), (1.0 + spec.shift) * SquareMatrix::Identity(d, d))};
  }
  if (spec.name == "mog2d") {
    if (dim != 2) throw std::invalid_argument("generator mog2d is two-dimensional (got d=" + std::to_string(dim) + ")");
    const MixtureModel mog = canonical_mog2d();
    return {mog, moment_matched_gaussian(mog)};
  }
  std::string known;
  for (const auto& n : generator_names()) known += (known.empty() ? "" : ", ") + n;
  throw std::invalid_argument("unknown generator '" + spec.name + "' (known: " + known + ")");
}

}  // namespace sdist::harness
