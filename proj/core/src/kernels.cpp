#include "sdist/kernels.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sdist::mmd {

namespace {

void require_bandwidth(double bandwidth) {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw std::invalid_argument("kernel bandwidth must be a positive finite number");
  }
}

}  // namespace

KernelSpec KernelSpec::gaussian(double bandwidth) {
  require_bandwidth(bandwidth);
  KernelSpec k;
  k.family_ = KernelFamily::gaussian;
  k.bandwidth_ = bandwidth;
  return k;
}

KernelSpec KernelSpec::laplacian(double bandwidth) {
  require_bandwidth(bandwidth);
  KernelSpec k;
  k.family_ = KernelFamily::laplacian;
  k.bandwidth_ = bandwidth;
  return k;
}

KernelSpec KernelSpec::linear() {
  KernelSpec k;
  k.family_ = KernelFamily::linear;
  return k;
}

KernelSpec KernelSpec::polynomial(double degree, double offset, double scale) {
  if (!(degree >= 1.0) || !std::isfinite(degree)) throw std::invalid_argument("polynomial kernel degree must be >= 1");
  if (!std::isfinite(offset) || !std::isfinite(scale) || !(scale > 0.0)) {
    throw std::invalid_argument("polynomial kernel needs finite offset and positive scale");
  }
  KernelSpec k;
  k.family_ = KernelFamily::polynomial;
  k.degree_ = degree;
  k.offset_ = offset;
  k.scale_ = scale;
  return k;
}

KernelSpec KernelSpec::energy(double power) {
  if (!(power > 0.0 && power <= 2.0)) throw std::invalid_argument("energy kernel power must lie in (0, 2]");
  KernelSpec k;
  k.family_ = KernelFamily::energy;
  k.power_ = power;
  return k;
}

KernelSpec KernelSpec::with_bandwidth(double bandwidth) const {
  switch (family_) {
    case KernelFamily::gaussian: return gaussian(bandwidth);
    case KernelFamily::laplacian: return laplacian(bandwidth);
    default: throw std::invalid_argument("kernel " + to_string(family_) + " has no bandwidth");
  }
}

double KernelSpec::operator()(const Eigen::Ref<const Eigen::RowVectorXd>& a,
                              const Eigen::Ref<const Eigen::RowVectorXd>& b) const {
  switch (family_) {
    case KernelFamily::gaussian:
      return std::exp(-(a - b).squaredNorm() / (2.0 * bandwidth_ * bandwidth_));
    case KernelFamily::laplacian:
      return std::exp(-(a - b).lpNorm<1>() / bandwidth_);
    case KernelFamily::linear:
      return a.dot(b);
    case KernelFamily::polynomial:
      return std::pow(scale_ * a.dot(b) + offset_, degree_);
    case KernelFamily::energy:
      return std::pow(a.norm(), power_) + std::pow(b.norm(), power_) - std::pow((a - b).norm(), power_);
  }
  return 0.0;
}

std::string KernelSpec::describe() const {
  std::ostringstream out;
  out.precision(17);
  out << to_string(family_) << '(';
  switch (family_) {
    case KernelFamily::gaussian:
    case KernelFamily::laplacian: out << "sigma=" << bandwidth_; break;
    case KernelFamily::linear: break;
    case KernelFamily::polynomial: out << "degree=" << degree_ << ";offset=" << offset_ << ";scale=" << scale_; break;
    case KernelFamily::energy: out << "p=" << power_; break;
  }
  out << ')';
  return out.str();
}

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::gaussian: return "gaussian";
    case KernelFamily::laplacian: return "laplacian";
    case KernelFamily::linear: return "linear";
    case KernelFamily::polynomial: return "polynomial";
    case KernelFamily::energy: return "energy";
  }
  return "unknown";
}

KernelFamily parse_kernel_family(const std::string& name) {
  if (name == "gaussian" || name == "rbf") return KernelFamily::gaussian;
  if (name == "laplacian") return KernelFamily::laplacian;
  if (name == "linear") return KernelFamily::linear;
  if (name == "polynomial" || name == "poly") return KernelFamily::polynomial;
  if (name == "energy") return KernelFamily::energy;
  throw std::invalid_argument("unknown kernel '" + name + "' (expected gaussian, laplacian, linear, polynomial, energy)");
}

}  // namespace sdist::mmd
