#pragma once

#include <cstdint>
#include <random>
#include <utility>

#include <Eigen/Core>

namespace sdist {

/// splitmix64 finalizer. A bijection on 64-bit words.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Reproducible random stream identified by (seed, stream id).
///
/// The bit generator is std::mt19937_64, seeded through std::seed_seq from the
/// four 32-bit halves of seed and stream id; both are fully specified by the
/// standard, so sequences are identical wherever the implementation is. The
/// uniform and normal transforms are written out here rather than taken from
/// <random> distributions, whose algorithms are implementation-defined.
///
/// An Rng is single-owner. Parallel consumers get their own stream via split().
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0, std::uint64_t stream_id = 0);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  /// Independent child stream; the parent state is not advanced.
  Rng split(std::uint64_t child) const;

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1].
  double uniform_open_low() { return 1.0 - uniform(); }
  double normal();
  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);

  template <class RandomIt>
  void shuffle(RandomIt first, RandomIt last) {
    const auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
      const auto j = below(i);
      using std::swap;
      swap(first[i - 1], first[j]);
    }
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// rows x cols matrix of independent standard normals, filled row by row.
Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> standard_normal_matrix(
    Eigen::Index rows, Eigen::Index cols, Rng& rng);

}  // namespace sdist
