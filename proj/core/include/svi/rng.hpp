#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Core>

namespace svi {

/// Seed used when a caller does not supply one.
inline constexpr std::uint64_t kDefaultSeed = 20240917;

/**
 * Seedable, splittable source of standard-normal draws.
 *
 * The engine is std::mt19937_64 seeded through std::seed_seq from the seed
 * and the split path, both of which are fully specified by the standard.
 * Uniforms take the top 53 bits of each engine output; normals come from the
 * Box-Muller transform, consuming two uniforms per pair of normals. Output is
 * therefore identical across standard library implementations.
 */
class Rng {
public:
  explicit Rng(std::uint64_t seed = kDefaultSeed);

  /// Independent child stream. The parent is not advanced.
  [[nodiscard]] Rng split(std::uint32_t stream) const;

  /// Uniform on [0, 1).
  double uniform();
  double normal();

  std::uint64_t seed() const { return seed_; }

private:
  Rng(std::uint64_t seed, std::vector<std::uint32_t> path);
  void reseed();

  std::uint64_t seed_;
  std::vector<std::uint32_t> path_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// batch x d matrix of i.i.d. N(0, 1) draws, filled row by row.
Eigen::MatrixXd sample_eps(Eigen::Index dim, Eigen::Index batch, Rng &rng);

} // namespace svi
