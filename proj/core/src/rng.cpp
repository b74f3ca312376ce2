#include "svi/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace svi {

Rng::Rng(std::uint64_t seed) : Rng(seed, {}) {}

Rng::Rng(std::uint64_t seed, std::vector<std::uint32_t> path)
    : seed_(seed), path_(std::move(path)) {
  reseed();
}

void Rng::reseed() {
  std::vector<std::uint32_t> words{static_cast<std::uint32_t>(seed_),
                                   static_cast<std::uint32_t>(seed_ >> 32),
                                   static_cast<std::uint32_t>(path_.size())};
  words.insert(words.end(), path_.begin(), path_.end());
  std::seed_seq seq(words.begin(), words.end());
  engine_.seed(seq);
  has_spare_ = false;
}

Rng Rng::split(std::uint32_t stream) const {
  auto path = path_;
  path.push_back(stream);
  return Rng(seed_, std::move(path));
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // 1 - u lies in (0, 1], so the log is finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

Eigen::MatrixXd sample_eps(Eigen::Index dim, Eigen::Index batch, Rng &rng) {
  if (dim < 1 || batch < 1) {
    throw std::invalid_argument("sample_eps: dim and batch must be positive");
  }
  Eigen::MatrixXd eps(batch, dim);
  for (Eigen::Index s = 0; s < batch; ++s) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      eps(s, j) = rng.normal();
    }
  }
  return eps;
}

} // namespace svi
