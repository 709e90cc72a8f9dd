#pragma once

#include <cstdint>
#include <random>
#include <string>

#include <Eigen/Dense>

namespace hxdram::dram {

// Seeded random stream for one chain. The full state, including any cached
// normal deviate, round-trips through save()/restore().
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 1) : engine_(seed) {}

  // Uniform on [0, 1).
  double uniform() { return uniform_(engine_); }
  double normal() { return normal_(engine_); }
  Eigen::VectorXd normal_vector(Eigen::Index d) {
    Eigen::VectorXd z(d);
    for (Eigen::Index i = 0; i < d; ++i) z[i] = normal();
    return z;
  }

  std::string save() const;
  void restore(const std::string& text);

  bool operator==(const Rng& other) const {
    return engine_ == other.engine_ && normal_ == other.normal_ && uniform_ == other.uniform_;
  }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace hxdram::dram
