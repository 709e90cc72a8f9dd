#pragma once

// Independent reference computations shared by the unit and acceptance tests.

#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "hxdram/dram/sampler.hpp"

namespace oracle {

// Cov(X_0..X_k) = 1/k (sum X_i X_i^T - (k+1) mean mean^T)
inline Eigen::MatrixXd batch_covariance(const std::vector<Eigen::VectorXd>& pts) {
  const auto n = pts.size();
  const auto d = pts.front().size();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  Eigen::MatrixXd outer = Eigen::MatrixXd::Zero(d, d);
  for (const auto& p : pts) {
    mean += p;
    outer += p * p.transpose();
  }
  mean /= static_cast<double>(n);
  const double k = static_cast<double>(n - 1);
  return (outer - static_cast<double>(n) * mean * mean.transpose()) / k;
}

// Two-stage proposals on states {0..4}, encoded as 1-D vectors. Stage 1 uses
// a fixed row-stochastic matrix, stage 2 a table indexed by (x, y1).
class DiscreteProposal final : public hxdram::dram::Proposal {
 public:
  static constexpr int kStates = 5;
  using Row = std::array<double, kStates>;

  DiscreteProposal() {
    for (int a = 0; a < kStates; ++a) {
      Row r{};
      double sum = 0.0;
      for (int b = 0; b < kStates; ++b) sum += r[b] = 1.0 + 0.7 * ((3 * a + 5 * b) % 7) + 0.1 * b;
      for (auto& v : r) v /= sum;
      q1_[a] = r;
      for (int y = 0; y < kStates; ++y) {
        Row t{};
        double s = 0.0;
        for (int b = 0; b < kStates; ++b) s += t[b] = 0.5 + ((a + 2 * y + 3 * b) % 5) + 0.2 * (b == y);
        for (auto& v : t) v /= s;
        q2_[a][y] = t;
      }
    }
  }

  double prob(int stage, std::span<const hxdram::dram::PathPoint> h, int cand) const {
    const int x = state(h[0].x);
    if (stage == 1) return q1_[x][cand];
    if (stage == 2) return q2_[x][state(h[1].x)][cand];
    throw std::invalid_argument("only two stages");
  }

  double log_density(int stage, std::span<const hxdram::dram::PathPoint> h,
                     const Eigen::VectorXd& cand) const override {
    return std::log(prob(stage, h, state(cand)));
  }

  Eigen::VectorXd draw(int, std::span<const hxdram::dram::PathPoint>, hxdram::dram::Rng&) const override {
    throw std::logic_error("enumerated, never drawn");
  }

  static int state(const Eigen::VectorXd& v) { return static_cast<int>(std::lround(v[0])); }

 private:
  std::array<Row, kStates> q1_{};
  std::array<std::array<Row, kStates>, kStates> q2_{};
};

inline hxdram::dram::PathPoint point(int s, const std::array<double, DiscreteProposal::kStates>& pi) {
  Eigen::VectorXd v(1);
  v[0] = s;
  return {v, std::log(pi[s])};
}

using Kernel = std::array<std::array<double, DiscreteProposal::kStates>, DiscreteProposal::kStates>;

// Enumerates every two-stage path and accumulates where the chain lands.
inline Kernel dr_kernel(const std::array<double, DiscreteProposal::kStates>& pi, const DiscreteProposal& q) {
  constexpr int n = DiscreteProposal::kStates;
  Kernel k{};
  for (int a = 0; a < n; ++a) {
    for (int y1 = 0; y1 < n; ++y1) {
      const hxdram::dram::PathPoint p1[] = {point(a, pi), point(y1, pi)};
      const double q1 = q.prob(1, p1, y1);
      const double a1 = std::exp(hxdram::dram::log_acceptance(p1, q));
      k[a][y1] += q1 * a1;
      for (int y2 = 0; y2 < n; ++y2) {
        const hxdram::dram::PathPoint p2[] = {point(a, pi), point(y1, pi), point(y2, pi)};
        const double q2 = q.prob(2, p2, y2);
        const double a2 = std::exp(hxdram::dram::log_acceptance(p2, q));
        k[a][y2] += q1 * (1.0 - a1) * q2 * a2;
        k[a][a] += q1 * (1.0 - a1) * q2 * (1.0 - a2);
      }
    }
  }
  return k;
}

// Batch-means standard error of a scalar chain.
inline double batch_means_se(const std::vector<double>& v, std::size_t batches = 50) {
  const std::size_t len = v.size() / batches;
  std::vector<double> means;
  double grand = 0.0;
  for (std::size_t b = 0; b < batches; ++b) {
    double s = 0.0;
    for (std::size_t i = 0; i < len; ++i) s += v[b * len + i];
    means.push_back(s / static_cast<double>(len));
    grand += means.back();
  }
  grand /= static_cast<double>(batches);
  double var = 0.0;
  for (double m : means) var += (m - grand) * (m - grand);
  var /= static_cast<double>(batches - 1);
  return std::sqrt(var / static_cast<double>(batches));
}

}  // namespace oracle
