#pragma once

#include <atomic>
#include <cstddef>
#include <optional>
#include <stdexcept>

#include <Eigen/Dense>

#include "hxdram/dram/sampler.hpp"
#include "hxdram/thermo/thermal.hpp"

// Posterior over the seven design variables: uniform box prior times a
// Gaussian likelihood on the sized area and pumping power.
namespace hxdram::posterior {

struct TargetSpec {
  double target_area_m2 = 0.0;   // A*
  double target_power_w = 0.0;   // P*
  double sigma_area_m2 = 0.0;
  double sigma_power_w = 0.0;

  void validate() const;

  // Sigmas as a fraction of each target.
  static TargetSpec relative(double area_m2, double power_w, double rel_sigma = 0.05);
  // P* from a pair of reference pressure drops on the given case.
  static TargetSpec from_pressure_drops(double area_m2, double dp_tube_pa, double dp_shell_pa,
                                        const thermo::CaseSpec& c, double rel_sigma = 0.05);
};

using PriorBox = thermo::DesignLimits;

// 0 inside the box (tube-to-baffle clearance checked against the sampled d_o), else -inf.
double log_prior(const thermo::DesignVector& x, const PriorBox& box);

double log_likelihood(const thermo::SizingResult& r, const TargetSpec& t);

struct PosteriorPoint {
  double log_density = dram::kNegInf;
  std::optional<thermo::SizingResult> sizing;  // unset when the model was not run or failed
  bool infeasible = false;                     // sizing raised infeasible_geometry or diverged
};

// Case-level model errors (invalid case, bad layout) propagate.
PosteriorPoint log_posterior(const thermo::DesignVector& x, const thermo::CaseSpec& c,
                             const thermo::LayoutConfig& layout, const TargetSpec& t,
                             const PriorBox& box);

struct InitialState {
  thermo::DesignVector start;
  Eigen::MatrixXd covariance;  // diagonal, sigma = (upper - lower) / 4
};

// The tube-to-baffle clearance range is resolved at the midpoint d_o.
// Throws std::invalid_argument for an empty or inverted range.
InitialState initial_state(const PriorBox& box);

Eigen::VectorXd to_vector(const thermo::DesignVector& x);
thermo::DesignVector to_design(const Eigen::VectorXd& v);

// Columns of Evaluation::derived: area, pumping power, shell dp, tube dp.
inline constexpr std::size_t kDerivedCount = 4;

class DesignPosterior final : public dram::TargetDensity {
 public:
  DesignPosterior(thermo::CaseSpec c, thermo::LayoutConfig layout, TargetSpec t, PriorBox box = {});

  std::size_t dimension() const override { return thermo::DesignVector::size; }
  dram::Evaluation evaluate(const Eigen::VectorXd& x) const override;

  std::size_t evaluations() const { return evaluations_.load(); }
  std::size_t model_calls() const { return model_calls_.load(); }
  std::size_t infeasible() const { return infeasible_.load(); }

  const thermo::CaseSpec& case_spec() const { return case_; }
  const thermo::LayoutConfig& layout() const { return layout_; }
  const TargetSpec& target() const { return target_; }
  const PriorBox& box() const { return box_; }

 private:
  thermo::CaseSpec case_;
  thermo::LayoutConfig layout_;
  TargetSpec target_;
  PriorBox box_;
  mutable std::atomic<std::size_t> evaluations_{0};
  mutable std::atomic<std::size_t> model_calls_{0};
  mutable std::atomic<std::size_t> infeasible_{0};
};

}  // namespace hxdram::posterior
