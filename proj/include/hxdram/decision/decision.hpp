#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "hxdram/cost/cost_model.hpp"
#include "hxdram/thermo/thermal.hpp"

// Post-processing of finished chains: marginal summaries, stationarity
// check, 2-D confidence ellipses and minimum-TAC selection.
namespace hxdram::decision {

class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateEllipse : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoFeasibleDesign : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Linear interpolation between order statistics (Hyndman-Fan type 7).
double quantile(std::span<const double> values, double p);

struct MarginalSummary {
  std::string name;
  double mean = 0.0;
  double variance = 0.0;  // divisor n - 1
  double q05 = 0.0;
  double q95 = 0.0;
};

struct PosteriorSummary {
  std::size_t samples = 0;  // after burn-in
  std::size_t burn_in = 0;
  std::vector<MarginalSummary> marginals;
  double infeasible_fraction = 0.0;
  std::vector<double> stage_acceptance;  // accepted / attempted per stage
  double overall_acceptance = 0.0;
  std::vector<double> rhat;
  bool converged = false;
};

// `samples` holds one draw per row. Rows before `burn_in` are dropped; at
// least 100 must remain.
PosteriorSummary summarize(const Eigen::MatrixXd& samples, std::span<const std::string> names,
                           std::size_t burn_in);

// Potential scale reduction per column across equally long chains.
std::vector<double> gelman_rubin(std::span<const Eigen::MatrixXd> chains);

struct StabilityResult {
  bool converged = false;
  std::vector<double> rhat;
  double max_rhat = 0.0;
};

inline constexpr double kRhatThreshold = 1.05;

// Split R-hat over the last 2 * window rows. Throws InsufficientData when
// the chain is shorter than that.
StabilityResult stability_check(const Eigen::MatrixXd& chain, std::size_t window);

struct Ellipse {
  std::string x_name;
  std::string y_name;
  double mass = 0.0;
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Identity();
  double radius = 0.0;  // Mahalanobis radius
  double axis1 = 0.0;   // semi-axis along the major eigenvector
  double axis2 = 0.0;
  double angle = 0.0;   // radians, major axis from the x axis

  bool contains(const Eigen::Vector2d& p) const;
};

// Mahalanobis radius^2 for a 2-D Gaussian holding `mass` of the probability.
double chi2_2_quantile(double mass);

// Gaussian-fit ellipse of an n x 2 sample matrix.
Ellipse confidence_ellipse(const Eigen::MatrixX2d& xy, double mass);

struct NamedDesign {
  std::string name;
  thermo::DesignVector x;
};

struct EvaluatedDesign {
  thermo::DesignVector x;
  thermo::SizingResult sizing;
  cost::CostBreakdown cost;
};

// Full model + cost evaluation; model errors propagate.
EvaluatedDesign evaluate_design(const thermo::DesignVector& x, const thermo::CaseSpec& c,
                                const thermo::LayoutConfig& layout, const cost::CostParams& p);

struct DecisionResult {
  EvaluatedDesign chosen;
  std::string source;          // "chain" or a reference name
  std::size_t chain_index = 0;  // meaningful when source == "chain"
  std::map<std::string, double> reference_tac;
  std::map<std::string, double> tac_reduction;  // (TAC_ref - TAC_chosen) / TAC_ref
  double best_sample_tac = 0.0;
  std::size_t sample_index = 0;
  std::size_t candidates = 0;
  std::size_t infeasible = 0;
};

// Lowest TAC over chain samples, then references; ties keep the earliest.
// Infeasible candidates are skipped. Throws NoFeasibleDesign when no chain
// sample is feasible.
DecisionResult select_min_tac(std::span<const thermo::DesignVector> samples,
                              std::span<const NamedDesign> references, const thermo::CaseSpec& c,
                              const thermo::LayoutConfig& layout, const cost::CostParams& p);

nlohmann::json to_json(const thermo::DesignVector& x);
nlohmann::json to_json(const thermo::SizingResult& r);
nlohmann::json to_json(const cost::CostBreakdown& c);
nlohmann::json to_json(const PosteriorSummary& s);
nlohmann::json to_json(const DecisionResult& d);

void write_ellipses_csv(std::ostream& os, std::span<const Ellipse> ellipses);

}  // namespace hxdram::decision
