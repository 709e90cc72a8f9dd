#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hxdram/app/config.hpp"
#include "hxdram/decision/decision.hpp"
#include "hxdram/dram/sampler.hpp"

// Sampling run end to end: chain, stability check, summary, decision, files.
namespace hxdram::app {

struct RunReport {
  std::vector<dram::ChainResult> chains;
  Eigen::MatrixXd samples;  // chain 0: design variables, then A_o and P_s,t
  std::vector<std::string> columns;
  decision::StabilityResult stability;
  std::optional<std::vector<double>> cross_chain_rhat;
  bool extended = false;
  decision::PosteriorSummary summary;
  std::vector<decision::Ellipse> ellipses;
  decision::DecisionResult decision;
  posterior::TargetSpec target;
  std::vector<std::string> warnings;
};

// Throws ConfigError, thermo::ModelError (invalid case) or decision::NoFeasibleDesign.
RunReport run_pipeline(const RunConfig& cfg);

// Writes the enabled artifacts into cfg.output.directory.
void write_artifacts(const RunConfig& cfg, const RunReport& report);

void write_chain_csv(std::ostream& os, const std::vector<dram::SampleRecord>& samples);

nlohmann::json summary_json(const RunConfig& cfg, const RunReport& report);

// Deterministic single evaluation of one design, checked against the bounds.
decision::EvaluatedDesign evaluate_design(const RunConfig& cfg, const thermo::DesignVector& x);
nlohmann::json evaluation_json(const decision::EvaluatedDesign& e);

dram::DramConfig make_dram_config(const RunConfig& cfg, const Eigen::MatrixXd& initial_covariance);

}  // namespace hxdram::app
