#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hxdram/cost/cost_model.hpp"
#include "hxdram/decision/decision.hpp"
#include "hxdram/posterior/posterior.hpp"
#include "hxdram/thermo/types.hpp"

namespace hxdram::app {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Target as written in the file. The power target is either given directly
// or derived from reference pressure drops.
struct TargetConfig {
  double area_m2 = 37.14;
  std::optional<double> power_w;
  double dp_tube_pa = 8584.0;
  double dp_shell_pa = 20620.0;
  double relative_sigma = 0.05;
  std::optional<double> sigma_area_m2;
  std::optional<double> sigma_power_w;

  posterior::TargetSpec resolve(const thermo::CaseSpec& c) const;
};

struct SamplerConfig {
  std::size_t n_samples = 30000;
  std::uint64_t seed = 20240611;
  std::optional<std::size_t> adaptation_start = 1000;  // n_0; null in the file disables adaptation
  int n_stages = 2;
  double stage_scale = 0.25;
  std::optional<double> scale;
  std::optional<double> epsilon;
  std::optional<std::size_t> burn_in;  // defaults to n_0
  std::size_t checkpoint_every = 1000;
  int chains = 1;
  double extension_fraction = 0.5;
  std::optional<thermo::DesignVector> initial_point;
};

struct OutputConfig {
  std::filesystem::path directory = "hxdram-out";
  bool chain_csv = true;
  bool summary_json = true;
  bool ellipse_csv = true;
  bool decision_json = true;
  bool checkpoints = true;
};

struct RunConfig {
  thermo::CaseSpec case_spec = thermo::CaseSpec::naphtha_water();
  thermo::LayoutConfig layout;
  std::optional<std::filesystem::path> coefficient_file;
  thermo::DesignLimits limits;
  cost::CostParams cost;
  TargetConfig target;
  SamplerConfig sampler;
  OutputConfig output;
  std::vector<decision::NamedDesign> references = default_references();

  // Throws ConfigError for anything that would fail before sampling starts.
  void validate() const;

  static std::vector<decision::NamedDesign> default_references();
};

// Missing keys keep their defaults; unknown keys are rejected.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& c);

RunConfig load_config(const std::filesystem::path& path);

// Parses "v1,...,v7" in DesignVector field order.
thermo::DesignVector parse_design(const std::string& text);

}  // namespace hxdram::app
