#include "hxdram/app/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "hxdram/thermo/coefficients.hpp"
#include "hxdram/thermo/errors.hpp"

namespace hxdram::app {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::string& section, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError("config: section '" + section + "' must be an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items())
    if (!allowed.contains(k)) throw ConfigError("config: unknown key '" + section + "." + k + "'");
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->template get<T>();
}

template <class T>
void read(const json& j, const char* key, std::optional<T>& out) {
  if (auto it = j.find(key); it != j.end()) {
    if (it->is_null())
      out.reset();
    else
      out = it->template get<T>();
  }
}

template <class T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

thermo::DesignVector design_from_json(const json& j, const std::string& where) {
  if (j.is_array()) {
    if (j.size() != thermo::DesignVector::size) throw ConfigError("config: " + where + " needs 7 values");
    return thermo::DesignVector::from_array(j.get<std::array<double, thermo::DesignVector::size>>());
  }
  if (!j.is_object()) throw ConfigError("config: " + where + " must be an object or array");
  std::array<double, thermo::DesignVector::size> a{};
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::string key(thermo::kDesignVariableNames[i]);
    if (!j.contains(key)) throw ConfigError("config: " + where + " lacks '" + key + "'");
    a[i] = j.at(key).get<double>();
  }
  if (j.size() != a.size()) throw ConfigError("config: " + where + " has unknown variables");
  return thermo::DesignVector::from_array(a);
}

void read_stream(const json& j, const std::string& side, thermo::StreamSpec& s) {
  reject_unknown(j, "case." + side,
                 {"mass_flow_kg_s", "inlet_temperature_c", "outlet_temperature_c", "density_kg_m3",
                  "heat_capacity_j_kg_k", "viscosity_pa_s", "thermal_conductivity_w_m_k", "design_pressure_pa",
                  "fouling_resistance_m2k_w", "material", "wall_conductivity_w_m_k"});
  read(j, "mass_flow_kg_s", s.mass_flow_kg_s);
  read(j, "inlet_temperature_c", s.inlet_temperature_c);
  read(j, "outlet_temperature_c", s.outlet_temperature_c);
  read(j, "density_kg_m3", s.density_kg_m3);
  read(j, "heat_capacity_j_kg_k", s.heat_capacity_j_kg_k);
  read(j, "viscosity_pa_s", s.viscosity_pa_s);
  read(j, "thermal_conductivity_w_m_k", s.thermal_conductivity_w_m_k);
  read(j, "design_pressure_pa", s.design_pressure_pa);
  read(j, "fouling_resistance_m2k_w", s.fouling_resistance_m2k_w);
  read(j, "wall_conductivity_w_m_k", s.wall_conductivity_w_m_k);
  if (j.contains("material")) s.material = thermo::parse_material(j.at("material").get<std::string>());
}

json stream_to_json(const thermo::StreamSpec& s) {
  return json{{"mass_flow_kg_s", s.mass_flow_kg_s},
              {"inlet_temperature_c", s.inlet_temperature_c},
              {"outlet_temperature_c", s.outlet_temperature_c},
              {"density_kg_m3", s.density_kg_m3},
              {"heat_capacity_j_kg_k", s.heat_capacity_j_kg_k},
              {"viscosity_pa_s", s.viscosity_pa_s},
              {"thermal_conductivity_w_m_k", s.thermal_conductivity_w_m_k},
              {"design_pressure_pa", s.design_pressure_pa},
              {"fouling_resistance_m2k_w", s.fouling_resistance_m2k_w},
              {"material", std::string(thermo::to_string(s.material))},
              {"wall_conductivity_w_m_k", s.wall_conductivity_w_m_k}};
}

void parse_into(const json& root, RunConfig& c) {
  reject_unknown(root, "<root>", {"case", "layout", "bounds", "cost", "target", "dram", "output", "references"});

  if (root.contains("case")) {
    const json& j = root.at("case");
    reject_unknown(j, "case", {"tube_fluid", "shell_fluid", "tube", "shell", "pump_efficiency"});
    read(j, "tube_fluid", c.case_spec.tube_fluid);
    read(j, "shell_fluid", c.case_spec.shell_fluid);
    read(j, "pump_efficiency", c.case_spec.pump_efficiency);
    if (j.contains("tube")) read_stream(j.at("tube"), "tube", c.case_spec.tube);
    if (j.contains("shell")) read_stream(j.at("shell"), "shell", c.case_spec.shell);
  }

  if (root.contains("layout")) {
    const json& j = root.at("layout");
    reject_unknown(j, "layout",
                   {"n_passes", "layout", "sealing_strip_pairs", "pass_partition_width_m", "f_correction",
                    "apply_leakage_factor", "apply_bypass_factor", "coefficient_file", "initial_u_guess",
                    "max_iterations", "relative_tolerance"});
    read(j, "n_passes", c.layout.n_passes);
    if (j.contains("layout")) {
      const json& l = j.at("layout");
      c.layout.layout = l.is_number() ? thermo::layout_from_angle(l.get<double>())
                                      : thermo::parse_layout(l.get<std::string>());
    }
    read(j, "sealing_strip_pairs", c.layout.sealing_strip_pairs);
    read(j, "pass_partition_width_m", c.layout.pass_partition_width_m);
    read(j, "f_correction", c.layout.f_correction_enabled);
    read(j, "apply_leakage_factor", c.layout.apply_leakage_factor);
    read(j, "apply_bypass_factor", c.layout.apply_bypass_factor);
    read(j, "initial_u_guess", c.layout.initial_u_guess);
    read(j, "max_iterations", c.layout.max_iterations);
    read(j, "relative_tolerance", c.layout.relative_tolerance);
    if (j.contains("coefficient_file") && !j.at("coefficient_file").is_null())
      c.coefficient_file = j.at("coefficient_file").get<std::string>();
  }

  if (root.contains("bounds")) {
    const json& j = root.at("bounds");
    auto& b = c.limits;
    reject_unknown(j, "bounds", {"Lbc", "Bc", "dtb_over_do", "dsb", "L", "do", "t"});
    auto pair = [&](const char* key, double& lo, double& hi) {
      if (!j.contains(key)) return;
      const auto v = j.at(key).get<std::array<double, 2>>();
      lo = v[0];
      hi = v[1];
    };
    pair("Lbc", b.baffle_spacing_min, b.baffle_spacing_max);
    pair("Bc", b.baffle_cut_min, b.baffle_cut_max);
    pair("dtb_over_do", b.tube_baffle_clearance_min_frac, b.tube_baffle_clearance_max_frac);
    pair("dsb", b.shell_baffle_clearance_min, b.shell_baffle_clearance_max);
    pair("L", b.tube_length_min, b.tube_length_max);
    pair("do", b.tube_od_min, b.tube_od_max);
    pair("t", b.wall_thickness_min, b.wall_thickness_max);
  }

  if (root.contains("cost")) {
    const json& j = root.at("cost");
    auto& p = c.cost;
    reject_unknown(j, "cost",
                   {"k1", "k2", "k3", "c1", "c2", "c3", "b1", "b2", "material_factor", "cost_index_ratio",
                    "electricity_cost", "interest_rate", "lifespan_years", "operating_hours"});
    read(j, "k1", p.k1);
    read(j, "k2", p.k2);
    read(j, "k3", p.k3);
    read(j, "c1", p.c1);
    read(j, "c2", p.c2);
    read(j, "c3", p.c3);
    read(j, "b1", p.b1);
    read(j, "b2", p.b2);
    read(j, "material_factor", p.material_factor);
    read(j, "cost_index_ratio", p.cost_index_ratio);
    read(j, "electricity_cost", p.electricity_cost);
    read(j, "interest_rate", p.interest_rate);
    read(j, "lifespan_years", p.lifespan_years);
    read(j, "operating_hours", p.operating_hours);
  }

  if (root.contains("target")) {
    const json& j = root.at("target");
    auto& t = c.target;
    reject_unknown(j, "target",
                   {"area_m2", "power_w", "dp_tube_pa", "dp_shell_pa", "relative_sigma", "sigma_area_m2",
                    "sigma_power_w"});
    read(j, "area_m2", t.area_m2);
    read(j, "power_w", t.power_w);
    read(j, "dp_tube_pa", t.dp_tube_pa);
    read(j, "dp_shell_pa", t.dp_shell_pa);
    read(j, "relative_sigma", t.relative_sigma);
    read(j, "sigma_area_m2", t.sigma_area_m2);
    read(j, "sigma_power_w", t.sigma_power_w);
  }

  if (root.contains("dram")) {
    const json& j = root.at("dram");
    auto& s = c.sampler;
    reject_unknown(j, "dram",
                   {"n_samples", "seed", "adaptation_start", "n_stages", "stage_scale", "scale", "epsilon",
                    "burn_in", "checkpoint_every", "chains", "extension_fraction", "initial_point"});
    read(j, "n_samples", s.n_samples);
    read(j, "seed", s.seed);
    read(j, "adaptation_start", s.adaptation_start);
    read(j, "n_stages", s.n_stages);
    read(j, "stage_scale", s.stage_scale);
    read(j, "scale", s.scale);
    read(j, "epsilon", s.epsilon);
    read(j, "burn_in", s.burn_in);
    read(j, "checkpoint_every", s.checkpoint_every);
    read(j, "chains", s.chains);
    read(j, "extension_fraction", s.extension_fraction);
    if (j.contains("initial_point")) {
      if (j.at("initial_point").is_null())
        s.initial_point.reset();
      else
        s.initial_point = design_from_json(j.at("initial_point"), "dram.initial_point");
    }
  }

  if (root.contains("output")) {
    const json& j = root.at("output");
    auto& o = c.output;
    reject_unknown(j, "output", {"directory", "chain_csv", "summary_json", "ellipse_csv", "decision_json", "checkpoints"});
    if (j.contains("directory")) o.directory = j.at("directory").get<std::string>();
    read(j, "chain_csv", o.chain_csv);
    read(j, "summary_json", o.summary_json);
    read(j, "ellipse_csv", o.ellipse_csv);
    read(j, "decision_json", o.decision_json);
    read(j, "checkpoints", o.checkpoints);
  }

  if (root.contains("references")) {
    const json& j = root.at("references");
    if (!j.is_object()) throw ConfigError("config: 'references' must map names to designs");
    c.references.clear();
    for (const auto& [name, v] : j.items())
      c.references.push_back({name, design_from_json(v, "references." + name)});
  }
}

}  // namespace

posterior::TargetSpec TargetConfig::resolve(const thermo::CaseSpec& c) const {
  const double power = power_w ? *power_w : thermo::pumping_power(dp_tube_pa, dp_shell_pa, c);
  posterior::TargetSpec t = posterior::TargetSpec::relative(area_m2, power, relative_sigma);
  if (sigma_area_m2) t.sigma_area_m2 = *sigma_area_m2;
  if (sigma_power_w) t.sigma_power_w = *sigma_power_w;
  return t;
}

std::vector<decision::NamedDesign> RunConfig::default_references() {
  return {
      {"single_objective", {0.06, 0.25, 0.381e-3, 3.0e-3, 10.7, 0.0381, 3.405e-3}},
      {"multi_objective", {0.079, 0.16515, 0.204e-3, 3.279e-3, 3.426, 0.019578, 1.652e-3}},
  };
}

void RunConfig::validate() const {
  try {
    case_spec.validate();
    layout.validate();
    cost.validate();
    target.resolve(case_spec).validate();
  } catch (const thermo::ModelError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  const auto od_mid = 0.5 * (limits.tube_od_min + limits.tube_od_max);
  const auto b = limits.resolve(od_mid);
  for (std::size_t i = 0; i < thermo::DesignVector::size; ++i) {
    if (!(b.lower[i] > 0.0 && b.upper[i] > b.lower[i]))
      throw ConfigError("config: bounds for " + std::string(thermo::kDesignVariableNames[i]) +
                        " must satisfy 0 < lower < upper");
  }
  const auto& s = sampler;
  if (s.n_stages < 1) throw ConfigError("config: dram.n_stages must be >= 1");
  if (!(s.stage_scale > 0.0)) throw ConfigError("config: dram.stage_scale must be positive");
  if (s.chains < 1) throw ConfigError("config: dram.chains must be >= 1");
  if (!(s.extension_fraction >= 0.0)) throw ConfigError("config: dram.extension_fraction must be >= 0");
  const std::size_t burn = s.burn_in.value_or(s.adaptation_start.value_or(0));
  if (s.n_samples < burn + 100)
    throw ConfigError("config: dram.n_samples must leave at least 100 samples after burn-in");
  if (s.initial_point && !limits.contains(*s.initial_point))
    throw ConfigError("config: dram.initial_point outside bounds: " + limits.violations(*s.initial_point));
  if (output.directory.empty()) throw ConfigError("config: output.directory is empty");
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  try {
    parse_into(j, c);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (c.coefficient_file) {
    try {
      c.layout.coefficients = std::make_shared<const thermo::CoefficientTable>(
          thermo::CoefficientTable::load(*c.coefficient_file));
    } catch (const std::exception& e) {
      throw ConfigError("config: cannot load coefficient file: " + std::string(e.what()));
    }
  }
  return c;
}

json config_to_json(const RunConfig& c) {
  json refs = json::object();
  for (const auto& r : c.references) refs[r.name] = decision::to_json(r.x);
  const auto& b = c.limits;
  const auto& s = c.sampler;
  return json{
      {"case",
       {{"tube_fluid", c.case_spec.tube_fluid},
        {"shell_fluid", c.case_spec.shell_fluid},
        {"pump_efficiency", c.case_spec.pump_efficiency},
        {"tube", stream_to_json(c.case_spec.tube)},
        {"shell", stream_to_json(c.case_spec.shell)}}},
      {"layout",
       {{"n_passes", c.layout.n_passes},
        {"layout", std::string(thermo::to_string(c.layout.layout))},
        {"sealing_strip_pairs", c.layout.sealing_strip_pairs},
        {"pass_partition_width_m", c.layout.pass_partition_width_m},
        {"f_correction", c.layout.f_correction_enabled},
        {"apply_leakage_factor", c.layout.apply_leakage_factor},
        {"apply_bypass_factor", c.layout.apply_bypass_factor},
        {"coefficient_file", c.coefficient_file ? json(c.coefficient_file->string()) : json(nullptr)},
        {"initial_u_guess", c.layout.initial_u_guess},
        {"max_iterations", c.layout.max_iterations},
        {"relative_tolerance", c.layout.relative_tolerance}}},
      {"bounds",
       {{"Lbc", {b.baffle_spacing_min, b.baffle_spacing_max}},
        {"Bc", {b.baffle_cut_min, b.baffle_cut_max}},
        {"dtb_over_do", {b.tube_baffle_clearance_min_frac, b.tube_baffle_clearance_max_frac}},
        {"dsb", {b.shell_baffle_clearance_min, b.shell_baffle_clearance_max}},
        {"L", {b.tube_length_min, b.tube_length_max}},
        {"do", {b.tube_od_min, b.tube_od_max}},
        {"t", {b.wall_thickness_min, b.wall_thickness_max}}}},
      {"cost",
       {{"k1", c.cost.k1},
        {"k2", c.cost.k2},
        {"k3", c.cost.k3},
        {"c1", c.cost.c1},
        {"c2", c.cost.c2},
        {"c3", c.cost.c3},
        {"b1", c.cost.b1},
        {"b2", c.cost.b2},
        {"material_factor", c.cost.material_factor},
        {"cost_index_ratio", c.cost.cost_index_ratio},
        {"electricity_cost", c.cost.electricity_cost},
        {"interest_rate", c.cost.interest_rate},
        {"lifespan_years", c.cost.lifespan_years},
        {"operating_hours", c.cost.operating_hours}}},
      {"target",
       {{"area_m2", c.target.area_m2},
        {"power_w", optional_json(c.target.power_w)},
        {"dp_tube_pa", c.target.dp_tube_pa},
        {"dp_shell_pa", c.target.dp_shell_pa},
        {"relative_sigma", c.target.relative_sigma},
        {"sigma_area_m2", optional_json(c.target.sigma_area_m2)},
        {"sigma_power_w", optional_json(c.target.sigma_power_w)}}},
      {"dram",
       {{"n_samples", s.n_samples},
        {"seed", s.seed},
        {"adaptation_start", optional_json(s.adaptation_start)},
        {"n_stages", s.n_stages},
        {"stage_scale", s.stage_scale},
        {"scale", optional_json(s.scale)},
        {"epsilon", optional_json(s.epsilon)},
        {"burn_in", optional_json(s.burn_in)},
        {"checkpoint_every", s.checkpoint_every},
        {"chains", s.chains},
        {"extension_fraction", s.extension_fraction},
        {"initial_point", s.initial_point ? decision::to_json(*s.initial_point) : json(nullptr)}}},
      {"output",
       {{"directory", c.output.directory.string()},
        {"chain_csv", c.output.chain_csv},
        {"summary_json", c.output.summary_json},
        {"ellipse_csv", c.output.ellipse_csv},
        {"decision_json", c.output.decision_json},
        {"checkpoints", c.output.checkpoints}}},
      {"references", refs},
  };
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

thermo::DesignVector parse_design(const std::string& text) {
  std::array<double, thermo::DesignVector::size> a{};
  std::istringstream is(text);
  std::string item;
  std::size_t n = 0;
  while (std::getline(is, item, ',')) {
    if (n == a.size()) throw ConfigError("design: expected 7 comma-separated values");
    try {
      std::size_t used = 0;
      a[n] = std::stod(item, &used);
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("design: not a number: '" + item + "'");
    }
    ++n;
  }
  if (n != a.size()) throw ConfigError("design: expected 7 comma-separated values");
  return thermo::DesignVector::from_array(a);
}

}  // namespace hxdram::app
