#include "hxdram/thermo/types.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hxdram/thermo/errors.hpp"

namespace hxdram::thermo {

namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  std::replace(out.begin(), out.end(), ' ', '_');
  std::replace(out.begin(), out.end(), '-', '_');
  return out;
}

}  // namespace

std::array<double, DesignVector::size> DesignVector::to_array() const {
  return {baffle_spacing_m,   baffle_cut_frac,        tube_baffle_clearance_m,
          shell_baffle_clearance_m, tube_length_m,    tube_outer_diameter_m,
          tube_wall_thickness_m};
}

DesignVector DesignVector::from_array(const std::array<double, size>& v) {
  return DesignVector{v[0], v[1], v[2], v[3], v[4], v[5], v[6]};
}

DesignBounds DesignLimits::resolve(double tube_od) const {
  DesignBounds b;
  b.lower = {baffle_spacing_min,
             baffle_cut_min,
             tube_baffle_clearance_min_frac * tube_od,
             shell_baffle_clearance_min,
             tube_length_min,
             tube_od_min,
             wall_thickness_min};
  b.upper = {baffle_spacing_max,
             baffle_cut_max,
             tube_baffle_clearance_max_frac * tube_od,
             shell_baffle_clearance_max,
             tube_length_max,
             tube_od_max,
             wall_thickness_max};
  return b;
}

bool DesignLimits::contains(const DesignVector& x) const {
  const auto b = resolve(x.tube_outer_diameter_m);
  const auto v = x.to_array();
  for (std::size_t i = 0; i < DesignVector::size; ++i) {
    // Written so that NaN lands outside.
    if (!(v[i] >= b.lower[i] && v[i] <= b.upper[i])) return false;
  }
  return x.inner_diameter() > 0.0;
}

std::string DesignLimits::violations(const DesignVector& x) const {
  const auto b = resolve(x.tube_outer_diameter_m);
  const auto v = x.to_array();
  std::ostringstream os;
  for (std::size_t i = 0; i < DesignVector::size; ++i) {
    if (!(v[i] >= b.lower[i] && v[i] <= b.upper[i])) {
      os << kDesignVariableNames[i] << "=" << v[i] << " outside [" << b.lower[i] << ", "
         << b.upper[i] << "]; ";
    }
  }
  if (!(x.inner_diameter() > 0.0)) os << "inner diameter d_o - 2t is not positive; ";
  return os.str();
}

Material parse_material(std::string_view name) {
  const auto key = lowercase(name);
  if (key == "carbon_steel" || key == "cs") return Material::carbon_steel;
  if (key == "stainless_steel" || key == "ss") return Material::stainless_steel;
  if (key == "copper" || key == "cu") return Material::copper;
  throw std::invalid_argument("unknown material: " + std::string(name));
}

std::string_view to_string(Material m) {
  switch (m) {
    case Material::carbon_steel: return "carbon_steel";
    case Material::stainless_steel: return "stainless_steel";
    case Material::copper: return "copper";
  }
  return "unknown";
}

TubeLayout parse_layout(std::string_view name) {
  const auto key = lowercase(name);
  if (key == "triangular" || key == "triangular_30" || key == "30") return TubeLayout::triangular_30;
  if (key == "rotated_square" || key == "rotated_square_45" || key == "45")
    return TubeLayout::rotated_square_45;
  if (key == "square" || key == "square_90" || key == "90") return TubeLayout::square_90;
  throw std::invalid_argument("unknown tube layout: " + std::string(name));
}

std::string_view to_string(TubeLayout layout) {
  switch (layout) {
    case TubeLayout::triangular_30: return "triangular";
    case TubeLayout::rotated_square_45: return "rotated_square";
    case TubeLayout::square_90: return "square";
  }
  return "unknown";
}

double layout_angle_deg(TubeLayout layout) {
  switch (layout) {
    case TubeLayout::triangular_30: return 30.0;
    case TubeLayout::rotated_square_45: return 45.0;
    case TubeLayout::square_90: return 90.0;
  }
  return 0.0;
}

TubeLayout layout_from_angle(double degrees) {
  if (std::abs(degrees - 30.0) < 1e-9) return TubeLayout::triangular_30;
  if (std::abs(degrees - 45.0) < 1e-9) return TubeLayout::rotated_square_45;
  if (std::abs(degrees - 90.0) < 1e-9) return TubeLayout::square_90;
  throw std::invalid_argument("layout angle must be 30, 45 or 90 degrees");
}

void CaseSpec::validate() const {
  auto fail = [](const std::string& msg) {
    throw ModelError(ModelErrc::invalid_case, "invalid case: " + msg);
  };
  if (!(hot().inlet_temperature_c > hot().outlet_temperature_c))
    fail("hot stream must cool down (shell inlet > shell outlet)");
  if (!(cold().outlet_temperature_c > cold().inlet_temperature_c))
    fail("cold stream must heat up (tube outlet > tube inlet)");
  for (const auto* s : {&tube, &shell}) {
    const char* side = s == &tube ? "tube" : "shell";
    if (!(s->mass_flow_kg_s > 0)) fail(std::string(side) + " mass flow must be positive");
    if (!(s->density_kg_m3 > 0)) fail(std::string(side) + " density must be positive");
    if (!(s->heat_capacity_j_kg_k > 0)) fail(std::string(side) + " heat capacity must be positive");
    if (!(s->viscosity_pa_s > 0)) fail(std::string(side) + " viscosity must be positive");
    if (!(s->thermal_conductivity_w_m_k > 0))
      fail(std::string(side) + " thermal conductivity must be positive");
    if (!(s->fouling_resistance_m2k_w >= 0))
      fail(std::string(side) + " fouling resistance must be non-negative");
  }
  if (!(wall_conductivity() > 0)) fail("tube wall conductivity must be positive");
  if (!(pump_efficiency > 0 && pump_efficiency <= 1)) fail("pump efficiency must be in (0, 1]");
}

CaseSpec CaseSpec::naphtha_water() {
  CaseSpec c;
  c.tube_fluid = "cooling water";
  c.shell_fluid = "naphtha";

  c.tube.mass_flow_kg_s = 30.0;
  c.tube.inlet_temperature_c = 33.0;
  c.tube.outlet_temperature_c = 37.21;
  c.tube.density_kg_m3 = 1000.0;
  c.tube.heat_capacity_j_kg_k = 4186.8;
  c.tube.viscosity_pa_s = 0.00071;
  c.tube.thermal_conductivity_w_m_k = 0.63;
  c.tube.design_pressure_pa = 1278142.0;
  c.tube.fouling_resistance_m2k_w = 0.0004;
  c.tube.material = Material::stainless_steel;
  c.tube.wall_conductivity_w_m_k = 16.0;

  c.shell.mass_flow_kg_s = 2.7;
  c.shell.inlet_temperature_c = 114.0;
  c.shell.outlet_temperature_c = 40.0;
  c.shell.density_kg_m3 = 656.0;
  c.shell.heat_capacity_j_kg_k = 2646.06;
  c.shell.viscosity_pa_s = 3.70e-4;
  c.shell.thermal_conductivity_w_m_k = 0.11;
  c.shell.design_pressure_pa = 738767.0;
  c.shell.fouling_resistance_m2k_w = 0.0002;
  c.shell.material = Material::carbon_steel;
  c.shell.wall_conductivity_w_m_k = 55.0;

  c.pump_efficiency = 0.85;
  return c;
}

void LayoutConfig::validate() const {
  auto fail = [](const std::string& msg) {
    throw ModelError(ModelErrc::infeasible_configuration, "invalid layout: " + msg);
  };
  if (n_passes < 1) fail("number of tube passes must be >= 1");
  if (sealing_strip_pairs < 0) fail("sealing strip pairs must be >= 0");
  if (pass_partition_width_m < 0) fail("pass partition width must be >= 0");
  if (!coefficients) fail("no correlation table");
  if (!(initial_u_guess > 0)) fail("initial U guess must be positive");
  if (max_iterations < 1) fail("max_iterations must be >= 1");
  if (!(relative_tolerance > 0)) fail("relative tolerance must be positive");
}

}  // namespace hxdram::thermo
