#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

namespace hxdram::thermo {

// The seven sampled design variables. SI units throughout.
struct DesignVector {
  double baffle_spacing_m = 0.0;          // central = inlet = outlet spacing
  double baffle_cut_frac = 0.0;           // fraction of shell diameter
  double tube_baffle_clearance_m = 0.0;   // diametral
  double shell_baffle_clearance_m = 0.0;  // diametral
  double tube_length_m = 0.0;
  double tube_outer_diameter_m = 0.0;
  double tube_wall_thickness_m = 0.0;

  static constexpr std::size_t size = 7;

  double inner_diameter() const { return tube_outer_diameter_m - 2.0 * tube_wall_thickness_m; }

  std::array<double, size> to_array() const;
  static DesignVector from_array(const std::array<double, size>& v);

  bool operator==(const DesignVector&) const = default;
};

// Short column names, in DesignVector field order.
inline constexpr std::array<std::string_view, DesignVector::size> kDesignVariableNames = {
    "Lbc", "Bc", "dtb", "dsb", "L", "do", "t"};

struct DesignBounds {
  std::array<double, DesignVector::size> lower{};
  std::array<double, DesignVector::size> upper{};
};

// Box bounds on the design variables. The tube-to-baffle clearance bound
// scales with the outer diameter it is paired with, so it is resolved per point.
struct DesignLimits {
  double baffle_spacing_min = 0.0508, baffle_spacing_max = 0.2540;
  double baffle_cut_min = 0.15, baffle_cut_max = 0.45;
  double tube_baffle_clearance_min_frac = 0.01, tube_baffle_clearance_max_frac = 0.1;
  double shell_baffle_clearance_min = 0.0032, shell_baffle_clearance_max = 0.011;
  double tube_length_min = 2.438, tube_length_max = 11.58;
  double tube_od_min = 0.01588, tube_od_max = 0.0508;
  double wall_thickness_min = 0.001651, wall_thickness_max = 0.004572;

  // Bounds with the tube-to-baffle clearance resolved against `tube_od`.
  DesignBounds resolve(double tube_od) const;
  bool contains(const DesignVector& x) const;
  // Human-readable list of violated bounds; empty when `x` is inside.
  std::string violations(const DesignVector& x) const;
};

enum class Material { carbon_steel, stainless_steel, copper };

Material parse_material(std::string_view name);
std::string_view to_string(Material m);

struct StreamSpec {
  double mass_flow_kg_s = 0.0;
  double inlet_temperature_c = 0.0;
  double outlet_temperature_c = 0.0;
  double density_kg_m3 = 0.0;
  double heat_capacity_j_kg_k = 0.0;
  double viscosity_pa_s = 0.0;
  double thermal_conductivity_w_m_k = 0.0;
  double design_pressure_pa = 0.0;
  double fouling_resistance_m2k_w = 0.0;
  Material material = Material::carbon_steel;
  double wall_conductivity_w_m_k = 0.0;
};

// Process data. The shell side carries the hot stream, the tube side the cold one.
struct CaseSpec {
  std::string tube_fluid = "cooling water";
  std::string shell_fluid = "naphtha";
  StreamSpec tube;
  StreamSpec shell;
  double pump_efficiency = 0.85;

  const StreamSpec& hot() const { return shell; }
  const StreamSpec& cold() const { return tube; }
  // Conductivity of the tube wall used in the overall coefficient.
  double wall_conductivity() const { return tube.wall_conductivity_w_m_k; }

  // Throws ModelError(invalid_case) on violated invariants.
  void validate() const;

  // Naphtha / cooling-water validation case.
  static CaseSpec naphtha_water();
};

enum class TubeLayout { triangular_30, rotated_square_45, square_90 };

class CoefficientTable;
// Shared immutable instance of the built-in correlation table.
std::shared_ptr<const CoefficientTable> builtin_coefficients();

TubeLayout parse_layout(std::string_view name);
std::string_view to_string(TubeLayout layout);
double layout_angle_deg(TubeLayout layout);
TubeLayout layout_from_angle(double degrees);

struct LayoutConfig {
  int n_passes = 2;
  TubeLayout layout = TubeLayout::triangular_30;
  int sealing_strip_pairs = 0;
  double pass_partition_width_m = 0.0;
  bool f_correction_enabled = true;
  // Which bundle corrections enter h_s. Both factors are always computed.
  bool apply_leakage_factor = false;
  bool apply_bypass_factor = true;
  std::shared_ptr<const CoefficientTable> coefficients = builtin_coefficients();
  double initial_u_guess = 500.0;
  int max_iterations = 100;
  double relative_tolerance = 1e-6;

  void validate() const;
};

struct Geometry {
  double tube_pitch_m = 0.0;
  int tube_count = 0;
  double bundle_diameter_m = 0.0;           // D_otl
  double centre_limit_diameter_m = 0.0;     // D_ctl
  double shell_diameter_m = 0.0;
  double baffle_cut_depth_m = 0.0;          // l_c
  double transverse_pitch_m = 0.0;          // X_t
  double longitudinal_pitch_m = 0.0;        // X_l
  int baffle_count = 0;
  double rows_crossflow = 0.0;              // N_r,cc
  double rows_window = 0.0;                 // N_r,cw
  double theta_ctl_rad = 0.0;
  double window_tube_fraction = 0.0;        // F_w
  double crossflow_tube_fraction = 0.0;     // F_c
  double area_crossflow_m2 = 0.0;           // A_o,cr
  double area_shell_baffle_m2 = 0.0;        // A_o,sb
  double area_tube_baffle_m2 = 0.0;         // A_o,tb
  double area_bypass_m2 = 0.0;              // A_o,bp
  double area_window_m2 = 0.0;              // A_o,w
  double leakage_split_ratio = 0.0;         // r_s
  double leakage_area_ratio = 0.0;          // r_lm
  double bypass_area_ratio = 0.0;           // r_b
  double sealing_strip_ratio = 0.0;         // N_ss+
};

// Non-fatal conditions raised during sizing.
enum class Warning : std::uint32_t {
  none = 0,
  shell_reynolds_clamped = 1u << 0,
  tube_laminar = 1u << 1,
};

constexpr Warning operator|(Warning a, Warning b) {
  return static_cast<Warning>(static_cast<std::uint32_t>(a) | static_cast<std::uint32_t>(b));
}
constexpr bool has(Warning set, Warning w) {
  return (static_cast<std::uint32_t>(set) & static_cast<std::uint32_t>(w)) != 0;
}

struct ShellHeatTransfer {
  double reynolds = 0.0;
  double prandtl = 0.0;
  double colburn_j = 0.0;
  double h_ideal = 0.0;
  double j_baffle_cut = 0.0;     // J_c
  double j_leakage = 0.0;        // J_l
  double j_bypass = 0.0;         // J_b
  double j_spacing = 1.0;        // J_s
  double j_laminar = 1.0;        // J_r
  double h_shell = 0.0;
  Warning warnings = Warning::none;
};

struct TubeHeatTransfer {
  double velocity = 0.0;
  double reynolds = 0.0;
  double prandtl = 0.0;
  double h_tube = 0.0;
  Warning warnings = Warning::none;
};

struct ShellPressureDrop {
  double friction_ideal = 0.0;       // f_id
  double dp_crossflow_ideal = 0.0;   // dP_b,id
  double dp_window_ideal = 0.0;      // dP_w,id
  double zeta_bypass = 0.0;
  double zeta_leakage = 0.0;
  double zeta_spacing = 0.0;
  double dp_shell = 0.0;
};

struct TubePressureDrop {
  double friction = 0.0;
  double dp_tube = 0.0;
};

struct SizingResult {
  double duty_w = 0.0;
  double lmtd_k = 0.0;
  double capacity_ratio = 0.0;   // R
  double effectiveness = 0.0;    // S
  double f_factor = 1.0;
  ShellHeatTransfer shell;
  TubeHeatTransfer tube;
  double u_overall = 0.0;
  double area_m2 = 0.0;
  ShellPressureDrop shell_dp;
  TubePressureDrop tube_dp;
  double pumping_power_w = 0.0;
  Geometry geometry;
  bool converged = false;
  int iterations = 0;
  Warning warnings = Warning::none;
};

}  // namespace hxdram::thermo
