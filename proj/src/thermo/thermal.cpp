#include "hxdram/thermo/thermal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace hxdram::thermo {

namespace {

constexpr double kPi = std::numbers::pi;

[[noreturn]] void infeasible_geometry(const std::string& msg) {
  throw ModelError(ModelErrc::infeasible_geometry, "infeasible geometry: " + msg);
}

double pitch_ratio_term(double exponent) {
  // (1.33 / (P_t/d_o))^exponent with P_t = 1.25 d_o.
  return std::pow(1.33 / 1.25, exponent);
}

}  // namespace

std::string_view to_string(ModelErrc code) {
  switch (code) {
    case ModelErrc::invalid_case: return "invalid_case";
    case ModelErrc::temperature_cross: return "temperature_cross";
    case ModelErrc::infeasible_configuration: return "infeasible_configuration";
    case ModelErrc::infeasible_geometry: return "infeasible_geometry";
    case ModelErrc::diverged: return "diverged";
  }
  return "unknown";
}

HeatDuty heat_duty(const CaseSpec& c) {
  const auto& h = c.hot();
  const auto& k = c.cold();
  const double q_hot =
      h.mass_flow_kg_s * h.heat_capacity_j_kg_k * (h.inlet_temperature_c - h.outlet_temperature_c);
  const double q_cold =
      k.mass_flow_kg_s * k.heat_capacity_j_kg_k * (k.outlet_temperature_c - k.inlet_temperature_c);
  if (!(q_hot > 0.0)) throw ModelError(ModelErrc::invalid_case, "invalid case: heat duty is not positive");
  return {q_hot, std::abs(q_hot - q_cold) / q_hot};
}

double lmtd(double t_hot_in, double t_hot_out, double t_cold_in, double t_cold_out) {
  const double dt1 = t_hot_in - t_cold_out;
  const double dt2 = t_hot_out - t_cold_in;
  if (!(dt1 > 0.0) || !(dt2 > 0.0)) {
    throw ModelError(ModelErrc::temperature_cross,
                     "temperature cross: terminal differences " + std::to_string(dt1) + " K and " +
                         std::to_string(dt2) + " K must both be positive");
  }
  if (std::abs(dt1 - dt2) <= 1e-12 * std::max(dt1, dt2)) return 0.5 * (dt1 + dt2);
  return (dt1 - dt2) / std::log1p((dt1 - dt2) / dt2);
}

double capacity_ratio(const CaseSpec& c) {
  return (c.hot().inlet_temperature_c - c.hot().outlet_temperature_c) /
         (c.cold().outlet_temperature_c - c.cold().inlet_temperature_c);
}

double thermal_effectiveness(const CaseSpec& c) {
  return (c.cold().outlet_temperature_c - c.cold().inlet_temperature_c) /
         (c.hot().inlet_temperature_c - c.cold().inlet_temperature_c);
}

double required_area(double duty_w, double u_overall, double lmtd_k, double f_factor) {
  return duty_w / (u_overall * lmtd_k * f_factor);
}

double f_correction(double r, double s) {
  auto fail = [&](const std::string& why) -> double {
    throw ModelError(ModelErrc::infeasible_configuration,
                     "F correction undefined for R=" + std::to_string(r) + ", S=" +
                         std::to_string(s) + ": " + why);
  };
  if (!(s > 0.0 && s < 1.0)) return fail("S must lie in (0, 1)");
  if (!(r >= 0.0)) return fail("R must be non-negative");
  if (!(r * s < 1.0)) return fail("R*S must be below 1");

  const double w = std::sqrt(r * r + 1.0);
  const double den_lo = 1.0 - 0.5 * s * (r + 1.0 + w);  // (2 - S(R+1+w)) / 2
  if (!(den_lo > 0.0)) return fail("no single-shell arrangement reaches this duty");
  const double log_den = std::log1p(-0.5 * s * (r + 1.0 - w)) - std::log1p(-0.5 * s * (r + 1.0 + w));
  if (!(log_den > 0.0)) return fail("degenerate logarithm");

  double numerator = 0.0;
  if (std::abs(r - 1.0) < 1e-7) {
    // ln((1-S)/(1-RS)) / (R-1) -> S / (1-S) as R -> 1
    numerator = w * s / (1.0 - s);
  } else {
    numerator = w * (std::log1p(-s) - std::log1p(-r * s)) / (r - 1.0);
  }
  const double f = numerator / log_den;
  if (!(f > 0.0) || !std::isfinite(f)) return fail("non-positive correction");
  return std::min(f, 1.0);
}

double bundle_diameter(double tube_od, int tube_count, BundleConstants k) {
  return tube_od * std::pow(static_cast<double>(tube_count) / k.k1, 1.0 / k.n1);
}

double baffle_cut_angle(double shell_d, double cut_depth, double ctl_d) {
  const double arg = std::clamp((shell_d - 2.0 * cut_depth) / ctl_d, -1.0, 1.0);
  return 2.0 * std::acos(arg);
}

double crossflow_tube_fraction(double theta_ctl) {
  return 1.0 - theta_ctl / kPi + std::sin(theta_ctl) / kPi;
}

int baffle_count(double tube_length, double baffle_spacing) {
  return std::max(1, static_cast<int>(std::floor(tube_length / baffle_spacing)) - 1);
}

Geometry derive_geometry(const DesignVector& x, const LayoutConfig& layout, double area_m2) {
  const double d_o = x.tube_outer_diameter_m;
  const double length = x.tube_length_m;
  const double spacing = x.baffle_spacing_m;
  const double cut = x.baffle_cut_frac;

  if (!(area_m2 > 0.0) || !std::isfinite(area_m2)) infeasible_geometry("area must be positive");
  if (!(d_o > 0.0) || !(length > 0.0) || !(spacing > 0.0))
    infeasible_geometry("tube diameter, tube length and baffle spacing must be positive");
  if (!(cut > 0.0)) infeasible_geometry("baffle cut must be positive");
  if (!(cut < 1.0)) infeasible_geometry("baffle cut deeper than the shell");

  Geometry g;
  g.tube_pitch_m = 1.25 * d_o;

  const double tubes = area_m2 / (kPi * d_o * length);
  if (tubes > 1e7) infeasible_geometry("tube count out of range");
  g.tube_count = static_cast<int>(std::ceil(tubes));
  if (g.tube_count < 1) infeasible_geometry("fewer than one tube");

  const auto k = layout.coefficients->bundle(layout.layout, layout.n_passes);
  g.bundle_diameter_m = bundle_diameter(d_o, g.tube_count, k);
  g.shell_diameter_m = g.bundle_diameter_m / 0.95 + x.shell_baffle_clearance_m;
  g.centre_limit_diameter_m = g.bundle_diameter_m - d_o;
  if (!(g.centre_limit_diameter_m > 0.0)) infeasible_geometry("centre-line-limit diameter <= 0");

  g.baffle_cut_depth_m = cut * g.shell_diameter_m;

  const double pitch = g.tube_pitch_m;
  switch (layout.layout) {
    case TubeLayout::triangular_30:
      g.transverse_pitch_m = pitch;
      g.longitudinal_pitch_m = std::sqrt(3.0) / 2.0 * pitch;
      break;
    case TubeLayout::rotated_square_45:
      g.transverse_pitch_m = std::sqrt(2.0) * pitch;
      g.longitudinal_pitch_m = pitch / std::sqrt(2.0);
      break;
    case TubeLayout::square_90:
      g.transverse_pitch_m = pitch;
      g.longitudinal_pitch_m = pitch;
      break;
  }

  g.theta_ctl_rad =
      baffle_cut_angle(g.shell_diameter_m, g.baffle_cut_depth_m, g.centre_limit_diameter_m);
  g.crossflow_tube_fraction = crossflow_tube_fraction(g.theta_ctl_rad);
  g.window_tube_fraction = 0.5 * (1.0 - g.crossflow_tube_fraction);

  g.rows_crossflow = (g.shell_diameter_m - 2.0 * g.baffle_cut_depth_m) / g.longitudinal_pitch_m;
  if (!(g.rows_crossflow > 0.0)) infeasible_geometry("no tube rows between baffle tips");
  g.rows_window = 0.8 * g.baffle_cut_depth_m / g.longitudinal_pitch_m;

  // Free gap across the bundle per unit baffle spacing.
  double bundle_gap = (g.centre_limit_diameter_m / g.transverse_pitch_m) * (g.transverse_pitch_m - d_o);
  if (layout.layout == TubeLayout::rotated_square_45) {
    bundle_gap = (g.centre_limit_diameter_m / g.transverse_pitch_m) * 2.0 * (pitch - d_o);
  }
  g.area_crossflow_m2 = (g.shell_diameter_m - g.bundle_diameter_m + bundle_gap) * spacing;

  const double clearance = x.tube_baffle_clearance_m;
  g.area_tube_baffle_m2 = kPi / 4.0 * ((d_o + clearance) * (d_o + clearance) - d_o * d_o) *
                          g.tube_count * (1.0 - g.window_tube_fraction);

  // Angle of the baffle cut measured on the shell circle.
  const double theta_ds = 2.0 * std::acos(1.0 - 2.0 * cut);
  g.area_shell_baffle_m2 =
      kPi * g.shell_diameter_m * (x.shell_baffle_clearance_m / 2.0) * (1.0 - theta_ds / (2.0 * kPi));

  const double window_gross =
      g.shell_diameter_m * g.shell_diameter_m / 4.0 * (theta_ds / 2.0 - std::sin(theta_ds) / 2.0);
  const double window_tubes = g.window_tube_fraction * g.tube_count * kPi * d_o * d_o / 4.0;
  g.area_window_m2 = window_gross - window_tubes;

  g.area_bypass_m2 = spacing * (g.shell_diameter_m - g.bundle_diameter_m +
                                0.5 * layout.n_passes * layout.pass_partition_width_m);

  if (!(g.area_crossflow_m2 > 0.0)) infeasible_geometry("cross-flow area <= 0");
  if (!(g.area_window_m2 > 0.0)) infeasible_geometry("window flow area <= 0");
  if (!(g.area_bypass_m2 > 0.0)) infeasible_geometry("bypass area <= 0");

  const double leak = g.area_shell_baffle_m2 + g.area_tube_baffle_m2;
  g.leakage_split_ratio = leak > 0.0 ? g.area_shell_baffle_m2 / leak : 0.0;
  g.leakage_area_ratio = leak / g.area_crossflow_m2;
  g.bypass_area_ratio = g.area_bypass_m2 / g.area_crossflow_m2;
  g.sealing_strip_ratio = layout.sealing_strip_pairs / g.rows_crossflow;
  g.baffle_count = baffle_count(length, spacing);
  return g;
}

double baffle_cut_factor(double crossflow_fraction) { return 0.55 + 0.72 * crossflow_fraction; }

double leakage_factor(double r_s, double r_lm) {
  const double base = 0.44 * (1.0 - r_s);
  return base + (1.0 - base) * std::exp(-2.2 * r_lm);
}

double bypass_factor(double r_b, double sealing_ratio, double reynolds) {
  if (sealing_ratio >= 0.5) return 1.0;
  const double c = reynolds <= 100.0 ? 1.35 : 1.25;
  return std::exp(-c * r_b * (1.0 - std::cbrt(2.0 * sealing_ratio)));
}

ShellHeatTransfer shell_htc(const DesignVector& x, const CaseSpec& c, const LayoutConfig& layout,
                            const Geometry& g) {
  const auto& s = c.shell;
  ShellHeatTransfer out;
  out.reynolds = s.mass_flow_kg_s * x.tube_outer_diameter_m / (s.viscosity_pa_s * g.area_crossflow_m2);
  out.prandtl = s.heat_capacity_j_kg_k * s.viscosity_pa_s / s.thermal_conductivity_w_m_k;

  const auto lookup = layout.coefficients->lookup(layout.layout, out.reynolds);
  if (lookup.clamped) out.warnings = out.warnings | Warning::shell_reynolds_clamped;
  const auto& k = lookup.coefficients;
  const double a = k.a3 / (1.0 + 0.14 * std::pow(out.reynolds, k.a4));
  out.colburn_j = k.a1 * pitch_ratio_term(a) * std::pow(out.reynolds, k.a2);

  out.h_ideal = out.colburn_j * s.mass_flow_kg_s * s.heat_capacity_j_kg_k *
                std::pow(out.prandtl, -2.0 / 3.0) / g.area_crossflow_m2;

  out.j_baffle_cut = baffle_cut_factor(g.crossflow_tube_fraction);
  out.j_leakage = leakage_factor(g.leakage_split_ratio, g.leakage_area_ratio);
  out.j_bypass = bypass_factor(g.bypass_area_ratio, g.sealing_strip_ratio, out.reynolds);
  // Equal inlet/central/outlet spacing and no laminar gradient correction.
  out.j_spacing = 1.0;
  out.j_laminar = 1.0;

  double h = out.h_ideal * out.j_baffle_cut * out.j_spacing * out.j_laminar;
  if (layout.apply_leakage_factor) h *= out.j_leakage;
  if (layout.apply_bypass_factor) h *= out.j_bypass;
  out.h_shell = h;
  return out;
}

TubeHeatTransfer tube_htc(const DesignVector& x, const CaseSpec& c, const Geometry& g,
                          const LayoutConfig& layout) {
  const auto& t = c.tube;
  const double d_i = x.inner_diameter();
  if (!(d_i > 0.0)) infeasible_geometry("tube inner diameter <= 0");
  if (g.tube_count < 1) infeasible_geometry("fewer than one tube");

  TubeHeatTransfer out;
  const double flow_area_per_tube = kPi * d_i * d_i / 4.0;
  out.velocity = static_cast<double>(layout.n_passes) / g.tube_count * t.mass_flow_kg_s /
                 (flow_area_per_tube * t.density_kg_m3);
  out.reynolds = t.density_kg_m3 * out.velocity * d_i / t.viscosity_pa_s;
  out.prandtl = t.heat_capacity_j_kg_k * t.viscosity_pa_s / t.thermal_conductivity_w_m_k;
  out.h_tube = 0.023 * t.thermal_conductivity_w_m_k / d_i * std::cbrt(out.prandtl) *
               std::pow(out.reynolds, 0.8);
  if (out.reynolds < 2300.0) out.warnings = Warning::tube_laminar;
  return out;
}

double overall_u(double h_shell, double h_tube, double d_o, double d_i, double k_wall,
                 double fouling_shell, double fouling_tube) {
  const double ratio = d_o / d_i;
  const double wall = d_o * std::log(ratio) / (2.0 * k_wall);
  const double resistance =
      1.0 / h_shell + fouling_shell + wall + fouling_tube * ratio + ratio / h_tube;
  return 1.0 / resistance;
}

double overall_u(double h_shell, double h_tube, const CaseSpec& c, const DesignVector& x) {
  return overall_u(h_shell, h_tube, x.tube_outer_diameter_m, x.inner_diameter(),
                   c.wall_conductivity(), c.shell.fouling_resistance_m2k_w,
                   c.tube.fouling_resistance_m2k_w);
}

double zeta_bypass(double r_b, double sealing_ratio) {
  if (sealing_ratio >= 0.5) return 1.0;
  return std::exp(-2.7 * r_b * (1.0 - std::cbrt(2.0 * sealing_ratio)));
}

double zeta_leakage(double r_s, double r_lm) {
  const double p = -0.15 * (1.0 + r_s) + 0.8;
  return std::exp(-1.33 * (1.0 + r_s) * std::pow(r_lm, p));
}

double zeta_spacing(double central, double inlet, double outlet) {
  return std::pow(central / outlet, 1.8) + std::pow(central / inlet, 1.8);
}

ShellPressureDrop shell_dp(const DesignVector& x, const CaseSpec& c, const LayoutConfig& layout,
                           const Geometry& g, double shell_reynolds) {
  if (g.baffle_count < 1) infeasible_geometry("fewer than one baffle");
  const auto& s = c.shell;

  const auto k = layout.coefficients->lookup(layout.layout, shell_reynolds).coefficients;
  const double b = k.b3 / (1.0 + 0.14 * std::pow(shell_reynolds, k.b4));

  ShellPressureDrop out;
  out.friction_ideal = k.b1 * pitch_ratio_term(b) * std::pow(shell_reynolds, k.b2);

  const double mass_velocity = s.mass_flow_kg_s / g.area_crossflow_m2;
  out.dp_crossflow_ideal =
      4.0 * out.friction_ideal * mass_velocity * mass_velocity * g.rows_crossflow / (2.0 * s.density_kg_m3);
  out.dp_window_ideal = (2.0 + 0.6 * g.rows_window) * s.mass_flow_kg_s * s.mass_flow_kg_s /
                        (2.0 * s.density_kg_m3 * g.area_crossflow_m2 * g.area_window_m2);

  out.zeta_bypass = zeta_bypass(g.bypass_area_ratio, g.sealing_strip_ratio);
  out.zeta_leakage = zeta_leakage(g.leakage_split_ratio, g.leakage_area_ratio);
  out.zeta_spacing = zeta_spacing(x.baffle_spacing_m, x.baffle_spacing_m, x.baffle_spacing_m);

  const double nb = g.baffle_count;
  const double interior =
      ((nb - 1.0) * out.dp_crossflow_ideal * out.zeta_bypass + nb * out.dp_window_ideal) *
      out.zeta_leakage;
  const double ends = 2.0 * out.dp_crossflow_ideal * (1.0 + g.rows_window / g.rows_crossflow) *
                      out.zeta_bypass * out.zeta_spacing;
  out.dp_shell = interior + ends;
  return out;
}

double tube_friction(double reynolds) { return 0.046 * std::pow(reynolds, -0.2); }

TubePressureDrop tube_dp(const DesignVector& x, const CaseSpec& c, const Geometry& /*g*/,
                         const LayoutConfig& layout, double tube_reynolds, double velocity) {
  TubePressureDrop out;
  if (velocity == 0.0) return out;
  out.friction = tube_friction(tube_reynolds);
  const double d_i = x.inner_diameter();
  out.dp_tube = layout.n_passes * (4.0 * out.friction * x.tube_length_m / d_i + 2.5) *
                c.tube.density_kg_m3 * velocity * velocity / 2.0;
  return out;
}

double pumping_power(double dp_tube, double dp_shell, const CaseSpec& c) {
  return (dp_tube * c.tube.mass_flow_kg_s / c.tube.density_kg_m3 +
          dp_shell * c.shell.mass_flow_kg_s / c.shell.density_kg_m3) /
         c.pump_efficiency;
}

SizingResult size_exchanger(const DesignVector& x, const CaseSpec& c, const LayoutConfig& layout) {
  return size_exchanger(x, c, layout, layout.initial_u_guess);
}

SizingResult size_exchanger(const DesignVector& x, const CaseSpec& c, const LayoutConfig& layout,
                            double u_guess) {
  try {
    c.validate();
    layout.validate();
    if (!(u_guess > 0.0)) throw ModelError(ModelErrc::infeasible_configuration, "U guess must be positive");

    SizingResult r;
    const auto duty = heat_duty(c);
    r.duty_w = duty.duty_w;
    r.lmtd_k = lmtd(c.hot().inlet_temperature_c, c.hot().outlet_temperature_c,
                    c.cold().inlet_temperature_c, c.cold().outlet_temperature_c);
    r.capacity_ratio = capacity_ratio(c);
    r.effectiveness = thermal_effectiveness(c);
    r.f_factor = layout.f_correction_enabled ? f_correction(r.capacity_ratio, r.effectiveness) : 1.0;

    const double tube_area_per_count = kPi * x.tube_outer_diameter_m * x.tube_length_m;
    double u = u_guess;

    for (int it = 1; it <= layout.max_iterations; ++it) {
      const double area = required_area(r.duty_w, u, r.lmtd_k, r.f_factor);
      r.geometry = derive_geometry(x, layout, area);
      r.shell = shell_htc(x, c, layout, r.geometry);
      r.tube = tube_htc(x, c, r.geometry, layout);
      r.u_overall = overall_u(r.shell.h_shell, r.tube.h_tube, c, x);
      r.area_m2 = required_area(r.duty_w, r.u_overall, r.lmtd_k, r.f_factor);
      r.iterations = it;

      // The area only moves through the integer tube count, so a stable count
      // means an exact fixed point.
      const bool count_stable =
          static_cast<int>(std::ceil(r.area_m2 / tube_area_per_count)) == r.geometry.tube_count;
      if (std::abs(r.area_m2 - area) < layout.relative_tolerance * area && count_stable) {
        r.converged = true;
        break;
      }
      u = r.u_overall;
    }

    if (!r.converged) {
      ModelError err(ModelErrc::diverged,
                     "sizing did not converge in " + std::to_string(layout.max_iterations) +
                         " iterations");
      err.attach(r);
      throw err;
    }

    r.shell_dp = shell_dp(x, c, layout, r.geometry, r.shell.reynolds);
    r.tube_dp = tube_dp(x, c, r.geometry, layout, r.tube.reynolds, r.tube.velocity);
    r.pumping_power_w = pumping_power(r.tube_dp.dp_tube, r.shell_dp.dp_shell, c);
    r.warnings = r.shell.warnings | r.tube.warnings;
    return r;
  } catch (ModelError& e) {
    e.attach(x);
    throw;
  }
}

}  // namespace hxdram::thermo
