#pragma once

#include "hxdram/thermo/coefficients.hpp"
#include "hxdram/thermo/errors.hpp"
#include "hxdram/thermo/types.hpp"

// Shell-and-tube thermal-hydraulic rating: Kern-style overall balance with
// Bell-Delaware shell-side corrections. Every function here is pure.
namespace hxdram::thermo {

struct HeatDuty {
  double duty_w = 0.0;            // hot-side duty
  double balance_residual = 0.0;  // |Q_hot - Q_cold| / Q_hot
};

HeatDuty heat_duty(const CaseSpec& c);

// Counter-current log-mean temperature difference in K.
double lmtd(double t_hot_in, double t_hot_out, double t_cold_in, double t_cold_out);

// R = (T_hi - T_ho) / (T_co - T_ci), S = (T_co - T_ci) / (T_hi - T_ci).
double capacity_ratio(const CaseSpec& c);
double thermal_effectiveness(const CaseSpec& c);

// A_o = Q / (U_o F dT_lm).
double required_area(double duty_w, double u_overall, double lmtd_k, double f_factor);

// LMTD correction for one shell pass and an even number of tube passes.
double f_correction(double r, double s);

// --- geometry -------------------------------------------------------------

double bundle_diameter(double tube_od, int tube_count, BundleConstants k);
// Angle subtended by the baffle cut on the centre-line-limit circle.
double baffle_cut_angle(double shell_d, double cut_depth, double ctl_d);
// F_c = 1 - theta/pi + sin(theta)/pi.
double crossflow_tube_fraction(double theta_ctl);
int baffle_count(double tube_length, double baffle_spacing);

Geometry derive_geometry(const DesignVector& x, const LayoutConfig& layout, double area_m2);

// --- shell side heat transfer -----------------------------------------------

double baffle_cut_factor(double crossflow_fraction);
double leakage_factor(double r_s, double r_lm);
double bypass_factor(double r_b, double sealing_ratio, double reynolds);

ShellHeatTransfer shell_htc(const DesignVector& x, const CaseSpec& c, const LayoutConfig& layout,
                            const Geometry& g);

// --- tube side heat transfer ------------------------------------------------

TubeHeatTransfer tube_htc(const DesignVector& x, const CaseSpec& c, const Geometry& g,
                          const LayoutConfig& layout);

// Overall coefficient referred to the tube outer surface.
double overall_u(double h_shell, double h_tube, double d_o, double d_i, double k_wall,
                 double fouling_shell, double fouling_tube);
double overall_u(double h_shell, double h_tube, const CaseSpec& c, const DesignVector& x);

// --- pressure drops ---------------------------------------------------------

double zeta_bypass(double r_b, double sealing_ratio);
double zeta_leakage(double r_s, double r_lm);
double zeta_spacing(double central, double inlet, double outlet);

ShellPressureDrop shell_dp(const DesignVector& x, const CaseSpec& c, const LayoutConfig& layout,
                           const Geometry& g, double shell_reynolds);

double tube_friction(double reynolds);
TubePressureDrop tube_dp(const DesignVector& x, const CaseSpec& c, const Geometry& g,
                         const LayoutConfig& layout, double tube_reynolds, double velocity);

double pumping_power(double dp_tube, double dp_shell, const CaseSpec& c);

// Fixed-point sizing: U guess -> required area -> geometry -> coefficients -> U,
// until the area settles. Throws ModelError; `diverged` carries the last iterate.
SizingResult size_exchanger(const DesignVector& x, const CaseSpec& c, const LayoutConfig& layout);
SizingResult size_exchanger(const DesignVector& x, const CaseSpec& c, const LayoutConfig& layout,
                            double u_guess);

}  // namespace hxdram::thermo
