#pragma once

#include "hxdram/thermo/types.hpp"

// Capital and operating cost of a sized exchanger, annualised.
namespace hxdram::cost {

struct CostParams {
  // log10 C_p = k1 + k2 log10 A + k3 (log10 A)^2
  double k1 = 3.2138;
  double k2 = 0.2688;
  double k3 = 0.07961;
  // log10 F_P = c1 + c2 log10 P + c3 (log10 P)^2, P in bar gauge
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double b1 = 1.8;
  double b2 = 1.5;
  // Material factor. Unset means derive it from the stream materials.
  double material_factor = 0.0;
  double cost_index_ratio = 1.0;     // I2 / I1
  double electricity_cost = 0.1;     // $ per kWh
  double interest_rate = 0.05;       // per year
  int lifespan_years = 20;
  double operating_hours = 8232.0;   // per year

  void validate() const;
};

struct CostBreakdown {
  double purchase = 0.0;        // C_p
  double pressure_factor = 1.0; // F_P
  double bare_module = 0.0;     // C_BM
  double operating = 0.0;       // OC, $/yr
  double annuity_factor = 0.0;
  double total_annual = 0.0;    // TAC, $/yr
};

struct BareModule {
  double cost = 0.0;
  double pressure_factor = 1.0;
};

double purchase_cost(double area_m2, const CostParams& p);

// `pressure_barg` is only used when c2 or c3 is non-zero.
BareModule bare_module_cost(double purchase, double pressure_barg, double material_factor,
                            const CostParams& p);

double operating_cost(double pumping_power_w, const CostParams& p);

double annuity_factor(double interest_rate, int years);

CostBreakdown total_annual_cost(double purchase, const BareModule& bm, double operating,
                                const CostParams& p);

// Material factor for a shell/tube material pair: CS/CS 1.0, CS/Cu 1.25, CS/SS 1.7.
double material_factor(thermo::Material shell, thermo::Material tube);

// Absolute Pa to bar gauge.
double pa_to_barg(double pressure_pa);

// Full cost stack for a sized design: F_M from `p` or else from the case
// materials, pressure from the shell-side design pressure.
CostBreakdown evaluate_cost(double area_m2, double pumping_power_w, const thermo::CaseSpec& c,
                            const CostParams& p);

}  // namespace hxdram::cost
