#include "hxdram/cost/cost_model.hpp"

#include <cmath>
#include <stdexcept>

namespace hxdram::cost {

void CostParams::validate() const {
  if (!(interest_rate > 0.0)) throw std::invalid_argument("cost: interest rate must be positive");
  if (lifespan_years < 1) throw std::invalid_argument("cost: lifespan must be at least one year");
  if (!(electricity_cost >= 0.0)) throw std::invalid_argument("cost: electricity cost must be >= 0");
  if (!(operating_hours >= 0.0)) throw std::invalid_argument("cost: operating hours must be >= 0");
  if (!(cost_index_ratio > 0.0)) throw std::invalid_argument("cost: cost index ratio must be positive");
  if (material_factor < 0.0) throw std::invalid_argument("cost: material factor must be >= 0");
}

double purchase_cost(double area_m2, const CostParams& p) {
  if (!(area_m2 > 0.0)) throw std::invalid_argument("purchase_cost: area must be positive");
  const double la = std::log10(area_m2);
  return std::pow(10.0, p.k1 + p.k2 * la + p.k3 * la * la) * p.cost_index_ratio;
}

BareModule bare_module_cost(double purchase, double pressure_barg, double material_factor,
                            const CostParams& p) {
  if (!(purchase > 0.0)) throw std::invalid_argument("bare_module_cost: purchase cost must be positive");
  BareModule out;
  double log_fp = p.c1;
  if (p.c2 != 0.0 || p.c3 != 0.0) {
    if (!(pressure_barg > 0.0))
      throw std::invalid_argument("bare_module_cost: pressure correlation needs P > 0 barg");
    const double lp = std::log10(pressure_barg);
    log_fp += p.c2 * lp + p.c3 * lp * lp;
  }
  out.pressure_factor = std::pow(10.0, log_fp);
  out.cost = purchase * (p.b1 + p.b2 * material_factor * out.pressure_factor);
  return out;
}

double operating_cost(double pumping_power_w, const CostParams& p) {
  if (!(pumping_power_w >= 0.0))
    throw std::invalid_argument("operating_cost: pumping power must be >= 0");
  return p.operating_hours * (pumping_power_w / 1000.0) * p.electricity_cost;
}

double annuity_factor(double interest_rate, int years) {
  const double growth = std::pow(1.0 + interest_rate, years);
  return interest_rate * growth / (growth - 1.0);
}

CostBreakdown total_annual_cost(double purchase, const BareModule& bm, double operating,
                                const CostParams& p) {
  if (bm.cost < 0.0 || operating < 0.0)
    throw std::invalid_argument("total_annual_cost: costs must be >= 0");
  CostBreakdown out;
  out.purchase = purchase;
  out.pressure_factor = bm.pressure_factor;
  out.bare_module = bm.cost;
  out.operating = operating;
  out.annuity_factor = annuity_factor(p.interest_rate, p.lifespan_years);
  out.total_annual = out.bare_module * out.annuity_factor + out.operating;
  return out;
}

double material_factor(thermo::Material shell, thermo::Material tube) {
  using thermo::Material;
  if (shell != Material::carbon_steel)
    throw std::invalid_argument("material_factor: only carbon-steel shells are tabulated");
  switch (tube) {
    case Material::carbon_steel: return 1.0;
    case Material::copper: return 1.25;
    case Material::stainless_steel: return 1.7;
  }
  return 1.0;
}

double pa_to_barg(double pressure_pa) { return pressure_pa / 1e5 - 1.01325; }

CostBreakdown evaluate_cost(double area_m2, double pumping_power_w, const thermo::CaseSpec& c,
                            const CostParams& p) {
  const double fm =
      p.material_factor > 0.0 ? p.material_factor : material_factor(c.shell.material, c.tube.material);
  const double cp = purchase_cost(area_m2, p);
  const auto bm = bare_module_cost(cp, pa_to_barg(c.shell.design_pressure_pa), fm, p);
  return total_annual_cost(cp, bm, operating_cost(pumping_power_w, p), p);
}

}  // namespace hxdram::cost
