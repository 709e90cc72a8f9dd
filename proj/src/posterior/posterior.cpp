#include "hxdram/posterior/posterior.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace hxdram::posterior {

using thermo::DesignVector;

void TargetSpec::validate() const {
  if (!(target_area_m2 > 0.0) || !(target_power_w > 0.0))
    throw std::invalid_argument("target: area and power targets must be positive");
  if (!(sigma_area_m2 > 0.0) || !(sigma_power_w > 0.0))
    throw std::invalid_argument("target: sigmas must be positive");
}

TargetSpec TargetSpec::relative(double area_m2, double power_w, double rel_sigma) {
  return {area_m2, power_w, rel_sigma * area_m2, rel_sigma * power_w};
}

TargetSpec TargetSpec::from_pressure_drops(double area_m2, double dp_tube_pa, double dp_shell_pa,
                                           const thermo::CaseSpec& c, double rel_sigma) {
  return relative(area_m2, thermo::pumping_power(dp_tube_pa, dp_shell_pa, c), rel_sigma);
}

double log_prior(const DesignVector& x, const PriorBox& box) {
  return box.contains(x) ? 0.0 : dram::kNegInf;
}

double log_likelihood(const thermo::SizingResult& r, const TargetSpec& t) {
  const double za = (r.area_m2 - t.target_area_m2) / t.sigma_area_m2;
  const double zp = (r.pumping_power_w - t.target_power_w) / t.sigma_power_w;
  return -0.5 * (za * za + zp * zp);
}

PosteriorPoint log_posterior(const DesignVector& x, const thermo::CaseSpec& c,
                             const thermo::LayoutConfig& layout, const TargetSpec& t,
                             const PriorBox& box) {
  PosteriorPoint out;
  const double lp = log_prior(x, box);
  if (!(lp > dram::kNegInf)) return out;
  try {
    out.sizing = thermo::size_exchanger(x, c, layout);
  } catch (const thermo::ModelError& e) {
    if (e.code() == thermo::ModelErrc::infeasible_geometry || e.code() == thermo::ModelErrc::diverged) {
      out.infeasible = true;
      return out;
    }
    throw;
  }
  out.log_density = lp + log_likelihood(*out.sizing, t);
  return out;
}

InitialState initial_state(const PriorBox& box) {
  const double od_mid = 0.5 * (box.tube_od_min + box.tube_od_max);
  const auto b = box.resolve(od_mid);
  std::array<double, DesignVector::size> mid{};
  InitialState s;
  s.covariance = Eigen::MatrixXd::Zero(DesignVector::size, DesignVector::size);
  for (std::size_t i = 0; i < DesignVector::size; ++i) {
    if (!(b.upper[i] > b.lower[i]))
      throw std::invalid_argument("initial_state: empty range for " + std::string(thermo::kDesignVariableNames[i]));
    mid[i] = 0.5 * (b.lower[i] + b.upper[i]);
    const double sigma = (b.upper[i] - b.lower[i]) / 4.0;
    s.covariance(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = sigma * sigma;
  }
  s.start = DesignVector::from_array(mid);
  return s;
}

Eigen::VectorXd to_vector(const DesignVector& x) {
  const auto a = x.to_array();
  return Eigen::Map<const Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(a.size()));
}

DesignVector to_design(const Eigen::VectorXd& v) {
  if (v.size() != static_cast<Eigen::Index>(DesignVector::size))
    throw std::invalid_argument("to_design: expected 7 components");
  std::array<double, DesignVector::size> a{};
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = v[static_cast<Eigen::Index>(i)];
  return DesignVector::from_array(a);
}

DesignPosterior::DesignPosterior(thermo::CaseSpec c, thermo::LayoutConfig layout, TargetSpec t, PriorBox box)
    : case_(std::move(c)), layout_(std::move(layout)), target_(t), box_(box) {
  case_.validate();
  layout_.validate();
  target_.validate();
}

dram::Evaluation DesignPosterior::evaluate(const Eigen::VectorXd& v) const {
  ++evaluations_;
  const DesignVector x = to_design(v);
  dram::Evaluation ev;
  ev.derived.assign(kDerivedCount, std::numeric_limits<double>::quiet_NaN());
  if (!(log_prior(x, box_) > dram::kNegInf)) return ev;
  ++model_calls_;
  const PosteriorPoint p = log_posterior(x, case_, layout_, target_, box_);
  if (p.infeasible) ++infeasible_;
  if (p.sizing) {
    ev.derived = {p.sizing->area_m2, p.sizing->pumping_power_w, p.sizing->shell_dp.dp_shell,
                  p.sizing->tube_dp.dp_tube};
  }
  ev.log_density = p.log_density;
  return ev;
}

}  // namespace hxdram::posterior
