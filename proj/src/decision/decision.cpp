#include "hxdram/decision/decision.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>

namespace hxdram::decision {

using Eigen::MatrixXd;
using nlohmann::json;

double quantile(std::span<const double> values, double p) {
  if (values.empty()) throw InsufficientData("quantile: no values");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile: p outside [0, 1]");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double h = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

PosteriorSummary summarize(const MatrixXd& samples, std::span<const std::string> names, std::size_t burn_in) {
  if (names.size() != static_cast<std::size_t>(samples.cols()))
    throw std::invalid_argument("summarize: one name per column required");
  const auto rows = static_cast<std::size_t>(samples.rows());
  if (rows < burn_in + 100) throw InsufficientData("summarize: fewer than 100 samples after burn-in");
  PosteriorSummary s;
  s.burn_in = burn_in;
  s.samples = rows - burn_in;
  const auto n = static_cast<Eigen::Index>(s.samples);
  const MatrixXd kept = samples.bottomRows(n);
  for (Eigen::Index c = 0; c < kept.cols(); ++c) {
    MarginalSummary m;
    m.name = names[static_cast<std::size_t>(c)];
    const Eigen::VectorXd col = kept.col(c);
    m.mean = col.mean();
    m.variance = (col.array() - m.mean).square().sum() / static_cast<double>(n - 1);
    std::span<const double> values(col.data(), static_cast<std::size_t>(n));
    m.q05 = quantile(values, 0.05);
    m.q95 = quantile(values, 0.95);
    s.marginals.push_back(std::move(m));
  }
  return s;
}

std::vector<double> gelman_rubin(std::span<const MatrixXd> chains) {
  if (chains.size() < 2) throw InsufficientData("gelman_rubin: need at least two chains");
  const Eigen::Index n = chains.front().rows();
  const Eigen::Index d = chains.front().cols();
  if (n < 2) throw InsufficientData("gelman_rubin: chains need at least two draws");
  for (const auto& c : chains)
    if (c.rows() != n || c.cols() != d) throw std::invalid_argument("gelman_rubin: chain shapes differ");
  const auto m = static_cast<double>(chains.size());
  const auto nd = static_cast<double>(n);
  std::vector<double> out(static_cast<std::size_t>(d));
  for (Eigen::Index j = 0; j < d; ++j) {
    std::vector<double> means;
    double w = 0.0;
    for (const auto& c : chains) {
      const double mu = c.col(j).mean();
      means.push_back(mu);
      w += (c.col(j).array() - mu).square().sum() / (nd - 1.0);
    }
    w /= m;
    const double grand = std::accumulate(means.begin(), means.end(), 0.0) / m;
    double b = 0.0;
    for (double mu : means) b += (mu - grand) * (mu - grand);
    b *= nd / (m - 1.0);
    const double var_plus = (nd - 1.0) / nd * w + b / nd;
    double r;
    if (w > 0.0)
      r = std::sqrt(var_plus / w);
    else
      r = b > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
    out[static_cast<std::size_t>(j)] = r;
  }
  return out;
}

StabilityResult stability_check(const MatrixXd& chain, std::size_t window) {
  if (window < 2) throw std::invalid_argument("stability_check: window must be at least 2");
  if (static_cast<std::size_t>(chain.rows()) < 2 * window)
    throw InsufficientData("stability_check: chain shorter than two windows");
  const auto w = static_cast<Eigen::Index>(window);
  const MatrixXd tail = chain.bottomRows(2 * w);
  const MatrixXd halves[] = {tail.topRows(w), tail.bottomRows(w)};
  StabilityResult r;
  r.rhat = gelman_rubin(halves);
  r.max_rhat = *std::max_element(r.rhat.begin(), r.rhat.end());
  r.converged = r.max_rhat < kRhatThreshold;
  return r;
}

double chi2_2_quantile(double mass) {
  if (!(mass > 0.0 && mass < 1.0)) throw std::invalid_argument("ellipse mass must lie in (0, 1)");
  return -2.0 * std::log1p(-mass);
}

bool Ellipse::contains(const Eigen::Vector2d& p) const {
  const Eigen::Vector2d d = p - center;
  return d.dot(covariance.ldlt().solve(d)) <= radius * radius;
}

Ellipse confidence_ellipse(const Eigen::MatrixX2d& xy, double mass) {
  const double r2 = chi2_2_quantile(mass);
  if (xy.rows() < 3) throw InsufficientData("confidence_ellipse: need at least 3 samples");
  Ellipse e;
  e.mass = mass;
  e.center = xy.colwise().mean().transpose();
  const Eigen::MatrixX2d centered = xy.rowwise() - e.center.transpose();
  e.covariance = centered.transpose() * centered / static_cast<double>(xy.rows() - 1);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(e.covariance);
  const Eigen::Vector2d ev = es.eigenvalues();  // ascending
  if (!(ev[0] > 1e-12 * ev[1]) || !(ev[1] > 0.0))
    throw DegenerateEllipse("confidence_ellipse: sample covariance is singular");
  e.radius = std::sqrt(r2);
  e.axis1 = e.radius * std::sqrt(ev[1]);
  e.axis2 = e.radius * std::sqrt(ev[0]);
  const Eigen::Vector2d major = es.eigenvectors().col(1);
  e.angle = std::atan2(major[1], major[0]);
  return e;
}

EvaluatedDesign evaluate_design(const thermo::DesignVector& x, const thermo::CaseSpec& c,
                                const thermo::LayoutConfig& layout, const cost::CostParams& p) {
  EvaluatedDesign out;
  out.x = x;
  out.sizing = thermo::size_exchanger(x, c, layout);
  out.cost = cost::evaluate_cost(out.sizing.area_m2, out.sizing.pumping_power_w, c, p);
  return out;
}

namespace {

bool is_skippable(const thermo::ModelError& e) {
  return e.code() == thermo::ModelErrc::infeasible_geometry || e.code() == thermo::ModelErrc::diverged;
}

}  // namespace

DecisionResult select_min_tac(std::span<const thermo::DesignVector> samples,
                              std::span<const NamedDesign> references, const thermo::CaseSpec& c,
                              const thermo::LayoutConfig& layout, const cost::CostParams& p) {
  DecisionResult out;
  bool have_sample = false;
  std::optional<EvaluatedDesign> last;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    ++out.candidates;
    // Rejected moves repeat the previous point; reuse its evaluation.
    if (!(last && last->x == samples[i])) {
      try {
        last = evaluate_design(samples[i], c, layout, p);
      } catch (const thermo::ModelError& e) {
        if (!is_skippable(e)) throw;
        last.reset();
        ++out.infeasible;
        continue;
      }
    }
    if (!have_sample || last->cost.total_annual < out.chosen.cost.total_annual) {
      out.chosen = *last;
      out.source = "chain";
      out.chain_index = i;
      out.sample_index = i;
      have_sample = true;
    }
  }
  if (!have_sample) throw NoFeasibleDesign("no feasible design among the chain samples");
  out.best_sample_tac = out.chosen.cost.total_annual;

  for (const auto& ref : references) {
    ++out.candidates;
    EvaluatedDesign ev;
    try {
      ev = evaluate_design(ref.x, c, layout, p);
    } catch (const thermo::ModelError& e) {
      if (!is_skippable(e)) throw;
      ++out.infeasible;
      continue;
    }
    out.reference_tac[ref.name] = ev.cost.total_annual;
    if (ev.cost.total_annual < out.chosen.cost.total_annual) {
      out.chosen = ev;
      out.source = ref.name;
    }
  }
  for (const auto& [name, tac] : out.reference_tac)
    out.tac_reduction[name] = (tac - out.chosen.cost.total_annual) / tac;
  return out;
}

json to_json(const thermo::DesignVector& x) {
  json j = json::object();
  const auto a = x.to_array();
  for (std::size_t i = 0; i < a.size(); ++i) j[std::string(thermo::kDesignVariableNames[i])] = a[i];
  return j;
}

json to_json(const thermo::SizingResult& r) {
  return json{
      {"duty_w", r.duty_w},
      {"lmtd_k", r.lmtd_k},
      {"f_factor", r.f_factor},
      {"u_overall", r.u_overall},
      {"area_m2", r.area_m2},
      {"h_shell", r.shell.h_shell},
      {"h_tube", r.tube.h_tube},
      {"shell_reynolds", r.shell.reynolds},
      {"tube_reynolds", r.tube.reynolds},
      {"tube_velocity", r.tube.velocity},
      {"dp_shell_pa", r.shell_dp.dp_shell},
      {"dp_tube_pa", r.tube_dp.dp_tube},
      {"pumping_power_w", r.pumping_power_w},
      {"tube_count", r.geometry.tube_count},
      {"shell_diameter_m", r.geometry.shell_diameter_m},
      {"baffle_count", r.geometry.baffle_count},
      {"iterations", r.iterations},
      {"converged", r.converged},
      {"warnings", static_cast<std::uint32_t>(r.warnings)},
  };
}

json to_json(const cost::CostBreakdown& c) {
  return json{{"purchase", c.purchase},       {"pressure_factor", c.pressure_factor},
              {"bare_module", c.bare_module}, {"operating", c.operating},
              {"annuity_factor", c.annuity_factor}, {"total_annual", c.total_annual}};
}

json to_json(const PosteriorSummary& s) {
  json marginals = json::object();
  for (const auto& m : s.marginals)
    marginals[m.name] = {{"mean", m.mean}, {"variance", m.variance}, {"q05", m.q05}, {"q95", m.q95}};
  return json{{"samples", s.samples},
              {"burn_in", s.burn_in},
              {"marginals", marginals},
              {"infeasible_fraction", s.infeasible_fraction},
              {"stage_acceptance", s.stage_acceptance},
              {"overall_acceptance", s.overall_acceptance},
              {"rhat", s.rhat},
              {"converged", s.converged}};
}

json to_json(const DecisionResult& d) {
  return json{{"design", to_json(d.chosen.x)},
              {"sizing", to_json(d.chosen.sizing)},
              {"cost", to_json(d.chosen.cost)},
              {"source", d.source},
              {"chain_index", d.chain_index},
              {"best_sample_tac", d.best_sample_tac},
              {"reference_tac", d.reference_tac},
              {"tac_reduction", d.tac_reduction},
              {"candidates", d.candidates},
              {"infeasible", d.infeasible}};
}

void write_ellipses_csv(std::ostream& os, std::span<const Ellipse> ellipses) {
  const auto old = os.precision(12);
  os << "variable,mass,center_x,center_y,axis1,axis2,angle\n";
  for (const auto& e : ellipses)
    os << e.x_name << ',' << e.mass << ',' << e.center[0] << ',' << e.center[1] << ',' << e.axis1 << ','
       << e.axis2 << ',' << e.angle << '\n';
  os.precision(old);
}

}  // namespace hxdram::decision
