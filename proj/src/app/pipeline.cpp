#include "hxdram/app/pipeline.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "hxdram/posterior/posterior.hpp"

namespace hxdram::app {

using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Eigen::MatrixXd sample_matrix(const std::vector<dram::SampleRecord>& samples) {
  const auto d = static_cast<Eigen::Index>(thermo::DesignVector::size);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(samples.size()), d + 2);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    m.row(r).head(d) = samples[i].x.transpose();
    m(r, d) = samples[i].derived.at(0);
    m(r, d + 1) = samples[i].derived.at(1);
  }
  return m;
}

std::size_t burn_in_of(const RunConfig& cfg) {
  return cfg.sampler.burn_in.value_or(cfg.sampler.adaptation_start.value_or(0));
}

decision::StabilityResult check(const Eigen::MatrixXd& m, std::size_t burn_in) {
  const std::size_t kept = static_cast<std::size_t>(m.rows()) - burn_in;
  return decision::stability_check(m, kept / 2);
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
  if (!out) throw ConfigError("failed writing " + path.string());
}

}  // namespace

dram::DramConfig make_dram_config(const RunConfig& cfg, const Eigen::MatrixXd& initial_covariance) {
  dram::DramConfig d;
  d.initial_covariance = initial_covariance;
  d.adaptation_start = cfg.sampler.adaptation_start;
  d.scale = cfg.sampler.scale;
  d.epsilon = cfg.sampler.epsilon;
  d.n_stages = cfg.sampler.n_stages;
  d.stage_scale = cfg.sampler.stage_scale;
  d.seed = cfg.sampler.seed;
  d.n_samples = cfg.sampler.n_samples;
  d.checkpoint_every = cfg.output.checkpoints ? cfg.sampler.checkpoint_every : 0;
  return d;
}

RunReport run_pipeline(const RunConfig& cfg) {
  cfg.validate();
  RunReport rep;
  rep.target = cfg.target.resolve(cfg.case_spec);
  const posterior::DesignPosterior target(cfg.case_spec, cfg.layout, rep.target, cfg.limits);

  const auto init = posterior::initial_state(cfg.limits);
  const auto start = posterior::to_vector(cfg.sampler.initial_point.value_or(init.start));
  const dram::DramConfig dcfg = make_dram_config(cfg, init.covariance);

  if (cfg.sampler.chains == 1) {
    rep.chains.push_back(dram::run_chain(target, dcfg, start));
  } else {
    std::vector<std::uint64_t> seeds;
    for (int i = 0; i < cfg.sampler.chains; ++i) seeds.push_back(cfg.sampler.seed + static_cast<std::uint64_t>(i));
    rep.chains = dram::run_chains(target, dcfg, start, seeds);
  }

  const std::size_t burn_in = burn_in_of(cfg);
  rep.samples = sample_matrix(rep.chains.front().samples);
  rep.stability = check(rep.samples, burn_in);
  if (!rep.stability.converged && cfg.sampler.extension_fraction > 0.0) {
    const auto extra = static_cast<std::size_t>(
        std::ceil(cfg.sampler.extension_fraction * static_cast<double>(cfg.sampler.n_samples)));
    for (auto& chain : rep.chains) dram::extend_chain(chain, target, dcfg, extra);
    rep.extended = true;
    rep.samples = sample_matrix(rep.chains.front().samples);
    rep.stability = check(rep.samples, burn_in);
  }
  if (!rep.stability.converged)
    rep.warnings.push_back("chain did not reach a stable distribution (max split R-hat " +
                           fmt(rep.stability.max_rhat) + ")");

  if (rep.chains.size() > 1) {
    std::vector<Eigen::MatrixXd> tails;
    for (const auto& chain : rep.chains) {
      const Eigen::MatrixXd m = sample_matrix(chain.samples);
      tails.push_back(m.bottomRows(m.rows() - static_cast<Eigen::Index>(burn_in)));
    }
    rep.cross_chain_rhat = decision::gelman_rubin(tails);
  }

  rep.columns.assign(thermo::kDesignVariableNames.begin(), thermo::kDesignVariableNames.end());
  rep.columns.push_back("Ao");
  rep.columns.push_back("Pst");
  rep.summary = decision::summarize(rep.samples, rep.columns, burn_in);
  rep.summary.rhat = rep.stability.rhat;
  rep.summary.converged = rep.stability.converged;
  const auto calls = target.model_calls();
  rep.summary.infeasible_fraction =
      calls == 0 ? 0.0 : static_cast<double>(target.infeasible()) / static_cast<double>(calls);
  const auto& fs = rep.chains.front().final_state;
  std::size_t accepted = 0;
  for (std::size_t s = 0; s < fs.attempted.size(); ++s) {
    rep.summary.stage_acceptance.push_back(
        fs.attempted[s] == 0 ? 0.0 : static_cast<double>(fs.accepted[s]) / static_cast<double>(fs.attempted[s]));
    accepted += fs.accepted[s];
  }
  rep.summary.overall_acceptance = fs.step == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(fs.step);

  const auto n_kept = static_cast<Eigen::Index>(rep.summary.samples);
  const Eigen::MatrixXd kept = rep.samples.bottomRows(n_kept);
  const Eigen::Index area_col = static_cast<Eigen::Index>(thermo::DesignVector::size);
  for (Eigen::Index v = 0; v < area_col; ++v) {
    Eigen::MatrixX2d xy(n_kept, 2);
    xy.col(0) = kept.col(v);
    xy.col(1) = kept.col(area_col);
    for (double mass : {0.5, 0.9}) {
      try {
        auto e = decision::confidence_ellipse(xy, mass);
        e.x_name = rep.columns[static_cast<std::size_t>(v)];
        e.y_name = "Ao";
        rep.ellipses.push_back(e);
      } catch (const decision::DegenerateEllipse&) {
        rep.warnings.push_back("degenerate ellipse for " + rep.columns[static_cast<std::size_t>(v)]);
        break;
      }
    }
  }

  std::vector<thermo::DesignVector> designs;
  const auto& all = rep.chains.front().samples;
  designs.reserve(all.size() - burn_in);
  for (std::size_t i = burn_in; i < all.size(); ++i) designs.push_back(posterior::to_design(all[i].x));
  rep.decision = decision::select_min_tac(designs, cfg.references, cfg.case_spec, cfg.layout, cfg.cost);
  rep.decision.chain_index += burn_in;
  rep.decision.sample_index += burn_in;
  return rep;
}

void write_chain_csv(std::ostream& os, const std::vector<dram::SampleRecord>& samples) {
  os << "step";
  for (auto name : thermo::kDesignVariableNames) os << ',' << name;
  os << ",Ao,Pst,logpi,stage\n";
  for (const auto& s : samples) {
    os << s.step;
    for (Eigen::Index i = 0; i < s.x.size(); ++i) os << ',' << fmt(s.x[i]);
    os << ',' << fmt(s.derived.at(0)) << ',' << fmt(s.derived.at(1)) << ',' << fmt(s.log_pi) << ',' << s.stage
       << '\n';
  }
}

json summary_json(const RunConfig& cfg, const RunReport& rep) {
  json j = decision::to_json(rep.summary);
  j["extended"] = rep.extended;
  j["chain_length"] = rep.chains.front().samples.size();
  j["chains"] = rep.chains.size();
  j["seed"] = cfg.sampler.seed;
  j["max_rhat"] = rep.stability.max_rhat;
  j["rhat_threshold"] = decision::kRhatThreshold;
  j["cross_chain_rhat"] = rep.cross_chain_rhat ? json(*rep.cross_chain_rhat) : json(nullptr);
  j["columns"] = rep.columns;
  j["target"] = {{"area_m2", rep.target.target_area_m2},
                 {"power_w", rep.target.target_power_w},
                 {"sigma_area_m2", rep.target.sigma_area_m2},
                 {"sigma_power_w", rep.target.sigma_power_w}};
  j["covariance_repairs"] = rep.chains.front().final_state.covariance_repairs;
  j["warnings"] = rep.warnings;
  return j;
}

void write_artifacts(const RunConfig& cfg, const RunReport& rep) {
  const auto& dir = cfg.output.directory;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());

  if (cfg.output.chain_csv) {
    std::ofstream out(dir / "chain.csv", std::ios::binary);
    if (!out) throw ConfigError("cannot write " + (dir / "chain.csv").string());
    write_chain_csv(out, rep.chains.front().samples);
    for (std::size_t c = 1; c < rep.chains.size(); ++c) {
      std::ofstream extra(dir / ("chain_" + std::to_string(c) + ".csv"), std::ios::binary);
      write_chain_csv(extra, rep.chains[c].samples);
    }
  }
  if (cfg.output.summary_json) write_file(dir / "summary.json", summary_json(cfg, rep).dump(2) + "\n");
  if (cfg.output.ellipse_csv) {
    std::ofstream out(dir / "ellipses.csv", std::ios::binary);
    if (!out) throw ConfigError("cannot write " + (dir / "ellipses.csv").string());
    decision::write_ellipses_csv(out, rep.ellipses);
  }
  if (cfg.output.decision_json) write_file(dir / "decision.json", decision::to_json(rep.decision).dump(2) + "\n");
  if (cfg.output.checkpoints) {
    std::string lines;
    for (const auto& cp : rep.chains.front().checkpoints) {
      json rows = json::array();
      for (Eigen::Index r = 0; r < cp.covariance.rows(); ++r) {
        std::vector<double> row(static_cast<std::size_t>(cp.covariance.cols()));
        for (Eigen::Index c = 0; c < cp.covariance.cols(); ++c) row[static_cast<std::size_t>(c)] = cp.covariance(r, c);
        rows.push_back(row);
      }
      lines += json{{"step", cp.step}, {"covariance", rows}}.dump() + "\n";
    }
    write_file(dir / "covariance_checkpoints.jsonl", lines);
  }
}

decision::EvaluatedDesign evaluate_design(const RunConfig& cfg, const thermo::DesignVector& x) {
  cfg.case_spec.validate();
  cfg.layout.validate();
  return decision::evaluate_design(x, cfg.case_spec, cfg.layout, cfg.cost);
}

json evaluation_json(const decision::EvaluatedDesign& e) {
  return json{{"design", decision::to_json(e.x)},
              {"sizing", decision::to_json(e.sizing)},
              {"cost", decision::to_json(e.cost)}};
}

}  // namespace hxdram::app
