// Command-line driver: sample the design posterior or evaluate one design.
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hxdram/app/config.hpp"
#include "hxdram/app/pipeline.hpp"
#include "hxdram/thermo/errors.hpp"

namespace {

using namespace hxdram;

enum ExitCode : int {
  ok = 0,
  usage = 1,
  config_error = 2,
  invalid_case = 3,
  no_feasible_design = 4,
  model_error = 5,
};

int evaluate(const app::RunConfig& cfg, const std::string& design_text) {
  const auto x = app::parse_design(design_text);
  if (!cfg.limits.contains(x))
    std::cerr << "warning: design outside the sampling bounds: " << cfg.limits.violations(x) << "\n";
  const auto e = app::evaluate_design(cfg, x);
  auto j = app::evaluation_json(e);
  j["within_bounds"] = cfg.limits.contains(x);
  std::cout << j.dump(2) << "\n";
  return ok;
}

int run(app::RunConfig cfg) {
  const auto report = app::run_pipeline(cfg);
  app::write_artifacts(cfg, report);
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
  const auto& d = report.decision;
  std::printf("samples: %zu (burn-in %zu)%s\n", report.chains.front().samples.size(), report.summary.burn_in,
              report.extended ? ", extended once" : "");
  std::printf("converged: %s (max split R-hat %.4f)\n", report.stability.converged ? "true" : "false",
              report.stability.max_rhat);
  for (const auto& m : report.summary.marginals)
    std::printf("  %-4s mean %-12.6g var %-12.6g 90%% CI [%.6g, %.6g]\n", m.name.c_str(), m.mean, m.variance, m.q05,
                m.q95);
  std::printf("min-TAC design from %s: TAC %.2f $/yr, best sample TAC %.2f $/yr\n", d.source.c_str(),
              d.chosen.cost.total_annual, d.best_sample_tac);
  for (const auto& [name, tac] : d.reference_tac)
    std::printf("  reference %s: TAC %.2f $/yr, reduction %.2f%%\n", name.c_str(), tac, 100.0 * d.tac_reduction.at(name));
  std::printf("artifacts written to %s\n", cfg.output.directory.string().c_str());
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Shell-and-tube exchanger design by delayed-rejection adaptive Metropolis sampling"};
  cli.require_subcommand(0, 1);

  bool print_default = false;
  cli.add_flag("--print-default-config", print_default, "Print the built-in case configuration and exit");

  std::string run_config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::optional<int> chains;
  std::string out_dir;
  bool evaluate_only = false;
  std::string run_design;
  auto* run_cmd = cli.add_subcommand("run", "Sample the posterior, summarise and pick the lowest-TAC design");
  run_cmd->add_option("config", run_config, "Configuration file (JSON)")->required();
  run_cmd->add_option("--seed", seed, "Random seed");
  run_cmd->add_option("--samples", samples, "Chain length");
  run_cmd->add_option("--chains", chains, "Independent chains");
  run_cmd->add_option("--out-dir", out_dir, "Output directory");
  run_cmd->add_flag("--evaluate-only", evaluate_only, "Evaluate --design and skip sampling");
  run_cmd->add_option("--design", run_design, "Seven comma-separated design values (SI units)");

  std::string eval_config;
  std::string eval_design;
  auto* eval_cmd = cli.add_subcommand("evaluate", "Size and cost a single design");
  eval_cmd->add_option("--config", eval_config, "Configuration file (JSON); built-in case when omitted");
  eval_cmd->add_option("--design", eval_design, "Lbc,Bc,dtb,dsb,L,do,t in SI units")->required();

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? ok : usage;
  }

  try {
    if (print_default) {
      std::cout << app::config_to_json(app::RunConfig{}).dump(2) << "\n";
      return ok;
    }
    if (*eval_cmd) {
      const auto cfg = eval_config.empty() ? app::RunConfig{} : app::load_config(eval_config);
      return evaluate(cfg, eval_design);
    }
    if (*run_cmd) {
      auto cfg = app::load_config(run_config);
      if (seed) cfg.sampler.seed = *seed;
      if (samples) cfg.sampler.n_samples = *samples;
      if (chains) cfg.sampler.chains = *chains;
      if (!out_dir.empty()) cfg.output.directory = out_dir;
      if (evaluate_only) {
        if (run_design.empty()) throw app::ConfigError("--evaluate-only needs --design");
        return evaluate(cfg, run_design);
      }
      return run(std::move(cfg));
    }
    std::cerr << cli.help();
    return usage;
  } catch (const app::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return config_error;
  } catch (const thermo::ModelError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == thermo::ModelErrc::invalid_case || e.code() == thermo::ModelErrc::temperature_cross
               ? invalid_case
               : model_error;
  } catch (const decision::NoFeasibleDesign& e) {
    std::cerr << "error: " << e.what() << "\n";
    return no_feasible_design;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return model_error;
  }
}
