// fairgeo: design fair representations under a point-wise chi^2 parity budget and
// compare them with exhaustive search.
//
// Exit codes: 0 success, 1 verification mismatch, 2 parse / usage error,
// 3 validation error, 4 infeasible epsilon, 5 numerical error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "fairgeo/designer.hpp"
#include "fairgeo/error.hpp"
#include "fairgeo/experiment.hpp"
#include "fairgeo/instance_io.hpp"
#include "fairgeo/oracle.hpp"
#include "fairgeo/verify.hpp"

namespace {

using namespace fairgeo;

struct CommonOptions {
  std::string instance_path;
  std::string output;
  std::string log_base = "nats";
  std::optional<std::size_t> grid_resolution;
  std::optional<std::size_t> y_cardinality;
  std::optional<std::string> measure;
  unsigned threads = 0;
  std::string plot_data;
};

LogBase parse_log_base(const std::string& s) { return s == "bits" ? LogBase::Bits : LogBase::Nats; }

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot open '" + path + "' for writing");
  out << text;
}

OracleConfig oracle_config(const InstanceFile& file, const CommonOptions& opts) {
  OracleConfig cfg;
  if (file.grid_resolution) cfg.grid_resolution = *file.grid_resolution;
  if (file.y_cardinality) cfg.y_cardinality = *file.y_cardinality;
  if (file.measure) cfg.measure = *file.measure;
  if (opts.grid_resolution) cfg.grid_resolution = *opts.grid_resolution;
  if (opts.y_cardinality) cfg.y_cardinality = *opts.y_cardinality;
  if (opts.measure) cfg.measure = parse_measure(*opts.measure);
  cfg.threads = opts.threads;
  validate(cfg);
  return cfg;
}

int cmd_design(const CommonOptions& opts) {
  const InstanceFile file = load_instance(opts.instance_path);
  const ProblemInstance inst = file.to_instance();
  const LogBase base = parse_log_base(opts.log_base);
  const DesignPlan plan = plan_design(inst);
  try {
    const DesignSolution sol = reconstruct(inst, plan);
    std::cout << design_report(inst, plan, &sol, base);
    if (!opts.output.empty()) write_text(opts.output, design_json(inst, plan, &sol));
    return 0;
  } catch (const InfeasibleEpsilonError&) {
    std::cout << design_report(inst, plan, nullptr, base);
    if (!opts.output.empty()) write_text(opts.output, design_json(inst, plan, nullptr));
    throw;
  }
}

int cmd_sweep(const CommonOptions& opts) {
  const InstanceFile file = load_instance(opts.instance_path);
  const ProblemInstance inst = file.to_instance();
  SweepOptions sweep;
  sweep.oracle = oracle_config(file, opts);
  const std::vector<double> eps_grid = file.eps_grid.empty() ? std::vector<double>{file.eps} : file.eps_grid;
  const auto rows = run_sweep(inst, eps_grid, file.rate_grid, sweep);
  write_text(opts.output, sweep_csv(rows));
  if (!opts.plot_data.empty()) write_text(opts.plot_data, sweep_plot_data(rows));
  for (const auto& r : rows)
    if (!r.note.empty())
      std::cerr << "eps=" << format_number(r.eps) << " rate=" << format_number(r.rate) << ": " << r.note << "\n";
  return 0;
}

int cmd_oracle(const CommonOptions& opts) {
  const InstanceFile file = load_instance(opts.instance_path);
  const ProblemInstance inst = file.to_instance();
  const OracleConfig cfg = oracle_config(file, opts);
  const OracleResult result = grid_search(inst, cfg);
  write_text(opts.output, oracle_report(inst, cfg, result, parse_log_base(opts.log_base)));
  return 0;
}

int cmd_verify(const CommonOptions& opts) {
  const InstanceFile file = load_instance(opts.instance_path);
  const ProblemInstance inst = file.to_instance();
  const auto checks = verify_reference_constants(inst);
  std::string text;
  for (const auto& c : checks) {
    const char* tag = !c.passed ? "FAIL" : c.expected_deviation ? "PASS (expected deviation)" : "PASS";
    text += std::string("[") + tag + "] " + c.name + ": " + c.detail + "\n";
  }
  const bool ok = all_passed(checks);
  text += ok ? "all reference checks passed\n" : "reference checks FAILED\n";
  write_text(opts.output, text);
  if (!ok)
    for (const auto& c : checks)
      if (!c.passed) std::cerr << "mismatch: " << c.name << "\n";
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fair representation design under a point-wise chi-squared parity constraint"};
  app.require_subcommand(1);
  CommonOptions opts;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("instance", opts.instance_path, "Instance file (JSON)")->required();
    sub->add_option("--output,-o", opts.output, "Output path (default: stdout)");
    sub->add_option("--log-base", opts.log_base, "Units for reported information")
        ->check(CLI::IsMember({"nats", "bits"}));
  };
  auto add_oracle = [&](CLI::App* sub) {
    sub->add_option("--grid-resolution", opts.grid_resolution, "Grid steps per channel parameter");
    sub->add_option("--y-cardinality", opts.y_cardinality, "Representation alphabet size");
    sub->add_option("--threads", opts.threads, "Worker threads (0 = all cores)");
  };

  CLI::App* design = app.add_subcommand("design", "Singular-vector design and reconstruction");
  add_common(design);
  CLI::App* sweep = app.add_subcommand("sweep", "eps/rate sweep against both exhaustive oracles (CSV)");
  add_common(sweep);
  add_oracle(sweep);
  sweep->add_option("--plot-data", opts.plot_data, "Also write a gnuplot data file");
  CLI::App* oracle = app.add_subcommand("oracle", "Exhaustive search at the instance's eps and rate");
  add_common(oracle);
  add_oracle(oracle);
  oracle->add_option("--measure", opts.measure, "Fairness constraint")->check(CLI::IsMember({"chi2", "mi"}));
  CLI::App* verify = app.add_subcommand("verify", "Check the bundled reference example's constants");
  add_common(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*design) return cmd_design(opts);
    if (*sweep) return cmd_sweep(opts);
    if (*oracle) return cmd_oracle(opts);
    if (*verify) return cmd_verify(opts);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  }
  return 0;
}
