#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fairgeo/designer.hpp"
#include "fairgeo/oracle.hpp"

namespace fairgeo {

/// One (eps, rate) point of a trade-off sweep. All utilities are I(T;Y).
///
///  p2_lower_bound_nats  value of the singular-vector design, 1/2 eps^2 (sigma/K)^2
///  p2_approx_nats       best known value of the quadratic surrogate: equal to the lower
///                       bound when |S| = 2, else the larger of the bound and a sampled
///                       quadratic_oracle estimate
///  oracle_*             exhaustive search under the chi^2 / mutual-information constraint
///  exact_mi_of_design   exact I(T;Y) of the reconstructed design channel; NaN when the
///                       design is not realizable at this eps (see `note`)
///  gap_approx_vs_oracle oracle_chi2_nats - p2_approx_nats
struct SweepRecord {
  double eps = 0.0;
  double rate = 0.0;
  double p2_approx_nats = 0.0;
  double p2_lower_bound_nats = 0.0;
  double k_factor = 1.0;
  double oracle_chi2_nats = 0.0;
  double oracle_chi2_bits = 0.0;
  double oracle_mi_nats = 0.0;
  double oracle_mi_bits = 0.0;
  double exact_mi_of_design_nats = 0.0;
  double gap_approx_vs_oracle = 0.0;
  std::string note;  ///< empty when every stage succeeded
};

struct SweepOptions {
  OracleConfig oracle;
  std::size_t sphere_samples = 4096;
  DesignerOptions designer;
};

/// Rates vary slowest. An empty rate grid means the instance's own rate. Failures at a
/// grid point are recorded in the row (NaN cells plus `note`); the sweep continues.
std::vector<SweepRecord> run_sweep(const ProblemInstance& base, std::span<const double> eps_grid,
                                   std::span<const double> rate_grid, const SweepOptions& opts);

extern const char* const kSweepCsvHeader;

/// Fixed column order, "%.10g" numbers, "nan"/"inf" for non-finite values, '\n' line ends.
std::string sweep_csv(const std::vector<SweepRecord>& rows);
/// Whitespace-separated columns with a '#' header, for gnuplot.
std::string sweep_plot_data(const std::vector<SweepRecord>& rows);

std::string format_number(double v);

/// Human-readable summary of a plan (always available) and, when present, the
/// reconstructed solution.
std::string design_report(const ProblemInstance& inst, const DesignPlan& plan,
                          const DesignSolution* solution, LogBase base);
/// Machine-readable JSON of the same content.
std::string design_json(const ProblemInstance& inst, const DesignPlan& plan, const DesignSolution* solution);

std::string oracle_report(const ProblemInstance& inst, const OracleConfig& cfg, const OracleResult& result,
                          LogBase base);

}  // namespace fairgeo
