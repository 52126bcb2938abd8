#include "fairgeo/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "fairgeo/error.hpp"
#include "json.hpp"

namespace fairgeo {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format_vector(std::span<const double> v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_number(v[i]);
  }
  return out + "]";
}

void append_matrix(std::ostringstream& os, const char* title, const Matrix& m, const char* column_label) {
  os << title << "\n";
  for (std::size_t c = 0; c < m.cols(); ++c)
    os << "  " << column_label << "=" << c << ": " << format_vector(m.column(c)) << "\n";
}

nlohmann::json columns_json(const Matrix& m) {
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t c = 0; c < m.cols(); ++c) out.push_back(m.column(c));
  return out;
}

nlohmann::json rows_json(const Matrix& m) {
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) out.push_back(m.row(r));
  return out;
}

const char* unit(LogBase base) { return base == LogBase::Nats ? "nats" : "bits"; }

}  // namespace

const char* const kSweepCsvHeader =
    "eps,rate,p2_approx_nats,p2_lower_bound_nats,k_factor,oracle_chi2_nats,oracle_chi2_bits,"
    "oracle_mi_nats,oracle_mi_bits,exact_mi_of_design_nats,gap_approx_vs_oracle";

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::vector<SweepRecord> run_sweep(const ProblemInstance& base, std::span<const double> eps_grid,
                                   std::span<const double> rate_grid, const SweepOptions& opts) {
  validate(opts.oracle);
  const std::vector<double> rates =
      rate_grid.empty() ? std::vector<double>{base.rate()} : std::vector<double>(rate_grid.begin(), rate_grid.end());

  std::vector<SweepRecord> rows;
  for (double rate : rates) {
    for (double eps : eps_grid) {
      SweepRecord rec;
      rec.eps = eps;
      rec.rate = rate;
      auto fail = [&](const std::string& stage, const std::exception& e) {
        if (!rec.note.empty()) rec.note += "; ";
        rec.note += stage + ": " + e.what();
      };
      try {
        const ProblemInstance inst = base.with_budget(eps, rate);
        const DesignPlan plan = plan_design(inst, opts.designer);
        rec.p2_lower_bound_nats = plan.p2_value;
        rec.k_factor = plan.k_factor;
        rec.p2_approx_nats = plan.p2_value;
        if (!plan.tight && inst.s_size() <= 4)
          rec.p2_approx_nats = std::max(plan.p2_value, quadratic_oracle(plan.ops, eps, rate, opts.sphere_samples));

        OracleConfig cfg = opts.oracle;
        cfg.measure = FairnessMeasure::ChiSquaredPointwise;
        const OracleResult chi2 = grid_search(inst, cfg);
        cfg.measure = FairnessMeasure::MutualInformation;
        const OracleResult mi = grid_search(inst, cfg);
        rec.oracle_chi2_nats = chi2.best_value_nats;
        rec.oracle_chi2_bits = chi2.best_value_bits;
        rec.oracle_mi_nats = mi.best_value_nats;
        rec.oracle_mi_bits = mi.best_value_bits;
        rec.gap_approx_vs_oracle = rec.oracle_chi2_nats - rec.p2_approx_nats;

        try {
          const DesignSolution sol = reconstruct(inst, plan);
          rec.exact_mi_of_design_nats =
              evaluate_channel(inst, sol.y_given_x, FairnessMeasure::ChiSquaredPointwise).objective_nats;
        } catch (const Error& e) {
          rec.exact_mi_of_design_nats = kNaN;
          fail("design", e);
        }
      } catch (const Error& e) {
        rec.p2_approx_nats = rec.p2_lower_bound_nats = rec.k_factor = kNaN;
        rec.oracle_chi2_nats = rec.oracle_chi2_bits = rec.oracle_mi_nats = rec.oracle_mi_bits = kNaN;
        rec.exact_mi_of_design_nats = rec.gap_approx_vs_oracle = kNaN;
        fail("point", e);
      }
      rows.push_back(std::move(rec));
    }
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRecord>& rows) {
  std::string out = std::string(kSweepCsvHeader) + "\n";
  for (const auto& r : rows) {
    const double cells[] = {r.eps,
                            r.rate,
                            r.p2_approx_nats,
                            r.p2_lower_bound_nats,
                            r.k_factor,
                            r.oracle_chi2_nats,
                            r.oracle_chi2_bits,
                            r.oracle_mi_nats,
                            r.oracle_mi_bits,
                            r.exact_mi_of_design_nats,
                            r.gap_approx_vs_oracle};
    for (std::size_t i = 0; i < std::size(cells); ++i) {
      if (i) out += ',';
      out += format_number(cells[i]);
    }
    out += '\n';
  }
  return out;
}

std::string sweep_plot_data(const std::vector<SweepRecord>& rows) {
  std::string out = "# eps rate p2_approx_nats oracle_chi2_nats oracle_mi_nats exact_mi_of_design_nats\n";
  for (const auto& r : rows) {
    out += format_number(r.eps) + ' ' + format_number(r.rate) + ' ' + format_number(r.p2_approx_nats) + ' ' +
           format_number(r.oracle_chi2_nats) + ' ' + format_number(r.oracle_mi_nats) + ' ' +
           format_number(r.exact_mi_of_design_nats) + '\n';
  }
  return out;
}

std::string design_report(const ProblemInstance& inst, const DesignPlan& plan, const DesignSolution* solution,
                          LogBase base) {
  std::ostringstream os;
  os << "fair representation design\n";
  os << "  eps = " << format_number(inst.eps()) << ", rate = " << format_number(inst.rate()) << " nats\n";
  os << "  |X| = " << inst.x_size() << ", |S| = " << inst.s_size() << ", |T| = " << inst.t_size() << "\n";
  os << "  P_S = " << format_vector(inst.p_s().probs()) << "\n";
  os << "  P_T = " << format_vector(inst.p_t().probs()) << "\n";
  os << "  c1 = " << format_number(plan.ops.c1) << ", c2 = " << format_number(plan.ops.c2) << "\n";
  os << "spectrum of W^{T;Y}\n";
  os << "  sigma_max = " << format_number(plan.spectrum.sigma_max) << ", v_max = " << format_vector(plan.spectrum.v_max)
     << "\n";
  os << "  sigma_max2 = " << format_number(plan.spectrum.sigma_max2)
     << ", v_max2 = " << format_vector(plan.spectrum.v_max2) << "\n";
  os << "  selected = " << (plan.direction.used_second ? "second" : "first")
     << " (sigma = " << format_number(plan.direction.sigma) << ")\n";
  os << "design\n";
  os << "  K = " << format_number(plan.k_factor) << "\n";
  os << "  P2 = " << format_number(to_base(plan.p2_value, base)) << " " << unit(base) << "\n";
  os << "  approx I(X;Y) = " << format_number(to_base(plan.rate_usage, base)) << " " << unit(base) << "\n";
  os << "  tight = " << (plan.tight ? "yes" : "no") << "\n";
  os << "  P_Y = " << format_vector(plan.design.p_y.probs()) << "\n";
  for (std::size_t y = 0; y < plan.design.l_vectors.size(); ++y)
    os << "  L_" << y << " = " << format_vector(plan.design.l_vectors[y]) << "\n";
  for (const auto& w : plan.warnings) os << "  warning: " << w << "\n";
  if (solution == nullptr) return os.str();

  append_matrix(os, "P_{S|Y}", solution->s_given_y.matrix(), "y");
  append_matrix(os, "P_{T|Y}", solution->t_given_y.matrix(), "y");
  append_matrix(os, "P_{X|Y}", solution->x_given_y.matrix(), "y");
  append_matrix(os, "P_{Y|X}", solution->y_given_x.matrix(), "x");
  const ChannelEvaluation ev = evaluate_channel(inst, solution->y_given_x, FairnessMeasure::ChiSquaredPointwise);
  os << "exact evaluation of P_{Y|X}\n";
  os << "  I(Y;T) = " << format_number(to_base(ev.objective_nats, base)) << " " << unit(base) << "\n";
  os << "  I(X;Y) = " << format_number(to_base(ev.mi_xy_nats, base)) << " " << unit(base) << "\n";
  os << "  I(S;Y) = " << format_number(to_base(ev.mi_sy_nats, base)) << " " << unit(base) << "\n";
  os << "  max_y chi2(P_{S|y}; P_S) = " << format_number(ev.max_chi2) << "\n";
  return os.str();
}

std::string design_json(const ProblemInstance& inst, const DesignPlan& plan, const DesignSolution* solution) {
  using nlohmann::json;
  json j;
  j["eps"] = inst.eps();
  j["rate"] = std::isinf(inst.rate()) ? json("inf") : json(inst.rate());
  j["p_s"] = inst.p_s().vector();
  j["p_t"] = inst.p_t().vector();
  j["c1"] = plan.ops.c1;
  j["c2"] = plan.ops.c2;
  j["w_ty"] = rows_json(plan.ops.w_ty);
  j["w_xy"] = rows_json(plan.ops.w_xy);
  j["sigma_max"] = plan.spectrum.sigma_max;
  j["sigma_max2"] = plan.spectrum.sigma_max2;
  j["v_max"] = plan.spectrum.v_max;
  j["v_max2"] = plan.spectrum.v_max2;
  j["used_second"] = plan.direction.used_second;
  j["k_factor"] = plan.k_factor;
  j["p2_nats"] = plan.p2_value;
  j["p2_bits"] = to_base(plan.p2_value, LogBase::Bits);
  j["approx_mi_xy_nats"] = plan.rate_usage;
  j["tight"] = plan.tight;
  j["p_y"] = plan.design.p_y.vector();
  j["l_vectors"] = plan.design.l_vectors;
  j["warnings"] = plan.warnings;
  j["realizable"] = solution != nullptr;
  if (solution != nullptr) {
    j["p_s_given_y"] = columns_json(solution->s_given_y.matrix());
    j["p_t_given_y"] = columns_json(solution->t_given_y.matrix());
    j["p_x_given_y"] = columns_json(solution->x_given_y.matrix());
    j["p_y_given_x"] = columns_json(solution->y_given_x.matrix());
    const auto d = solution->joint.dims();
    j["joint"] = {{"dims_stxy", {d[0], d[1], d[2], d[3]}}, {"table", solution->joint.table()}};
  }
  return j.dump(2) + "\n";
}

std::string oracle_report(const ProblemInstance& inst, const OracleConfig& cfg, const OracleResult& result,
                          LogBase base) {
  std::ostringstream os;
  os << "exhaustive search\n";
  os << "  measure = " << measure_name(cfg.measure) << ", eps = " << format_number(inst.eps())
     << ", rate = " << format_number(inst.rate()) << " nats\n";
  os << "  grid_resolution = " << cfg.grid_resolution << ", |Y| = " << cfg.y_cardinality
     << ", kernels = " << kernels::backend_name(kernels::active_backend()) << "\n";
  os << "  evaluated = " << result.evaluated_count << ", feasible = " << result.feasible_count << "\n";
  os << "  best I(Y;T) = " << format_number(to_base(result.best_value_nats, base)) << " " << unit(base) << " ("
     << format_number(result.best_value_nats) << " nats, " << format_number(result.best_value_bits) << " bits)\n";
  append_matrix(os, "  best P_{Y|X}", result.best_channel.matrix(), "x");
  return os.str();
}

}  // namespace fairgeo
