#include <algorithm>
#include <cmath>

#include "fairgeo/error.hpp"
#include "fairgeo/kernels.hpp"

namespace fairgeo::kernels::scalar {

namespace {

inline double xlog_ratio(double j, double denom) { return j > 0.0 ? j * std::log(j / denom) : 0.0; }

}  // namespace

void evaluate_row(const BinaryChannelModel& m, double a, std::span<const double> b_values,
                  std::span<double> objective, std::span<std::uint8_t> feasible) {
  if (objective.size() < b_values.size() || feasible.size() < b_values.size())
    throw DimensionError("evaluate_row: output spans too short");
  const std::size_t ns = m.p_s.size();
  const std::size_t nt = m.p_t.size();
  const double q00 = a * m.px0;
  const double q01 = (1.0 - a) * m.px0;

  for (std::size_t i = 0; i < b_values.size(); ++i) {
    const double b = b_values[i];
    const double q10 = b * m.px1;
    const double q11 = (1.0 - b) * m.px1;
    const double py[2] = {q00 + q10, q01 + q11};
    const double qx0[2] = {q00, q01};
    const double qx1[2] = {q10, q11};

    double mi_xy = 0.0, mi_ty = 0.0, mi_sy = 0.0;
    bool fair = true;
    for (int y = 0; y < 2; ++y) {
      mi_xy += xlog_ratio(qx0[y], m.px0 * py[y]);
      mi_xy += xlog_ratio(qx1[y], m.px1 * py[y]);
      for (std::size_t t = 0; t < nt; ++t) {
        const double j = m.t_given_x0[t] * qx0[y] + m.t_given_x1[t] * qx1[y];
        mi_ty += xlog_ratio(j, m.p_t[t] * py[y]);
      }
      double chi2 = 0.0;
      for (std::size_t s = 0; s < ns; ++s) {
        const double j = m.s_given_x0[s] * qx0[y] + m.s_given_x1[s] * qx1[y];
        mi_sy += xlog_ratio(j, m.p_s[s] * py[y]);
        const double d = j / py[y] - m.p_s[s];
        chi2 += d * d / m.p_s[s];
      }
      if (m.measure == FairnessMeasure::ChiSquaredPointwise && py[y] != 0.0 &&
          !(chi2 <= m.eps_sq + m.tol))
        fair = false;
    }
    if (m.measure == FairnessMeasure::MutualInformation && !(mi_sy <= m.eps_sq + m.tol)) fair = false;
    objective[i] = std::max(mi_ty, 0.0);
    feasible[i] = (fair && mi_xy <= m.rate + m.tol) ? 1 : 0;
  }
}

void log(std::span<const double> in, std::span<double> out) {
  if (out.size() < in.size()) throw DimensionError("log: output span too short");
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = std::log(in[i]);
}

}  // namespace fairgeo::kernels::scalar
