#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "fairgeo/dist.hpp"
#include "fairgeo/matrix.hpp"

namespace fairgeo {

inline constexpr double kDeterminantFloor = 1e-10;

/// The full input of the fairness design problem: data marginal, the two channels
/// out of X, the parity budget eps and the compression budget (nats).
///
/// Invariants checked on construction:
///  - P_{S|X} is square with |det| > kDeterminantFloor (ConditioningError otherwise)
///  - P_X, P_S = P_{S|X} P_X and P_T = P_{T|X} P_X are strictly positive
///  - eps >= 0 and finite, rate > 0 (may be +inf)
///  - an optional S/T coupling, when given, reproduces both channels
class ProblemInstance {
 public:
  ProblemInstance(Pmf p_x, Channel p_s_given_x, Channel p_t_given_x, double eps, double rate,
                  std::optional<std::vector<Matrix>> st_given_x = std::nullopt);

  const Pmf& p_x() const noexcept { return p_x_; }
  const Channel& p_s_given_x() const noexcept { return p_s_given_x_; }
  const Channel& p_t_given_x() const noexcept { return p_t_given_x_; }
  const Pmf& p_s() const noexcept { return p_s_; }
  const Pmf& p_t() const noexcept { return p_t_; }
  double eps() const noexcept { return eps_; }
  double rate() const noexcept { return rate_; }
  const std::optional<std::vector<Matrix>>& st_given_x() const noexcept { return st_given_x_; }

  /// P_{S|X}^{-1}.
  const Matrix& s_given_x_inverse() const noexcept { return s_given_x_inv_; }

  std::size_t x_size() const noexcept { return p_x_.size(); }
  std::size_t s_size() const noexcept { return p_s_.size(); }
  std::size_t t_size() const noexcept { return p_t_.size(); }

  /// Same instance with a different eps / rate.
  ProblemInstance with_budget(double eps, double rate) const;

 private:
  Pmf p_x_;
  Channel p_s_given_x_;
  Channel p_t_given_x_;
  double eps_;
  double rate_;
  std::optional<std::vector<Matrix>> st_given_x_;
  Pmf p_s_;
  Pmf p_t_;
  Matrix s_given_x_inv_;
};

/// Perturbation directions L_y (one per representation symbol) and the representation
/// marginal P_Y. P_{S|Y=y} = P_S + eps [sqrt P_S] L_y.
struct PerturbationDesign {
  Pmf p_y{Vector{1.0}};
  std::vector<Vector> l_vectors;
};

/// Throws ValidationError unless: <L_y, sqrt P_S> = 0, sum_y P_Y(y) L_y = 0 and
/// ||L_y||^2 <= 1, each within 1e-10.
void check_design(const PerturbationDesign& design, std::span<const double> sqrt_p_s);

struct GeometryOperators {
  Matrix w_ty;  ///< [sqrt P_T^-1] P_{T|X} P_{S|X}^-1 [sqrt P_S], |T| x |S|
  Matrix w_xy;  ///< [sqrt P_X^-1] P_{S|X}^-1 [sqrt P_S],         |X| x |S|
  double c1 = 0.0;  ///< validity threshold for the I(T;Y) expansion
  double c2 = 0.0;  ///< validity threshold for the I(X;Y) expansion
  Vector sqrt_p_s;
};

GeometryOperators build_operators(const ProblemInstance& inst);

/// P_S + eps [sqrt P_S] l. Throws InfeasibleEpsilonError naming the first negative entry.
Pmf perturb_to_conditional(const Pmf& p_s, std::span<const double> l, double eps);

/// 1/2 eps^2 sum_y P_Y(y) ||W^{X;Y} L_y||^2 in nats. Warns when eps >= c2.
double approx_mi_xy(const GeometryOperators& ops, const PerturbationDesign& design, double eps);
/// 1/2 eps^2 sum_y P_Y(y) ||W^{T;Y} L_y||^2 in nats. Warns when eps >= c1.
double approx_mi_ty(const GeometryOperators& ops, const PerturbationDesign& design, double eps);

/// Conditionals implied by a design, without any feasibility check. Column y of each
/// matrix is the unvalidated vector P_{.|Y=y}:
///   P_{S|Y=y} = P_S + eps [sqrt P_S] L_y
///   P_{X|Y=y} = P_X + eps P_{S|X}^-1 [sqrt P_S] L_y
///   P_{T|Y=y} = P_T + eps P_{T|X} P_{S|X}^-1 [sqrt P_S] L_y
struct RawConditionals {
  Matrix s_given_y;
  Matrix x_given_y;
  Matrix t_given_y;
};

RawConditionals perturbed_conditionals(const ProblemInstance& inst, const PerturbationDesign& design,
                                       double eps);

/// One row of the approximation-error probe. exact_* are NaN (and the matching flag is
/// false) when the reconstructed conditionals at this eps are not valid pmfs.
struct ProbeRow {
  double eps = 0.0;
  double exact_mi_xy = 0.0;
  double approx_mi_xy = 0.0;
  double exact_mi_ty = 0.0;
  double approx_mi_ty = 0.0;
  double xy_error_over_eps_sq = 0.0;
  double ty_error_over_eps_sq = 0.0;
  bool xy_valid = false;  ///< every P_{X|Y=y} is a pmf
  bool ty_valid = false;  ///< every P_{T|Y=y} is a pmf
  bool realizable() const noexcept { return xy_valid && ty_valid; }
};

/// Compares exact mutual information of the reconstructed conditionals against the
/// quadratic approximation over a grid of eps values. The ratio columns are
/// |exact - approx| / eps^2 (zero at eps = 0).
std::vector<ProbeRow> approximation_error_probe(const ProblemInstance& inst,
                                                const PerturbationDesign& design,
                                                std::span<const double> eps_grid);

}  // namespace fairgeo
