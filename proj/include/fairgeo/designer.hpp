#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fairgeo/dist.hpp"
#include "fairgeo/geometry.hpp"

namespace fairgeo {

/// Top two right singular pairs of W^{T;Y}.
///
/// W^{T;Y} always has sqrt(P_S) as a right singular vector with value 1, and that
/// direction is never a feasible perturbation. When the largest value is 1 (within
/// the tie tolerance) `v_max` is pinned to sqrt(P_S) and the second pair is the top
/// pair of W^{T;Y} restricted to the orthogonal complement of sqrt(P_S); with a
/// degenerate unit singular value this keeps `v_max2` feasible.
struct SpectralData {
  double sigma_max = 0.0;
  double sigma_max2 = 0.0;
  Vector v_max;
  Vector v_max2;
};

inline constexpr double kDefaultTieTolerance = 1e-9;

SpectralData spectral_data(const Matrix& w_ty, std::span<const double> sqrt_p_s,
                           double tie_tol = kDefaultTieTolerance);

struct SelectedDirection {
  double sigma = 0.0;
  Vector v;
  bool used_second = false;
};

/// Chooses the top singular pair when sigma_max > 1 + tol, the second pair when
/// |sigma_max - 1| <= tol. sigma_max < 1 - tol contradicts the unit singular value of
/// W^{T;Y} and throws NumericalError.
SelectedDirection select_direction(const SpectralData& spec, double tol = kDefaultTieTolerance);

/// Smallest K >= 1 with 1/2 eps^2 ||W^{X;Y} v||^2 <= rate K^2.
double compute_k(const GeometryOperators& ops, std::span<const double> v, double eps, double rate);

struct DesignerOptions {
  double tie_tol = kDefaultTieTolerance;
};

/// Everything that follows from the singular-value construction, before any probability
/// is reconstructed. Never fails on eps; feasibility is checked by `reconstruct`.
struct DesignPlan {
  GeometryOperators ops;
  SpectralData spectrum;
  SelectedDirection direction;
  double k_factor = 1.0;
  double p2_value = 0.0;          ///< 1/2 eps^2 (sigma / K)^2, nats
  double rate_usage = 0.0;        ///< 1/2 eps^2 ||W^{X;Y} L_y||^2 of the returned design, nats
  PerturbationDesign design;      ///< uniform binary Y, L_1 = v / K, L_2 = -v / K
  bool tight = false;             ///< |S| = 2, the lower bound equals the optimum
  std::vector<std::string> warnings;
};

DesignPlan plan_design(const ProblemInstance& inst, const DesignerOptions& opts = {});

struct DesignSolution {
  DesignPlan plan;
  Channel s_given_y;
  Channel t_given_y;
  Channel x_given_y;
  Channel y_given_x;
  JointDist joint;

  double p2_value() const noexcept { return plan.p2_value; }
  double k_factor() const noexcept { return plan.k_factor; }
  bool tightness_flag() const noexcept { return plan.tight; }
  const PerturbationDesign& design() const noexcept { return plan.design; }
};

/// Applies the reconstruction formulas to a plan. Throws InfeasibleEpsilonError naming
/// the first conditional with a negative entry.
DesignSolution reconstruct(const ProblemInstance& inst, DesignPlan plan);

DesignSolution solve(const ProblemInstance& inst, const DesignerOptions& opts = {});

/// The low-rate (K > 1) value r sigma^2 / ||W^{X;Y} v||^2, linear in the rate.
/// Throws DomainError unless rate < 1/2 eps^2 ||W^{X;Y} v||^2.
double low_rate_bound(const ProblemInstance& inst, const DesignerOptions& opts = {});

}  // namespace fairgeo
