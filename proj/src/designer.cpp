#include "fairgeo/designer.hpp"

#include <algorithm>
#include <cmath>

#include "fairgeo/error.hpp"
#include "fairgeo/svd.hpp"

namespace fairgeo {

namespace {

Matrix orthogonal_projector(std::span<const double> u) {
  const double nn = squared_norm(u);
  Matrix p = Matrix::identity(u.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < u.size(); ++j) p(i, j) -= u[i] * u[j] / nn;
  return p;
}

Channel validated_channel(const Matrix& raw, const char* name) {
  for (std::size_t y = 0; y < raw.cols(); ++y)
    for (std::size_t i = 0; i < raw.rows(); ++i)
      if (raw(i, y) < 0.0)
        throw InfeasibleEpsilonError(std::string(name) + "=" + std::to_string(y) + "}", i, raw(i, y));
  return Channel(raw);
}

}  // namespace

SpectralData spectral_data(const Matrix& w_ty, std::span<const double> sqrt_p_s, double tie_tol) {
  if (w_ty.cols() != sqrt_p_s.size()) throw DimensionError("spectral_data: size mismatch");
  const SingularSystem full = svd_small(w_ty);

  SpectralData out;
  out.sigma_max = full.values[0];
  if (std::abs(out.sigma_max - 1.0) > tie_tol) {
    out.v_max = full.right.column(0);
    if (full.values.size() > 1) {
      out.sigma_max2 = full.values[1];
      out.v_max2 = full.right.column(1);
    }
    return out;
  }

  out.v_max = scaled(sqrt_p_s, 1.0 / norm(sqrt_p_s));
  canonicalize_sign(out.v_max);
  if (sqrt_p_s.size() < 2) return out;
  const SingularSystem restricted = svd_small(w_ty * orthogonal_projector(sqrt_p_s));
  out.sigma_max2 = restricted.values[0];
  out.v_max2 = restricted.right.column(0);
  return out;
}

SelectedDirection select_direction(const SpectralData& spec, double tol) {
  if (spec.sigma_max > 1.0 + tol) return {spec.sigma_max, spec.v_max, false};
  if (spec.sigma_max >= 1.0 - tol) {
    if (spec.v_max2.empty())
      throw DomainError("select_direction: no feasible direction for a one-letter sensitive alphabet");
    return {spec.sigma_max2, spec.v_max2, true};
  }
  throw NumericalError("select_direction: largest singular value " + std::to_string(spec.sigma_max) +
                       " is below 1, which contradicts the unit singular value of W^{T;Y}");
}

double compute_k(const GeometryOperators& ops, std::span<const double> v, double eps, double rate) {
  const double usage = 0.5 * eps * eps * squared_norm(ops.w_xy * v);
  if (std::isinf(rate)) return 1.0;
  return std::max(1.0, std::sqrt(usage / rate));
}

DesignPlan plan_design(const ProblemInstance& inst, const DesignerOptions& opts) {
  DesignPlan plan;
  plan.ops = build_operators(inst);
  plan.spectrum = spectral_data(plan.ops.w_ty, plan.ops.sqrt_p_s, opts.tie_tol);
  plan.direction = select_direction(plan.spectrum, opts.tie_tol);

  const double eps = inst.eps();
  const Vector& v = plan.direction.v;
  plan.k_factor = compute_k(plan.ops, v, eps, inst.rate());
  const double gain = plan.direction.sigma / plan.k_factor;
  plan.p2_value = 0.5 * eps * eps * gain * gain;
  plan.rate_usage = 0.5 * eps * eps * squared_norm(plan.ops.w_xy * v) / (plan.k_factor * plan.k_factor);
  plan.design = PerturbationDesign{Pmf({0.5, 0.5}), {scaled(v, 1.0 / plan.k_factor),
                                                      scaled(v, -1.0 / plan.k_factor)}};
  plan.tight = inst.s_size() == 2;

  if (eps >= plan.ops.c1 || eps >= plan.ops.c2)
    plan.warnings.push_back("eps = " + std::to_string(eps) + " is not below min(c1, c2) = " +
                            std::to_string(std::min(plan.ops.c1, plan.ops.c2)) +
                            "; the quadratic approximation is not guaranteed");
  if (plan.direction.sigma <= opts.tie_tol)
    plan.warnings.push_back("selected singular value is zero: the design carries no task information");
  return plan;
}

DesignSolution reconstruct(const ProblemInstance& inst, DesignPlan plan) {
  const RawConditionals raw = perturbed_conditionals(inst, plan.design, inst.eps());
  Channel s_given_y = validated_channel(raw.s_given_y, "P_{S|Y");
  Channel x_given_y = validated_channel(raw.x_given_y, "P_{X|Y");
  Channel t_given_y = validated_channel(raw.t_given_y, "P_{T|Y");
  Channel y_given_x = bayes_invert(x_given_y, plan.design.p_y, inst.p_x());
  JointDist joint = JointDist::from_markov(inst.p_x(), inst.p_s_given_x(), inst.p_t_given_x(), y_given_x,
                                           inst.st_given_x());
  return DesignSolution{std::move(plan),        std::move(s_given_y), std::move(t_given_y),
                        std::move(x_given_y),   std::move(y_given_x), std::move(joint)};
}

DesignSolution solve(const ProblemInstance& inst, const DesignerOptions& opts) {
  return reconstruct(inst, plan_design(inst, opts));
}

double low_rate_bound(const ProblemInstance& inst, const DesignerOptions& opts) {
  const GeometryOperators ops = build_operators(inst);
  const SelectedDirection dir =
      select_direction(spectral_data(ops.w_ty, ops.sqrt_p_s, opts.tie_tol), opts.tie_tol);
  const double gain_xy = squared_norm(ops.w_xy * dir.v);
  const double threshold = 0.5 * inst.eps() * inst.eps() * gain_xy;
  if (!(inst.rate() < threshold))
    throw DomainError("low_rate_bound: rate " + std::to_string(inst.rate()) +
                      " is not below the low-rate threshold " + std::to_string(threshold));
  return inst.rate() * dir.sigma * dir.sigma / gain_xy;
}

}  // namespace fairgeo
