#include "fairgeo/geometry.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "fairgeo/error.hpp"
#include "fairgeo/svd.hpp"

namespace fairgeo {

namespace {

constexpr double kDesignTol = 1e-10;

Matrix inverse_sqrt_diag(const Pmf& p) {
  Vector d = p.sqrt();
  for (double& v : d) v = 1.0 / v;
  return Matrix::diagonal(d);
}

Pmf derived_marginal(const Channel& c, const Pmf& p_x, const char* name) {
  Pmf p = apply(c, p_x);
  if (!p.strictly_positive())
    throw SupportError(std::string(name) + " has a zero-probability symbol");
  return p;
}

void warn_threshold(const char* what, double eps, double threshold) {
  if (eps < threshold) return;
  warn(std::string(what) + ": eps = " + std::to_string(eps) + " is not below the sufficient threshold " +
       std::to_string(threshold) + "; the quadratic approximation may be loose");
}

double weighted_quadratic(const Matrix& w, const PerturbationDesign& design, double eps) {
  double acc = 0.0;
  for (std::size_t y = 0; y < design.l_vectors.size(); ++y)
    acc += design.p_y[y] * squared_norm(w * design.l_vectors[y]);
  return 0.5 * eps * eps * acc;
}

std::optional<double> exact_mi_from_columns(const Matrix& cond, const Pmf& marginal, const Pmf& p_y) {
  double acc = 0.0;
  for (std::size_t y = 0; y < cond.cols(); ++y) {
    try {
      acc += p_y[y] * kl_divergence(Pmf(cond.column(y)), marginal, LogBase::Nats);
    } catch (const ValidationError&) {
      return std::nullopt;
    }
  }
  return acc;
}

}  // namespace

ProblemInstance::ProblemInstance(Pmf p_x, Channel p_s_given_x, Channel p_t_given_x, double eps,
                                 double rate, std::optional<std::vector<Matrix>> st_given_x)
    : p_x_(std::move(p_x)),
      p_s_given_x_(std::move(p_s_given_x)),
      p_t_given_x_(std::move(p_t_given_x)),
      eps_(eps),
      rate_(rate),
      st_given_x_(std::move(st_given_x)),
      p_s_(Pmf::uniform(1)),
      p_t_(Pmf::uniform(1)) {
  const std::size_t n = p_x_.size();
  if (p_s_given_x_.in_size() != n || p_t_given_x_.in_size() != n)
    throw DimensionError("instance: channel input sizes must equal |X|");
  if (!p_s_given_x_.matrix().square())
    throw DimensionError("instance: P_{S|X} must be square (|S| = |X|)");
  if (!std::isfinite(eps_) || eps_ < 0.0) throw DomainError("instance: eps must be finite and >= 0");
  if (std::isnan(rate_) || !(rate_ > 0.0)) throw DomainError("instance: rate must be > 0");
  if (!p_x_.strictly_positive()) throw SupportError("instance: P_X has a zero-probability symbol");

  const LuDecomposition lu(p_s_given_x_.matrix());
  const double det = lu.determinant();
  if (!(std::abs(det) > kDeterminantFloor))
    throw ConditioningError("instance: P_{S|X} is singular or nearly so (|det| = " +
                            std::to_string(std::abs(det)) + ")");
  s_given_x_inv_ = lu.inverse();

  p_s_ = derived_marginal(p_s_given_x_, p_x_, "P_S");
  p_t_ = derived_marginal(p_t_given_x_, p_x_, "P_T");
  if (st_given_x_) check_coupling(*st_given_x_, p_s_given_x_, p_t_given_x_);
}

ProblemInstance ProblemInstance::with_budget(double eps, double rate) const {
  return ProblemInstance(p_x_, p_s_given_x_, p_t_given_x_, eps, rate, st_given_x_);
}

void check_design(const PerturbationDesign& design, std::span<const double> sqrt_p_s) {
  if (design.l_vectors.size() != design.p_y.size())
    throw DimensionError("design: need one perturbation vector per representation symbol");
  Vector weighted(sqrt_p_s.size(), 0.0);
  for (std::size_t y = 0; y < design.l_vectors.size(); ++y) {
    const Vector& l = design.l_vectors[y];
    if (l.size() != sqrt_p_s.size()) throw DimensionError("design: L_y has the wrong length");
    if (std::abs(dot(l, sqrt_p_s)) > kDesignTol)
      throw ValidationError("design: L_" + std::to_string(y) + " is not orthogonal to sqrt(P_S)");
    if (squared_norm(l) > 1.0 + kDesignTol)
      throw ValidationError("design: ||L_" + std::to_string(y) + "||^2 exceeds 1");
    for (std::size_t i = 0; i < l.size(); ++i) weighted[i] += design.p_y[y] * l[i];
  }
  for (double v : weighted)
    if (std::abs(v) > kDesignTol) throw ValidationError("design: sum_y P_Y(y) L_y is not zero");
}

GeometryOperators build_operators(const ProblemInstance& inst) {
  const Matrix sqrt_ps = Matrix::diagonal(inst.p_s().sqrt());
  const Matrix& inv = inst.s_given_x_inverse();
  const Matrix t_through_s = inst.p_t_given_x().matrix() * inv;

  GeometryOperators ops;
  ops.w_ty = inverse_sqrt_diag(inst.p_t()) * t_through_s * sqrt_ps;
  ops.w_xy = inverse_sqrt_diag(inst.p_x()) * inv * sqrt_ps;
  ops.sqrt_p_s = inst.p_s().sqrt();

  const double root_max_ps = std::sqrt(inst.p_s().max());
  const double sigma_max_ts = svd_small(t_through_s).values.front();
  const double sigma_min_sx = svd_small(inst.p_s_given_x().matrix()).values.back();
  ops.c1 = inst.p_t().min() / (sigma_max_ts * root_max_ps);
  ops.c2 = sigma_min_sx * inst.p_x().min() / root_max_ps;
  return ops;
}

Pmf perturb_to_conditional(const Pmf& p_s, std::span<const double> l, double eps) {
  if (l.size() != p_s.size()) throw DimensionError("perturb: L has the wrong length");
  Vector out(p_s.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = p_s[i] + eps * std::sqrt(p_s[i]) * l[i];
    if (out[i] < 0.0) throw InfeasibleEpsilonError("P_{S|Y}", i, out[i]);
  }
  return Pmf(std::move(out));
}

double approx_mi_xy(const GeometryOperators& ops, const PerturbationDesign& design, double eps) {
  check_design(design, ops.sqrt_p_s);
  warn_threshold("I(X;Y) approximation", eps, ops.c2);
  return weighted_quadratic(ops.w_xy, design, eps);
}

double approx_mi_ty(const GeometryOperators& ops, const PerturbationDesign& design, double eps) {
  check_design(design, ops.sqrt_p_s);
  warn_threshold("I(T;Y) approximation", eps, ops.c1);
  return weighted_quadratic(ops.w_ty, design, eps);
}

RawConditionals perturbed_conditionals(const ProblemInstance& inst, const PerturbationDesign& design,
                                       double eps) {
  const std::size_t ny = design.l_vectors.size();
  const Vector sqrt_ps = inst.p_s().sqrt();
  const Matrix& inv = inst.s_given_x_inverse();
  const Matrix& t_given_x = inst.p_t_given_x().matrix();

  RawConditionals out{Matrix(inst.s_size(), ny), Matrix(inst.x_size(), ny), Matrix(inst.t_size(), ny)};
  for (std::size_t y = 0; y < ny; ++y) {
    const Vector& l = design.l_vectors[y];
    Vector j(l.size());
    for (std::size_t s = 0; s < l.size(); ++s) j[s] = sqrt_ps[s] * l[s];
    const Vector dx = inv * j;
    const Vector dt = t_given_x * dx;
    out.s_given_y.set_column(y, axpy(inst.p_s().probs(), eps, j));
    out.x_given_y.set_column(y, axpy(inst.p_x().probs(), eps, dx));
    out.t_given_y.set_column(y, axpy(inst.p_t().probs(), eps, dt));
  }
  return out;
}

std::vector<ProbeRow> approximation_error_probe(const ProblemInstance& inst,
                                                const PerturbationDesign& design,
                                                std::span<const double> eps_grid) {
  const GeometryOperators ops = build_operators(inst);
  check_design(design, ops.sqrt_p_s);
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

  std::vector<ProbeRow> rows;
  rows.reserve(eps_grid.size());
  for (double eps : eps_grid) {
    ProbeRow row;
    row.eps = eps;
    row.approx_mi_xy = weighted_quadratic(ops.w_xy, design, eps);
    row.approx_mi_ty = weighted_quadratic(ops.w_ty, design, eps);
    const RawConditionals cond = perturbed_conditionals(inst, design, eps);
    const auto xy = exact_mi_from_columns(cond.x_given_y, inst.p_x(), design.p_y);
    const auto ty = exact_mi_from_columns(cond.t_given_y, inst.p_t(), design.p_y);
    row.xy_valid = xy.has_value();
    row.ty_valid = ty.has_value();
    row.exact_mi_xy = xy.value_or(kNaN);
    row.exact_mi_ty = ty.value_or(kNaN);
    const double e2 = eps * eps;
    row.xy_error_over_eps_sq = !xy ? kNaN : e2 == 0.0 ? 0.0 : std::abs(*xy - row.approx_mi_xy) / e2;
    row.ty_error_over_eps_sq = !ty ? kNaN : e2 == 0.0 ? 0.0 : std::abs(*ty - row.approx_mi_ty) / e2;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace fairgeo
