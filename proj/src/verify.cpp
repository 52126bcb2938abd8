#include "fairgeo/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fairgeo/designer.hpp"
#include "fairgeo/experiment.hpp"
#include "fairgeo/svd.hpp"

namespace fairgeo {

namespace {

// Reference constants of the two-symbol example (P_X = [1/4, 3/4]).
constexpr double kWty[2][2] = {{2.4610, -0.9206}, {-1.1599, 1.7355}};
// Magnitudes; the listed (2,1) entry carries a minus sign that the definition does not
// produce, see the sign check below.
constexpr double kWxyAbs[2][2] = {{16.7931, 11.8246}, {10.3371, 5.8669}};
constexpr double kWxyListedSign21 = -1.0;
constexpr double kSigmaTy[2] = {3.2034, 1.0};
constexpr double kSigmaXy[2] = {23.7087, 1.0};
constexpr double kTopVector[2] = {-0.8314, 0.5557};
constexpr double kUnitVector[2] = {0.5557, 0.8314};
constexpr double kRateQuadratic = 562.1029;
constexpr double kRateUsageAtMaxEps = 0.7026;
constexpr double kMaxEps = 0.05;
constexpr double kMinEps = 0.005;
constexpr double kReferenceRate = 0.75;
constexpr double kEntropyBits = 0.8113;
constexpr double kPt[2] = {0.3625, 0.6375};
constexpr double kPs[2] = {0.3088, 0.6913};

constexpr double kEntryTol = 1e-3;
constexpr double kMarginalTol = 1e-4;

std::string pair_text(double computed, double expected) {
  return "computed " + format_number(computed) + ", expected " + format_number(expected);
}

void check_close(std::vector<CheckResult>& out, std::string name, double computed, double expected, double tol) {
  const bool ok = std::abs(computed - expected) <= tol;
  out.push_back({std::move(name), ok, pair_text(computed, expected) + " (tol " + format_number(tol) + ")"});
}

// Up to a global sign.
void check_vector(std::vector<CheckResult>& out, std::string name, const Vector& v, const double (&expected)[2]) {
  if (v.size() != 2) {
    out.push_back({std::move(name), false, "wrong dimension"});
    return;
  }
  const double plus = std::max(std::abs(v[0] - expected[0]), std::abs(v[1] - expected[1]));
  const double minus = std::max(std::abs(v[0] + expected[0]), std::abs(v[1] + expected[1]));
  const double err = std::min(plus, minus);
  out.push_back({std::move(name), err <= kEntryTol,
                 "max deviation up to sign " + format_number(err) + " (tol " + format_number(kEntryTol) + ")"});
}

void check_unit_singular_value(std::vector<CheckResult>& out, const char* name, const Matrix& w,
                               const Vector& sqrt_ps) {
  const Vector gram = w.transpose() * (w * sqrt_ps);
  const double err = max_abs_diff(gram, sqrt_ps);
  out.push_back({name, err <= 1e-9, "max |(W^T W) sqrt(P_S) - sqrt(P_S)| = " + format_number(err)});
}

}  // namespace

std::vector<CheckResult> verify_reference_constants(const ProblemInstance& inst) {
  std::vector<CheckResult> out;
  if (inst.x_size() != 2 || inst.s_size() != 2 || inst.t_size() != 2) {
    out.push_back({"alphabet sizes", false, "reference example is binary in X, S and T"});
    return out;
  }

  check_close(out, "P_T[0]", inst.p_t()[0], kPt[0], kMarginalTol);
  check_close(out, "P_T[1]", inst.p_t()[1], kPt[1], kMarginalTol);
  check_close(out, "P_S[0]", inst.p_s()[0], kPs[0], kMarginalTol);
  check_close(out, "P_S[1]", inst.p_s()[1], kPs[1], kMarginalTol);
  check_close(out, "H(X) bits", entropy(inst.p_x(), LogBase::Bits), kEntropyBits, kMarginalTol);

  const GeometryOperators ops = build_operators(inst);
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 2; ++c)
      check_close(out, "W_TY(" + std::to_string(r + 1) + "," + std::to_string(c + 1) + ")", ops.w_ty(r, c),
                  kWty[r][c], kEntryTol);
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t c = 0; c < 2; ++c)
      check_close(out, "|W_XY(" + std::to_string(r + 1) + "," + std::to_string(c + 1) + ")|",
                  std::abs(ops.w_xy(r, c)), kWxyAbs[r][c], kEntryTol);

  {
    // The definition gives +10.3371 at (2,1); only that sign satisfies W^T W sqrt(P_S) = sqrt(P_S).
    Matrix listed = ops.w_xy;
    listed(1, 0) = kWxyListedSign21 * std::abs(listed(1, 0));
    const double err_computed = max_abs_diff(ops.w_xy.transpose() * (ops.w_xy * ops.sqrt_p_s), ops.sqrt_p_s);
    const double err_listed = max_abs_diff(listed.transpose() * (listed * ops.sqrt_p_s), ops.sqrt_p_s);
    const bool deviation = ops.w_xy(1, 0) > 0.0 && err_computed <= 1e-9 && err_listed > 1e-3;
    CheckResult r{"W_XY(2,1) sign", deviation,
                  "computed sign " + std::string(ops.w_xy(1, 0) > 0 ? "+" : "-") +
                      ", listed sign -; unit-singular-value residual " + format_number(err_computed) +
                      " (computed) vs " + format_number(err_listed) + " (listed sign)",
                  deviation};
    out.push_back(std::move(r));
  }

  const SingularSystem ty = svd_small(ops.w_ty);
  const SingularSystem xy = svd_small(ops.w_xy);
  check_close(out, "sigma_max(W_TY)", ty.values[0], kSigmaTy[0], kEntryTol);
  check_close(out, "sigma_2(W_TY)", ty.values[1], kSigmaTy[1], kEntryTol);
  check_close(out, "sigma_max(W_XY)", xy.values[0], kSigmaXy[0], kEntryTol);
  check_close(out, "sigma_2(W_XY)", xy.values[1], kSigmaXy[1], kEntryTol);
  check_vector(out, "v_max(W_TY)", ty.right.column(0), kTopVector);
  check_vector(out, "v_2(W_TY)", ty.right.column(1), kUnitVector);
  check_vector(out, "v_max(W_XY)", xy.right.column(0), kTopVector);
  check_vector(out, "v_2(W_XY)", xy.right.column(1), kUnitVector);

  const Vector v = ty.right.column(0);
  const double rate_quadratic = squared_norm(ops.w_xy * v);
  check_close(out, "||W_XY L_sigma||^2", rate_quadratic, kRateQuadratic, 0.05);
  check_close(out, "1/2 eps^2 ||W_XY L_sigma||^2 at eps=0.05", 0.5 * kMaxEps * kMaxEps * rate_quadratic,
              kRateUsageAtMaxEps, kEntryTol);

  const ProblemInstance at_max = inst.with_budget(kMaxEps, kReferenceRate);
  const DesignPlan plan = plan_design(at_max);
  check_close(out, "P2 at eps=0.05 (nats)", plan.p2_value, 0.5 * kMaxEps * kMaxEps * kSigmaTy[0] * kSigmaTy[0], 1e-5);

  bool k_is_one = true;
  for (double eps = kMinEps; eps <= kMaxEps + 1e-12; eps += kMinEps)
    k_is_one = k_is_one && plan_design(inst.with_budget(eps, kReferenceRate)).k_factor == 1.0;
  out.push_back({"K = 1 for eps in [0.005, 0.05], r = 0.75", k_is_one, k_is_one ? "K = 1 at every grid point" : "K > 1 somewhere"});

  check_unit_singular_value(out, "unit singular value of W_TY", ops.w_ty, ops.sqrt_p_s);
  check_unit_singular_value(out, "unit singular value of W_XY", ops.w_xy, ops.sqrt_p_s);
  return out;
}

bool all_passed(const std::vector<CheckResult>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

}  // namespace fairgeo
