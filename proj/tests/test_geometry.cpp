#include <cmath>
#include <random>

#include "doctest.h"
#include "fairgeo/error.hpp"
#include "fairgeo/geometry.hpp"
#include "random_instances.hpp"

using namespace fairgeo;
using doctest::Approx;
using testing::random_instance;
using testing::reference_instance;

namespace {

Vector complement_direction(std::mt19937_64& rng, const Vector& sqrt_p_s) {
  std::normal_distribution<double> g;
  Vector u(sqrt_p_s.size());
  for (auto& x : u) x = g(rng);
  u = axpy(u, -dot(u, sqrt_p_s), sqrt_p_s);
  return scaled(u, 1.0 / norm(u));
}

// Binary design with random P_Y: L_0 = a u, L_1 = -(p0 / p1) L_0, both inside the unit ball.
PerturbationDesign random_design(std::mt19937_64& rng, const Vector& sqrt_p_s) {
  std::uniform_real_distribution<double> unif(0.1, 0.9);
  const double p0 = unif(rng), p1 = 1.0 - p0;
  const Vector u = complement_direction(rng, sqrt_p_s);
  const double a = unif(rng) * std::min(1.0, p1 / p0);
  return PerturbationDesign{Pmf({p0, p1}), {scaled(u, a), scaled(u, -a * p0 / p1)}};
}

// For binary S the complement of sqrt(P_S) is one line: [sqrt P_S(1), -sqrt P_S(0)].
Vector unit_complement(const ProblemInstance& inst) {
  const Vector sq = inst.p_s().sqrt();
  return {sq[1], -sq[0]};
}

double quadratic_objective(const Matrix& w, const PerturbationDesign& d, double eps) {
  double s = 0.0;
  for (std::size_t y = 0; y < d.p_y.size(); ++y) s += d.p_y[y] * squared_norm(w * d.l_vectors[y]);
  return 0.5 * eps * eps * s;
}

}  // namespace

TEST_CASE("problem instance validation") {
  const Pmf p_x({0.25, 0.75});
  const Channel s(Matrix{{0.275, 0.32}, {0.725, 0.68}});
  const Channel t(Matrix{{0.25, 0.4}, {0.75, 0.6}});
  CHECK_NOTHROW(ProblemInstance(p_x, s, t, 0.05, 0.75));
  CHECK_NOTHROW(ProblemInstance(p_x, s, t, 0.05, std::numeric_limits<double>::infinity()));
  CHECK_THROWS_AS(ProblemInstance(p_x, s, t, -0.1, 0.75), DomainError);
  CHECK_THROWS_AS(ProblemInstance(p_x, s, t, 0.05, 0.0), DomainError);
  CHECK_THROWS_AS(ProblemInstance(Pmf({0.0, 1.0}), s, t, 0.05, 0.75), SupportError);
  CHECK_THROWS_AS(ProblemInstance(p_x, Channel(Matrix{{0.5, 0.5}, {0.5, 0.5}}), t, 0.05, 0.75), ConditioningError);
  CHECK_THROWS_AS(ProblemInstance(p_x, Channel(Matrix{{0.5, 0.2, 0.1}, {0.5, 0.8, 0.9}}), t, 0.05, 0.75),
                  DimensionError);
  const ProblemInstance inst = reference_instance();
  CHECK(inst.p_s()[0] == Approx(0.30875));
  CHECK(inst.p_t()[0] == Approx(0.3625));
  CHECK(inst.with_budget(0.01, 0.2).eps() == 0.01);
}

TEST_CASE("operators of the reference example") {
  const GeometryOperators ops = build_operators(reference_instance());
  const double wty[2][2] = {{2.4610, -0.9206}, {-1.1599, 1.7355}};
  const double wxy[2][2] = {{16.7931, 11.8246}, {10.3371, 5.8669}};
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      CHECK(std::abs(ops.w_ty(r, c) - wty[r][c]) < 1e-3);
      CHECK(std::abs(std::abs(ops.w_xy(r, c)) - wxy[r][c]) < 1e-3);
    }
  // Printed with a minus sign; the definition and the unit-singular-value identity give +.
  CHECK(ops.w_xy(1, 0) > 0.0);
  Matrix flipped = ops.w_xy;
  flipped(1, 0) = -flipped(1, 0);
  CHECK(max_abs_diff(flipped.transpose() * (flipped * ops.sqrt_p_s), ops.sqrt_p_s) > 1.0);
}

TEST_CASE("operators of the identity instance") {
  const ProblemInstance inst(Pmf({0.5, 0.5}), Channel::identity(2), Channel::identity(2), 0.1, 1.0);
  const GeometryOperators ops = build_operators(inst);
  CHECK(max_abs_diff(ops.w_ty, Matrix::identity(2)) < 1e-15);
  CHECK(max_abs_diff(ops.w_xy, Matrix::identity(2)) < 1e-15);
  CHECK(ops.c1 == Approx(0.5 / std::sqrt(0.5)));
  CHECK(ops.c2 == Approx(0.5 / std::sqrt(0.5)));
}

TEST_CASE("unit singular value on random instances") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 2 + i % 2;
    const ProblemInstance inst = random_instance(rng, n, n);
    const GeometryOperators ops = build_operators(inst);
    CHECK(max_abs_diff(ops.w_ty.transpose() * (ops.w_ty * ops.sqrt_p_s), ops.sqrt_p_s) <= 1e-9);
    CHECK(max_abs_diff(ops.w_xy.transpose() * (ops.w_xy * ops.sqrt_p_s), ops.sqrt_p_s) <= 1e-9);
    // W^{X;Y} maps sqrt(P_S) to sqrt(P_X).
    CHECK(max_abs_diff(ops.w_xy * ops.sqrt_p_s, inst.p_x().sqrt()) <= 1e-9);
  }
}

TEST_CASE("perturb to conditional") {
  const Pmf p_s({0.3088, 0.6912});
  CHECK(perturb_to_conditional(p_s, Vector{0.0, 0.0}, 0.05) == p_s);
  const Vector l = {-std::sqrt(0.6912), std::sqrt(0.3088)};
  CHECK(std::abs(l[0] + 0.8314) < 1e-4);
  const Pmf out = perturb_to_conditional(p_s, l, 0.05);
  CHECK(std::abs(out[0] - 0.2857) < 1e-3);
  CHECK(std::abs(out[1] - 0.7144) < 1e-3);
  CHECK_THROWS_AS(perturb_to_conditional(p_s, l, 1.5), InfeasibleEpsilonError);
}

TEST_CASE("design checks") {
  const Vector sq = Pmf({0.30875, 0.69125}).sqrt();
  const Vector v = {sq[1], -sq[0]};
  CHECK_NOTHROW(check_design({Pmf({0.5, 0.5}), {v, scaled(v, -1.0)}}, sq));
  CHECK_THROWS_AS(check_design({Pmf({0.5, 0.5}), {v, v}}, sq), ValidationError);
  CHECK_THROWS_AS(check_design({Pmf({0.5, 0.5}), {scaled(v, 2.0), scaled(v, -2.0)}}, sq), ValidationError);
  CHECK_THROWS_AS(check_design({Pmf({0.5, 0.5}), {sq, scaled(sq, -1.0)}}, sq), ValidationError);
}

TEST_CASE("quadratic approximations") {
  const ProblemInstance inst = reference_instance();
  const GeometryOperators ops = build_operators(inst);
  const Vector v = unit_complement(inst);
  const PerturbationDesign d{Pmf({0.5, 0.5}), {v, scaled(v, -1.0)}};
  set_warning_handler([](std::string_view) {});
  CHECK(std::abs(approx_mi_xy(ops, d, 0.05) - 0.7026) < 1e-3);
  CHECK(std::abs(approx_mi_ty(ops, d, 0.05) - 0.5 * 0.0025 * 3.2034 * 3.2034) < 1e-4);
  const PerturbationDesign zero{Pmf({0.5, 0.5}), {Vector{0, 0}, Vector{0, 0}}};
  CHECK(approx_mi_ty(ops, zero, 0.05) == 0.0);
  CHECK(approx_mi_xy(ops, zero, 0.05) == 0.0);
  const double k = 1.7;
  const PerturbationDesign shrunk{d.p_y, {scaled(v, 1 / k), scaled(v, -1 / k)}};
  CHECK(approx_mi_ty(ops, shrunk, 0.05) == Approx(approx_mi_ty(ops, d, 0.05) / (k * k)));

  std::mt19937_64 rng(2);
  for (int i = 0; i < 20; ++i) {
    const ProblemInstance r = random_instance(rng, 3, 3);
    const GeometryOperators o = build_operators(r);
    const PerturbationDesign rd = random_design(rng, o.sqrt_p_s);
    CHECK(approx_mi_ty(o, rd, 0.01) == Approx(quadratic_objective(o.w_ty, rd, 0.01)).epsilon(1e-14));
    CHECK(approx_mi_xy(o, rd, 0.01) == Approx(quadratic_objective(o.w_xy, rd, 0.01)).epsilon(1e-14));
  }
  set_warning_handler(nullptr);
}

TEST_CASE("threshold warnings") {
  const ProblemInstance inst = reference_instance();
  const GeometryOperators ops = build_operators(inst);
  const Vector v = unit_complement(inst);
  const PerturbationDesign d{Pmf({0.5, 0.5}), {v, scaled(v, -1.0)}};
  int warnings = 0;
  set_warning_handler([&](std::string_view) { ++warnings; });
  approx_mi_xy(ops, d, 0.5 * ops.c2);
  CHECK(warnings == 0);
  approx_mi_xy(ops, d, 2.0 * ops.c2);
  CHECK(warnings == 1);
  approx_mi_ty(ops, d, 2.0 * ops.c1);
  CHECK(warnings == 2);
  set_warning_handler(nullptr);
}

TEST_CASE("threshold soundness and J norm bound") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 2 + i % 2;
    const ProblemInstance inst = random_instance(rng, n, n);
    const GeometryOperators ops = build_operators(inst);
    const PerturbationDesign d = random_design(rng, ops.sqrt_p_s);
    const RawConditionals raw = perturbed_conditionals(inst, d, 0.999 * ops.c2);
    for (std::size_t r = 0; r < raw.x_given_y.rows(); ++r)
      for (std::size_t c = 0; c < raw.x_given_y.cols(); ++c) CHECK(raw.x_given_y(r, c) > 0.0);
    for (const Vector& l : d.l_vectors) {
      Vector j(l.size());
      for (std::size_t s = 0; s < l.size(); ++s) j[s] = ops.sqrt_p_s[s] * l[s];
      CHECK(squared_norm(j) <= inst.p_s().max() + 1e-15);
    }
  }
}

TEST_CASE("approximation error probe") {
  const ProblemInstance inst = reference_instance();
  const GeometryOperators ops = build_operators(inst);
  const Vector v = unit_complement(inst);
  const PerturbationDesign d{Pmf({0.5, 0.5}), {v, scaled(v, -1.0)}};
  set_warning_handler([](std::string_view) {});

  const auto zero = approximation_error_probe(inst, d, std::vector<double>{0.0});
  CHECK(zero[0].exact_mi_ty == 0.0);
  CHECK(zero[0].approx_mi_ty == 0.0);
  CHECK(zero[0].ty_error_over_eps_sq == 0.0);

  const std::vector<double> grid = {0.04, 0.02, 0.01, 0.005, 0.0025};
  const auto rows = approximation_error_probe(inst, d, grid);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].ty_error_over_eps_sq < rows[i - 1].ty_error_over_eps_sq);
  CHECK(std::abs(rows[3].exact_mi_ty - rows[3].approx_mi_ty) < 1e-5);
  // P_{X|Y} leaves the simplex above eps ~ 0.0244 for this design.
  CHECK_FALSE(rows[0].xy_valid);
  CHECK(std::isnan(rows[0].exact_mi_xy));
  CHECK(rows[1].realizable());
  set_warning_handler(nullptr);
}
