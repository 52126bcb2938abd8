#include <cmath>
#include <random>

#include "doctest.h"
#include "fairgeo/dist.hpp"
#include "fairgeo/error.hpp"
#include "random_instances.hpp"

using namespace fairgeo;
using doctest::Approx;

namespace {

// Variant that divides the difference by q inside the square.
double chi_squared_literal(std::span<const double> p, std::span<const double> q) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::pow((p[i] - q[i]) / q[i], 2);
  return s;
}

}  // namespace

TEST_CASE("pmf validation refuses to renormalize") {
  CHECK_NOTHROW(Pmf({0.25, 0.75}));
  CHECK_NOTHROW(Pmf({0.25, 0.75 + 5e-13}));
  CHECK_THROWS_AS(Pmf({0.25, 0.75 + 1e-9}), ValidationError);
  CHECK_THROWS_AS(Pmf({-0.1, 1.1}), ValidationError);
  CHECK_THROWS_AS(Pmf({}), ValidationError);
  CHECK_THROWS_AS(Channel(Matrix{{0.5, 0.2}, {0.4, 0.8}}), ValidationError);
}

TEST_CASE("entropy") {
  CHECK(std::abs(entropy(Pmf({0.25, 0.75}), LogBase::Bits) - 0.8113) < 1e-4);
  CHECK(entropy(Pmf::uniform(4), LogBase::Nats) == Approx(std::log(4.0)));
  CHECK(entropy(Pmf({1.0, 0.0}), LogBase::Nats) == 0.0);
}

TEST_CASE("kl divergence") {
  const Pmf p({0.5, 0.5}), q({0.25, 0.75});
  CHECK(kl_divergence(p, p, LogBase::Nats) == 0.0);
  const double expected = 0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0);
  CHECK(kl_divergence(p, q, LogBase::Nats) == Approx(expected).epsilon(1e-14));
  CHECK(std::abs(kl_divergence(p, q, LogBase::Nats) - 0.1438) < 1e-4);
  CHECK(kl_divergence(q, p, LogBase::Nats) != Approx(kl_divergence(p, q, LogBase::Nats)));
  CHECK(kl_divergence(p, q, LogBase::Bits) == Approx(expected / std::log(2.0)));
  CHECK_THROWS_AS(kl_divergence(p, Pmf({1.0, 0.0}), LogBase::Nats), SupportError);
  CHECK_NOTHROW(kl_divergence(Pmf({1.0, 0.0}), p, LogBase::Nats));
}

TEST_CASE("chi squared") {
  const Pmf p({0.5, 0.5}), q({0.25, 0.75});
  CHECK(chi_squared(p, p) == 0.0);
  CHECK(chi_squared(p, q) == Approx(0.0625 / 0.25 + 0.0625 / 0.75).epsilon(1e-15));
  CHECK_THROWS_AS(chi_squared(p, Pmf({1.0, 0.0})), SupportError);

  // p = q + eps [sqrt q] L with L orthogonal to sqrt q and unit norm: chi^2 = eps^2.
  const Vector qv = {0.3088, 0.6912};
  const Vector l = {std::sqrt(qv[1]), -std::sqrt(qv[0])};
  const double eps = 0.01;
  Vector pv(2);
  for (int i = 0; i < 2; ++i) pv[i] = qv[i] + eps * std::sqrt(qv[i]) * l[i];
  CHECK(chi_squared(pv, qv) == Approx(1e-4).epsilon(1e-12));
}

TEST_CASE("chi squared variant with the square outside the ratio differs") {
  // Dividing inside the square weights by 1/q^2 instead of 1/q.
  const Vector p = {0.5, 0.5}, q = {0.25, 0.75};
  const double standard = chi_squared(p, q);
  const double literal = chi_squared_literal(p, q);
  CHECK(standard == Approx(1.0 / 3.0));
  CHECK(literal == Approx(0.0625 / 0.0625 + 0.0625 / 0.5625));
  CHECK(literal != Approx(standard));

  // Only the standard form satisfies chi^2 = eps^2 ||L||^2 for p = q + eps [sqrt q] L.
  const Vector qv = {0.30875, 0.69125};
  const Vector l = {std::sqrt(qv[1]), -std::sqrt(qv[0])};
  Vector pv(2);
  for (int i = 0; i < 2; ++i) pv[i] = qv[i] + 0.01 * std::sqrt(qv[i]) * l[i];
  CHECK(chi_squared(pv, qv) == Approx(1e-4));
  CHECK(std::abs(chi_squared_literal(pv, qv) - 1e-4) > 1e-5);
}

TEST_CASE("kl is half chi squared to second order") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector q = testing::random_simplex(rng, 2 + trial % 3);
    Vector d(q.size());
    double sum = 0.0;
    std::normal_distribution<double> g;
    for (std::size_t i = 0; i + 1 < d.size(); ++i) sum += (d[i] = 1e-3 * g(rng) * q[i]);
    d.back() = -sum;
    Vector p(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) p[i] = q[i] + d[i];
    const double ratio = 2.0 * kl_divergence(Pmf(p), Pmf(q), LogBase::Nats) / chi_squared(p, q);
    CHECK(std::abs(ratio - 1.0) < 0.01);
  }
}

TEST_CASE("parity gap") {
  CHECK(parity_gap(Channel(Matrix{{0.3, 0.3}, {0.7, 0.7}})) == 0.0);
  CHECK(parity_gap(Channel::identity(2)) == 1.0);
  CHECK(parity_gap(Channel(Matrix{{0.6, 0.5}, {0.4, 0.5}})) == Approx(0.1));
}

TEST_CASE("compose and apply") {
  const Channel s_given_x(Matrix{{0.275, 0.32}, {0.725, 0.68}});
  const Channel t_given_x(Matrix{{0.25, 0.4}, {0.75, 0.6}});
  const Pmf p_x({0.25, 0.75});
  CHECK(compose(Channel::identity(2), s_given_x) == s_given_x);
  const Pmf p_t = apply(t_given_x, p_x);
  CHECK(std::abs(p_t[0] - 0.3625) < 1e-4);
  CHECK(std::abs(p_t[1] - 0.6375) < 1e-4);
  const Pmf p_s = apply(s_given_x, p_x);
  CHECK(std::abs(p_s[0] - 0.3088) < 1e-4);
  CHECK(std::abs(p_s[1] - 0.6913) < 1e-4);
  CHECK_THROWS_AS(compose(Channel::identity(3), s_given_x), DimensionError);

  std::mt19937_64 rng(3);
  for (int i = 0; i < 10; ++i) {
    const Channel c = testing::random_channel(rng, 3, 4);
    const Pmf out = apply(c, Pmf(testing::random_simplex(rng, 4)));
    double sum = 0.0;
    for (double v : out.probs()) {
      CHECK(v >= 0.0);
      sum += v;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("bayes inversion") {
  const Pmf p_x({0.25, 0.75});
  CHECK(bayes_invert(Channel::identity(2), p_x, p_x) == Channel::identity(2));

  const Pmf p_y({0.4, 0.6});
  const Channel indep = bayes_invert(Channel(Matrix{{0.25, 0.25}, {0.75, 0.75}}), p_y, p_x);
  for (std::size_t x = 0; x < 2; ++x) {
    CHECK(indep(0, x) == Approx(0.4));
    CHECK(indep(1, x) == Approx(0.6));
  }

  CHECK_THROWS_AS(bayes_invert(Channel::identity(2), Pmf({0.5, 0.5}), p_x), ConsistencyError);

  // Round trip on random consistent triples.
  std::mt19937_64 rng(8);
  for (int i = 0; i < 20; ++i) {
    const Pmf px(testing::random_simplex(rng, 3));
    const Channel y_given_x = testing::random_channel(rng, 2, 3);
    const Pmf py = apply(y_given_x, px);
    const Channel x_given_y = bayes_invert(y_given_x, px, py);
    const Channel back = bayes_invert(x_given_y, py, px);
    CHECK(max_abs_diff(back.matrix(), y_given_x.matrix()) <= 1e-12);
  }
}

TEST_CASE("mutual information") {
  const Matrix product = joint_of(Pmf({0.3, 0.7}), Channel(Matrix{{0.2, 0.2}, {0.8, 0.8}}));
  CHECK(std::abs(mutual_information(product, LogBase::Nats)) <= 1e-12);
  const Matrix diag = joint_of(Pmf({0.25, 0.75}), Channel::identity(2));
  CHECK(mutual_information(diag, LogBase::Bits) == Approx(entropy(Pmf({0.25, 0.75}), LogBase::Bits)));

  std::mt19937_64 rng(1);
  for (int i = 0; i < 20; ++i) {
    const Matrix j = joint_of(Pmf(testing::random_simplex(rng, 3)), testing::random_channel(rng, 4, 3));
    CHECK(mutual_information(j, LogBase::Nats) >= 0.0);
  }
}

TEST_CASE("joint assembly") {
  const Pmf p_x({0.25, 0.75});
  const Channel s_given_x(Matrix{{0.275, 0.32}, {0.725, 0.68}});
  const Channel t_given_x(Matrix{{0.25, 0.4}, {0.75, 0.6}});
  const Channel y_given_x(Matrix{{0.1, 0.6}, {0.9, 0.4}});
  const JointDist j = JointDist::from_markov(p_x, s_given_x, t_given_x, y_given_x);
  CHECK(max_abs_diff(j.marginal(JointDist::Axis::X).vector(), p_x.vector()) <= 1e-15);
  CHECK(max_abs_diff(j.marginal(JointDist::Axis::S).vector(), apply(s_given_x, p_x).vector()) <= 1e-15);
  CHECK(max_abs_diff(j.marginal(JointDist::Axis::X, JointDist::Axis::Y), joint_of(p_x, y_given_x)) <= 1e-15);
  // S and T conditionally independent given X by default.
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t t = 0; t < 2; ++t)
      for (std::size_t x = 0; x < 2; ++x)
        CHECK(j(s, t, x, 0) == Approx(p_x[x] * s_given_x(s, x) * t_given_x(t, x) * y_given_x(0, x)));

  // Explicit coupling: S = T when both are binary and the coupling is diagonal.
  const std::vector<Matrix> coupling = {Matrix{{0.25, 0.0}, {0.0, 0.75}}, Matrix{{0.4, 0.0}, {0.0, 0.6}}};
  const Channel same(Matrix{{0.25, 0.4}, {0.75, 0.6}});
  const JointDist c = JointDist::from_markov(p_x, same, same, y_given_x, coupling);
  CHECK(c(0, 1, 0, 0) == 0.0);
  CHECK_THROWS_AS(JointDist::from_markov(p_x, s_given_x, t_given_x, y_given_x, coupling), ValidationError);
}
