#include <Eigen/Dense>
#include <random>

#include "doctest.h"
#include "fairgeo/error.hpp"
#include "fairgeo/matrix.hpp"
#include "fairgeo/svd.hpp"

using namespace fairgeo;
using doctest::Approx;

namespace {

Matrix random_matrix(std::mt19937_64& rng, std::size_t r, std::size_t c) {
  std::normal_distribution<double> g;
  Matrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = g(rng);
  return m;
}

Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  return e;
}

}  // namespace

TEST_CASE("matrix basics") {
  const Matrix a{{1, 2}, {3, 4}};
  CHECK(a(1, 0) == 3);
  CHECK(a.transpose()(0, 1) == 3);
  CHECK((a * Matrix::identity(2)) == a);
  const Vector v = a * Vector{1, 1};
  CHECK(v == Vector{3, 7});
  CHECK(dot(Vector{1, 2}, Vector{3, 4}) == 11);
  CHECK(norm(Vector{3, 4}) == 5);
  CHECK(axpy(Vector{1, 1}, 2.0, Vector{1, -1}) == Vector{3, -1});
  CHECK(Matrix::from_columns({{1, 3}, {2, 4}}) == a);
  CHECK(a.column(1) == Vector{2, 4});
  CHECK(Matrix::diagonal(Vector{2, 3})(1, 1) == 3);
}

TEST_CASE("lu determinant and inverse") {
  const Matrix a{{0.275, 0.32}, {0.725, 0.68}};
  CHECK(determinant(a) == Approx(-0.045));
  CHECK(max_abs_diff(a * inverse(a), Matrix::identity(2)) < 1e-14);
  CHECK_THROWS_AS(inverse(Matrix{{1, 2}, {2, 4}}), ConditioningError);

  std::mt19937_64 rng(4);
  for (int i = 0; i < 20; ++i) {
    const std::size_t n = 2 + i % 4;
    const Matrix m = random_matrix(rng, n, n);
    CHECK(determinant(m) == Approx(to_eigen(m).determinant()).epsilon(1e-10));
    CHECK(max_abs_diff(m * inverse(m), Matrix::identity(n)) < 1e-9);
  }
}

TEST_CASE("jacobi svd agrees with an independent solver") {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 50; ++i) {
    const std::size_t r = 2 + i % 4, c = 2 + (i / 4) % 4;
    const Matrix m = random_matrix(rng, r, c);
    const SingularSystem s = svd_small(m);
    Eigen::JacobiSVD<Eigen::MatrixXd> ref(to_eigen(m));
    const auto sv = ref.singularValues();
    for (Eigen::Index k = 0; k < sv.size(); ++k) CHECK(s.values[k] == Approx(sv[k]).epsilon(1e-12).scale(1.0));
    for (std::size_t k = sv.size(); k < s.values.size(); ++k) CHECK(std::abs(s.values[k]) < 1e-12);

    // Reconstruction and orthonormal right vectors.
    CHECK(max_abs_diff(s.left * Matrix::diagonal(s.values) * s.right.transpose(), m) < 1e-12);
    CHECK(max_abs_diff(s.right.transpose() * s.right, Matrix::identity(c)) < 1e-12);
  }
}

TEST_CASE("svd sign convention and ordering") {
  const SingularSystem s = svd_small(Matrix{{0.0, 2.0}, {3.0, 0.0}});
  CHECK(s.values[0] == Approx(3.0));
  CHECK(s.values[1] == Approx(2.0));
  for (std::size_t k = 0; k < 2; ++k) {
    const Vector v = s.right.column(k);
    const double first = std::abs(v[0]) > 1e-12 ? v[0] : v[1];
    CHECK(first > 0);
  }
  Vector v{-0.0, -2.0};
  CHECK(canonicalize_sign(v));
  CHECK(v[1] == 2.0);
  CHECK_THROWS_AS(svd_small(Matrix{{std::nan(""), 0.0}, {0.0, 1.0}}), NumericalError);
}
