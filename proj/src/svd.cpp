#include "fairgeo/svd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fairgeo/error.hpp"

namespace fairgeo {

bool canonicalize_sign(std::span<double> v, double zero_tol) {
  for (double x : v) {
    if (std::abs(x) <= zero_tol) continue;
    if (x > 0.0) return false;
    for (double& y : v) y = -y;
    return true;
  }
  return false;
}

SingularSystem svd_small(const Matrix& a, int max_sweeps) {
  for (double x : a.data())
    if (!std::isfinite(x)) throw NumericalError("svd_small: non-finite matrix entry");

  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  Matrix u = a;
  Matrix v = Matrix::identity(n);

  const double orth_tol = static_cast<double>(std::max<std::size_t>(m, 1)) * std::numeric_limits<double>::epsilon();
  double frob_sq = 0.0;
  for (double x : a.data()) frob_sq += x * x;
  // Columns this small are rounding noise (rank-deficient or wide input).
  const double negligible = std::max(frob_sq * 1e-30, 1e-300);

  bool converged = (n < 2);
  for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    bool rotated = false;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t r = 0; r < m; ++r) {
          alpha += u(r, i) * u(r, i);
          beta += u(r, j) * u(r, j);
          gamma += u(r, i) * u(r, j);
        }
        if (alpha <= negligible || beta <= negligible) continue;
        if (std::abs(gamma) <= orth_tol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t r = 0; r < m; ++r) {
          const double ui = u(r, i), uj = u(r, j);
          u(r, i) = c * ui - s * uj;
          u(r, j) = s * ui + c * uj;
        }
        for (std::size_t r = 0; r < n; ++r) {
          const double vi = v(r, i), vj = v(r, j);
          v(r, i) = c * vi - s * vj;
          v(r, j) = s * vi + c * vj;
        }
      }
    }
    converged = !rotated;
  }
  if (!converged) throw ConvergenceError("svd_small: Jacobi sweeps did not converge");

  Vector sigma(n);
  for (std::size_t j = 0; j < n; ++j) {
    double acc = 0.0;
    for (std::size_t r = 0; r < m; ++r) acc += u(r, j) * u(r, j);
    sigma[j] = std::sqrt(acc);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return sigma[x] > sigma[y]; });

  SingularSystem out{Vector(n), Matrix(n, n), Matrix(m, n)};
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = order[k];
    out.values[k] = sigma[j];
    Vector vj = v.column(j);
    Vector uj = u.column(j);
    if (sigma[j] > 0.0)
      for (double& x : uj) x /= sigma[j];
    else
      std::fill(uj.begin(), uj.end(), 0.0);
    if (canonicalize_sign(vj))
      for (double& x : uj) x = -x;
    out.right.set_column(k, vj);
    out.left.set_column(k, uj);
  }
  return out;
}

}  // namespace fairgeo
