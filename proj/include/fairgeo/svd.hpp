#pragma once

#include <cstddef>

#include "fairgeo/matrix.hpp"

namespace fairgeo {

/// Full singular system of an m x n matrix: A = U diag(values) V^T.
///
/// `values` has n entries sorted in descending order (trailing zeros when m < n).
/// Column j of `right` is the right singular vector for values[j]; the columns of
/// `right` form an orthonormal basis of R^n. Column j of `left` is A v_j / sigma_j,
/// or zero when sigma_j vanishes.
///
/// Each right vector is sign-normalized so its first nonzero component is positive,
/// and the matching left vector is flipped with it.
struct SingularSystem {
  Vector values;
  Matrix right;
  Matrix left;
};

/// One-sided (Hestenes) Jacobi SVD. Intended for the small dense matrices used here
/// (dimensions up to a few dozen). Throws NumericalError on non-finite input and
/// ConvergenceError if the sweep limit is reached.
SingularSystem svd_small(const Matrix& a, int max_sweeps = 80);

/// Flips `v` in place so the first component with magnitude above `zero_tol` is positive.
/// Returns true when a flip happened.
bool canonicalize_sign(std::span<double> v, double zero_tol = 1e-12);

}  // namespace fairgeo
