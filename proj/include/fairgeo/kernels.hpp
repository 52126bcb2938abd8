#pragma once

// Data-parallel inner loops of the exhaustive-search oracle.
//
// Every kernel has a scalar reference in `kernels::scalar` and, on x86-64, an AVX2
// variant in `kernels::avx2` compiled with per-function target attributes so the rest
// of the library stays baseline x86-64. The unqualified entry points dispatch on the
// active backend, which is picked once at startup (AVX2 when the CPU reports it) and
// can be forced to scalar with FAIRGEO_SIMD=scalar or `set_backend`.

#include <cstdint>
#include <span>

#include "fairgeo/matrix.hpp"

namespace fairgeo {

enum class FairnessMeasure {
  ChiSquaredPointwise,  ///< chi^2(P_{S|y}; P_S) <= eps^2 for every y in the support of Y
  MutualInformation,    ///< I(S;Y) <= eps^2
};

namespace kernels {

enum class Backend { Scalar, Avx2 };

bool avx2_supported() noexcept;
Backend active_backend() noexcept;
/// Throws ValidationError when asking for AVX2 on a CPU without it.
void set_backend(Backend backend);
const char* backend_name(Backend backend) noexcept;

/// Binary-input, binary-output channel family P(Y=0|X=0) = a, P(Y=0|X=1) = b,
/// evaluated against a fixed instance. Columns are the conditional pmfs given x = 0, 1.
struct BinaryChannelModel {
  double px0 = 0.5;
  double px1 = 0.5;
  Vector s_given_x0, s_given_x1;
  Vector t_given_x0, t_given_x1;
  Vector p_s, p_t;
  double eps_sq = 0.0;
  double rate = 0.0;
  FairnessMeasure measure = FairnessMeasure::ChiSquaredPointwise;
  double tol = 1e-12;
};

/// For a fixed `a` and every b in `b_values`: objective[i] = I(T;Y) in nats and
/// feasible[i] = 1 when both the fairness and the rate constraint hold (within tol).
void evaluate_row(const BinaryChannelModel& model, double a, std::span<const double> b_values,
                  std::span<double> objective, std::span<std::uint8_t> feasible);

/// Element-wise natural log.
void log(std::span<const double> in, std::span<double> out);

namespace scalar {
void evaluate_row(const BinaryChannelModel& model, double a, std::span<const double> b_values,
                  std::span<double> objective, std::span<std::uint8_t> feasible);
void log(std::span<const double> in, std::span<double> out);
}  // namespace scalar

namespace avx2 {
// Only callable when avx2_supported(). Tails shorter than one register go through the
// scalar reference.
void evaluate_row(const BinaryChannelModel& model, double a, std::span<const double> b_values,
                  std::span<double> objective, std::span<std::uint8_t> feasible);
void log(std::span<const double> in, std::span<double> out);
}  // namespace avx2

}  // namespace kernels
}  // namespace fairgeo
