#pragma once

#include <cstddef>
#include <cstdint>

#include "fairgeo/dist.hpp"
#include "fairgeo/geometry.hpp"
#include "fairgeo/kernels.hpp"

namespace fairgeo {

inline constexpr double kFeasibilityTolerance = 1e-12;

const char* measure_name(FairnessMeasure m) noexcept;

/// Exhaustive-search settings.
///
/// Each column of P_{Y|X} ranges over the simplex lattice with step 1/grid_resolution,
/// endpoints included, so a binary output has grid_resolution + 1 values per parameter
/// and doubling the resolution refines the previous grid.
struct OracleConfig {
  std::size_t grid_resolution = 500;
  std::size_t y_cardinality = 2;
  FairnessMeasure measure = FairnessMeasure::ChiSquaredPointwise;
  unsigned threads = 0;  ///< 0 = hardware concurrency
  double feasibility_tol = kFeasibilityTolerance;
  std::uint64_t max_evaluations = 200'000'000;
};

void validate(const OracleConfig& cfg);

struct ChannelEvaluation {
  double objective_nats = 0.0;  ///< exact I(Y;T)
  bool feasible = false;
  double mi_xy_nats = 0.0;
  double mi_sy_nats = 0.0;
  double max_chi2 = 0.0;  ///< over y with P_Y(y) > 0
  Vector p_y;
};

ChannelEvaluation evaluate_channel(const ProblemInstance& inst, const Channel& p_y_given_x,
                                   FairnessMeasure measure, double tol = kFeasibilityTolerance);

struct OracleResult {
  double best_value_nats = 0.0;
  double best_value_bits = 0.0;
  Channel best_channel = Channel::identity(1);
  std::uint64_t evaluated_count = 0;
  std::uint64_t feasible_count = 0;
};

/// Maximizes I(Y;T) over the channel grid subject to the selected fairness measure and
/// I(X;Y) <= rate. Ties go to the lexicographically smallest channel (column 0 first).
/// Binary X with binary Y uses the vectorized row kernel.
OracleResult grid_search(const ProblemInstance& inst, const OracleConfig& cfg);

/// Brute-force maximum of the quadratic surrogate over symmetric binary designs
/// L_1 = -L_2 = c u, P_Y uniform, u sampled on the unit sphere orthogonal to sqrt(P_S)
/// and c the largest scale in [0, 1] meeting the rate budget. The zero design is always
/// included. |S| <= 4.
double quadratic_oracle(const GeometryOperators& ops, double eps, double rate, std::size_t sphere_samples);

}  // namespace fairgeo
