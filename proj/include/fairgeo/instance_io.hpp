#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fairgeo/geometry.hpp"
#include "fairgeo/kernels.hpp"

namespace fairgeo {

/// On-disk problem description (JSON).
///
///   {
///     "alphabet":    {"x": 2, "s": 2, "t": 2},          optional, checked when present
///     "p_x":         [0.25, 0.75],
///     "p_s_given_x": [[0.275, 0.725], [0.32, 0.68]],    one inner list per x (a column)
///     "p_t_given_x": [[0.25, 0.75], [0.4, 0.6]],
///     "p_st_given_x": [ [[..], ..], .. ],               optional |S| x |T| block per x
///     "eps": 0.05,
///     "rate": 0.75,                                     number or "inf"
///     "sweep":  {"eps_grid": [...], "rate_grid": [...]},
///     "oracle": {"grid_resolution": 500, "y_cardinality": 2, "measure": "chi2"}
///   }
///
/// Structural problems (bad JSON, missing or mistyped fields, shape mismatches) raise
/// ParseError with a line number or a field path. Probability-level problems surface
/// later, from `to_instance`, as ValidationError / ConditioningError.
struct InstanceFile {
  std::optional<std::string> name;
  Vector p_x;
  std::vector<Vector> p_s_given_x;  ///< columns
  std::vector<Vector> p_t_given_x;  ///< columns
  std::optional<std::vector<std::vector<Vector>>> p_st_given_x;  ///< [x][s][t]
  double eps = 0.0;
  double rate = 0.0;
  std::vector<double> eps_grid;
  std::vector<double> rate_grid;
  std::optional<std::size_t> grid_resolution;
  std::optional<std::size_t> y_cardinality;
  std::optional<FairnessMeasure> measure;

  ProblemInstance to_instance() const;

  friend bool operator==(const InstanceFile&, const InstanceFile&) = default;
};

InstanceFile parse_instance(std::string_view text);
InstanceFile load_instance(const std::filesystem::path& path);
/// Pretty-printed JSON; doubles are written round-trip exact.
std::string serialize_instance(const InstanceFile& file);

FairnessMeasure parse_measure(std::string_view text);

}  // namespace fairgeo
