#include <string>

#include "doctest.h"
#include "fairgeo/error.hpp"
#include "fairgeo/instance_io.hpp"

using namespace fairgeo;

namespace {

const char* kReference = R"({
  "name": "reference",
  "alphabet": {"x": 2, "s": 2, "t": 2},
  "p_x": [0.25, 0.75],
  "p_s_given_x": [[0.275, 0.725], [0.32, 0.68]],
  "p_t_given_x": [[0.25, 0.75], [0.4, 0.6]],
  "eps": 0.05,
  "rate": 0.75,
  "sweep": {"eps_grid": [0.005, 0.01], "rate_grid": [0.5, 0.75]},
  "oracle": {"grid_resolution": 300, "y_cardinality": 2, "measure": "mi"}
})";

std::string parse_error_text(const std::string& text) {
  try {
    parse_instance(text);
  } catch (const ParseError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("parse the reference file") {
  const InstanceFile f = parse_instance(kReference);
  CHECK(f.name == "reference");
  CHECK(f.p_x == Vector{0.25, 0.75});
  CHECK(f.p_s_given_x[1] == Vector{0.32, 0.68});
  CHECK(f.eps_grid.size() == 2);
  CHECK(f.rate_grid == std::vector<double>{0.5, 0.75});
  CHECK(f.grid_resolution == 300u);
  CHECK(f.measure == FairnessMeasure::MutualInformation);
  const ProblemInstance inst = f.to_instance();
  CHECK(inst.p_s_given_x()(1, 0) == 0.725);
  CHECK(inst.rate() == 0.75);
}

TEST_CASE("round trip") {
  const InstanceFile f = parse_instance(kReference);
  CHECK(parse_instance(serialize_instance(f)) == f);

  InstanceFile g = f;
  g.rate = std::numeric_limits<double>::infinity();
  g.p_x = {0.1 + 0.2, 0.7};  // non-terminating binary fractions survive
  g.p_st_given_x = std::vector<std::vector<Vector>>{{{0.1, 0.175}, {0.15, 0.575}}, {{0.2, 0.12}, {0.2, 0.48}}};
  CHECK(parse_instance(serialize_instance(g)) == g);
}

TEST_CASE("parse errors name the location") {
  const std::string syntax = parse_error_text("{\n  \"p_x\": [0.25, 0.75],\n  \"eps\": ,\n}");
  CHECK(syntax.find("line 3") != std::string::npos);
  CHECK(parse_error_text(R"({"p_x": [0.25, 0.75]})").find("p_s_given_x") != std::string::npos);
  const std::string typed = parse_error_text(
      R"({"p_x": [0.25, "x"], "p_s_given_x": [[1,0],[0,1]], "p_t_given_x": [[1,0],[0,1]], "eps": 0.1, "rate": 1})");
  CHECK(typed.find("p_x[1]") != std::string::npos);
  CHECK(parse_error_text(R"({"alphabet": {"x": 3}, "p_x": [0.25, 0.75], "p_s_given_x": [[1,0],[0,1]],
      "p_t_given_x": [[1,0],[0,1]], "eps": 0.1, "rate": 1})")
            .find("alphabet") != std::string::npos);
  CHECK_THROWS_AS(parse_measure("l1"), ParseError);
  CHECK_THROWS_AS(load_instance("/nonexistent/instance.json"), Error);
}

TEST_CASE("validation surfaces at conversion") {
  const InstanceFile bad = parse_instance(
      R"({"p_x": [0.5, 0.6], "p_s_given_x": [[1,0],[0,1]], "p_t_given_x": [[1,0],[0,1]], "eps": 0.1, "rate": 1})");
  CHECK_THROWS_AS(bad.to_instance(), ValidationError);
  const InstanceFile singular = parse_instance(
      R"({"p_x": [0.5, 0.5], "p_s_given_x": [[0.5,0.5],[0.5,0.5]], "p_t_given_x": [[1,0],[0,1]], "eps": 0.1, "rate": 1})");
  CHECK_THROWS_AS(singular.to_instance(), ConditioningError);
}
