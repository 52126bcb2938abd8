#include "fairgeo/instance_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "fairgeo/error.hpp"
#include "fairgeo/oracle.hpp"
#include "json.hpp"

namespace fairgeo {

namespace {

using nlohmann::json;

[[noreturn]] void field_error(const std::string& path, const std::string& what) {
  throw ParseError("field '" + path + "': " + what);
}

double as_number(const json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  }
  field_error(path, "expected a number");
}

std::size_t as_count(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() < 0) field_error(path, "expected a nonnegative integer");
  return j.get<std::size_t>();
}

Vector as_vector(const json& j, const std::string& path) {
  if (!j.is_array()) field_error(path, "expected a list of numbers");
  Vector out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<Vector> as_columns(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) field_error(path, "expected a non-empty list of columns");
  std::vector<Vector> cols;
  for (std::size_t i = 0; i < j.size(); ++i) {
    cols.push_back(as_vector(j[i], path + "[" + std::to_string(i) + "]"));
    if (cols.back().size() != cols.front().size())
      field_error(path + "[" + std::to_string(i) + "]", "column length differs from column 0");
  }
  return cols;
}

const json& require(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) field_error(key, "missing");
  return *it;
}

void check_size(const json& alphabet, const char* key, std::size_t actual, const char* source) {
  auto it = alphabet.find(key);
  if (it == alphabet.end()) return;
  const std::size_t declared = as_count(*it, std::string("alphabet.") + key);
  if (declared != actual)
    field_error(std::string("alphabet.") + key, "declares " + std::to_string(declared) + " but " + source +
                                                    " has " + std::to_string(actual));
}

json number_json(double v) {
  if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
  return json(v);
}

json vector_json(const Vector& v) {
  json out = json::array();
  for (double x : v) out.push_back(number_json(x));
  return out;
}

std::string line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

FairnessMeasure parse_measure(std::string_view text) {
  if (text == "chi2" || text == "chi_squared_pointwise") return FairnessMeasure::ChiSquaredPointwise;
  if (text == "mi" || text == "mutual_information") return FairnessMeasure::MutualInformation;
  throw ParseError("unknown fairness measure '" + std::string(text) + "' (expected chi2 or mi)");
}

InstanceFile parse_instance(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError("instance: syntax error at " + line_col(text, e.byte) + ": " + e.what());
  }
  if (!root.is_object()) throw ParseError("instance: top level must be an object");

  InstanceFile f;
  if (auto it = root.find("name"); it != root.end()) {
    if (!it->is_string()) field_error("name", "expected a string");
    f.name = it->get<std::string>();
  }
  f.p_x = as_vector(require(root, "p_x"), "p_x");
  f.p_s_given_x = as_columns(require(root, "p_s_given_x"), "p_s_given_x");
  f.p_t_given_x = as_columns(require(root, "p_t_given_x"), "p_t_given_x");
  f.eps = as_number(require(root, "eps"), "eps");
  f.rate = as_number(require(root, "rate"), "rate");

  if (f.p_s_given_x.size() != f.p_x.size())
    field_error("p_s_given_x", "needs one column per symbol of X (" + std::to_string(f.p_x.size()) + ")");
  if (f.p_t_given_x.size() != f.p_x.size())
    field_error("p_t_given_x", "needs one column per symbol of X (" + std::to_string(f.p_x.size()) + ")");

  if (auto it = root.find("alphabet"); it != root.end()) {
    if (!it->is_object()) field_error("alphabet", "expected an object");
    check_size(*it, "x", f.p_x.size(), "p_x");
    check_size(*it, "s", f.p_s_given_x.front().size(), "p_s_given_x");
    check_size(*it, "t", f.p_t_given_x.front().size(), "p_t_given_x");
  }

  if (auto it = root.find("p_st_given_x"); it != root.end()) {
    if (!it->is_array() || it->size() != f.p_x.size())
      field_error("p_st_given_x", "needs one |S| x |T| block per symbol of X");
    std::vector<std::vector<Vector>> blocks;
    for (std::size_t x = 0; x < it->size(); ++x)
      blocks.push_back(as_columns((*it)[x], "p_st_given_x[" + std::to_string(x) + "]"));
    f.p_st_given_x = std::move(blocks);
  }

  if (auto it = root.find("sweep"); it != root.end()) {
    if (!it->is_object()) field_error("sweep", "expected an object");
    if (auto g = it->find("eps_grid"); g != it->end()) f.eps_grid = as_vector(*g, "sweep.eps_grid");
    if (auto g = it->find("rate_grid"); g != it->end()) f.rate_grid = as_vector(*g, "sweep.rate_grid");
  }

  if (auto it = root.find("oracle"); it != root.end()) {
    if (!it->is_object()) field_error("oracle", "expected an object");
    if (auto g = it->find("grid_resolution"); g != it->end())
      f.grid_resolution = as_count(*g, "oracle.grid_resolution");
    if (auto g = it->find("y_cardinality"); g != it->end()) f.y_cardinality = as_count(*g, "oracle.y_cardinality");
    if (auto g = it->find("measure"); g != it->end()) {
      if (!g->is_string()) field_error("oracle.measure", "expected \"chi2\" or \"mi\"");
      f.measure = parse_measure(g->get<std::string>());
    }
  }
  return f;
}

InstanceFile load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open instance file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_instance(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

ProblemInstance InstanceFile::to_instance() const {
  std::optional<std::vector<Matrix>> coupling;
  if (p_st_given_x) {
    coupling.emplace();
    for (const auto& rows : *p_st_given_x) {
      Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
      for (std::size_t s = 0; s < rows.size(); ++s)
        for (std::size_t t = 0; t < rows[s].size(); ++t) m(s, t) = rows[s][t];
      coupling->push_back(std::move(m));
    }
  }
  return ProblemInstance(Pmf(p_x), Channel(Matrix::from_columns(p_s_given_x)),
                         Channel(Matrix::from_columns(p_t_given_x)), eps, rate, std::move(coupling));
}

std::string serialize_instance(const InstanceFile& f) {
  json root = json::object();
  if (f.name) root["name"] = *f.name;
  root["alphabet"] = {{"x", f.p_x.size()},
                      {"s", f.p_s_given_x.empty() ? 0 : f.p_s_given_x.front().size()},
                      {"t", f.p_t_given_x.empty() ? 0 : f.p_t_given_x.front().size()}};
  root["p_x"] = vector_json(f.p_x);
  root["p_s_given_x"] = json::array();
  for (const auto& c : f.p_s_given_x) root["p_s_given_x"].push_back(vector_json(c));
  root["p_t_given_x"] = json::array();
  for (const auto& c : f.p_t_given_x) root["p_t_given_x"].push_back(vector_json(c));
  if (f.p_st_given_x) {
    json blocks = json::array();
    for (const auto& rows : *f.p_st_given_x) {
      json b = json::array();
      for (const auto& r : rows) b.push_back(vector_json(r));
      blocks.push_back(b);
    }
    root["p_st_given_x"] = blocks;
  }
  root["eps"] = number_json(f.eps);
  root["rate"] = number_json(f.rate);
  if (!f.eps_grid.empty() || !f.rate_grid.empty()) {
    json sweep = json::object();
    if (!f.eps_grid.empty()) sweep["eps_grid"] = vector_json(f.eps_grid);
    if (!f.rate_grid.empty()) sweep["rate_grid"] = vector_json(f.rate_grid);
    root["sweep"] = sweep;
  }
  if (f.grid_resolution || f.y_cardinality || f.measure) {
    json oracle = json::object();
    if (f.grid_resolution) oracle["grid_resolution"] = *f.grid_resolution;
    if (f.y_cardinality) oracle["y_cardinality"] = *f.y_cardinality;
    if (f.measure) oracle["measure"] = measure_name(*f.measure);
    root["oracle"] = oracle;
  }
  return root.dump(2) + "\n";
}

}  // namespace fairgeo
