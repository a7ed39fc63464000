#pragma once

#include "thermo/core.hpp"
#include "thermo/toy.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace thermo::io {

using Json = nlohmann::json;

// 12 significant digits, '.' separator regardless of locale.
std::string format_number(double v);
// Number rounded to 12 significant digits, as a JSON value.
Json number(double v);

Json to_json(const RealVector& v);
Json to_json(const RealMatrix& m);
Json to_json(const ComplexMatrix& m);  // {"re": [[...]], "im": [[...]]}
Json to_json(const toy::Schedule& s);

RealVector vector_from_json(const Json& j, const std::string& where);
RealMatrix real_matrix_from_json(const Json& j, const std::string& where);
// Accepts {"re","im"} or a plain real nested array.
ComplexMatrix complex_matrix_from_json(const Json& j, const std::string& where);
toy::Schedule schedule_from_json(const Json& j, const std::string& where = "/schedule");

// "0.5,0.3,0.2"
RealVector parse_vector(const std::string& text, const std::string& what);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

std::string write_csv(const CsvTable& t);
CsvTable read_csv(const std::string& text);

std::string trajectory_csv(const toy::Trajectory& tr);
toy::Trajectory trajectory_from_csv(const std::string& text);

Json bound_json(const toy::ReachBound& b);
Json polytope_json(const RealVector& d, const RealVector& y);

struct ThermalSection {
  RealVector h0_diag;
  double temperature = 1;
};

struct ToySection {
  std::optional<double> a;
  std::optional<RealMatrix> b;
  int n = 3;
};

struct GeneratorSection {
  ComplexMatrix h_tot, h_bath, h;
};

struct QubitSection {
  double mu = 0, eps = 0;
  Complex c = 1;
};

struct ProblemFile {
  std::optional<ThermalSection> thermal;
  std::optional<ToySection> toy;
  std::optional<QubitSection> qubit;
  std::optional<toy::Schedule> schedule;
  std::optional<GeneratorSection> generator;
};

// Unknown keys and malformed values raise InvalidInput naming the JSON path.
ProblemFile parse_problem(const Json& j);
ProblemFile read_problem_file(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace thermo::io
