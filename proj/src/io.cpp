#include "thermo/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace thermo::io {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
  throw InvalidInput(where + ": " + msg);
}

double parse_double(const std::string& s, const std::string& where) {
  std::string t = s;
  const auto b = t.find_first_not_of(" \t\r");
  const auto e = t.find_last_not_of(" \t\r");
  if (b == std::string::npos) fail(where, "empty number");
  t = t.substr(b, e - b + 1);
  double v = 0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size()) {
    if (t == "inf" || t == "-inf" || t == "nan") fail(where, "non-finite number '" + t + "'");
    fail(where, "cannot parse number '" + t + "'");
  }
  return v;
}

double number_at(const Json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(where, "expected a finite number");
  return v;
}

void check_keys(const Json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) fail(where + "/" + it.key(), "unknown key");
}

const Json& require(const Json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) fail(where, "missing key '" + key + "'");
  return j.at(key);
}

}  // namespace

std::string format_number(double v) {
  if (v == 0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

Json number(double v) {
  if (!std::isfinite(v)) return Json(nullptr);
  return Json(parse_double(format_number(v), "number"));
}

Json to_json(const RealVector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number(v[i]));
  return a;
}

Json to_json(const RealMatrix& m) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(to_json(RealVector(m.row(i).transpose())));
  return a;
}

Json to_json(const ComplexMatrix& m) {
  return Json{{"re", to_json(RealMatrix(m.real()))}, {"im", to_json(RealMatrix(m.imag()))}};
}

Json to_json(const toy::Schedule& s) {
  Json a = Json::array();
  for (const auto& seg : s) a.push_back(Json{{"perm", seg.perm}, {"dt", number(seg.dt)}});
  return a;
}

RealVector vector_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of numbers");
  RealVector v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v[i] = number_at(j[i], where + "/" + std::to_string(i));
  return v;
}

RealMatrix real_matrix_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a nonempty array of rows");
  const size_t cols = j[0].is_array() ? j[0].size() : 0;
  RealMatrix m(j.size(), cols);
  for (size_t i = 0; i < j.size(); ++i) {
    const RealVector row = vector_from_json(j[i], where + "/" + std::to_string(i));
    if (static_cast<size_t>(row.size()) != cols) fail(where + "/" + std::to_string(i), "ragged matrix row");
    m.row(i) = row.transpose();
  }
  return m;
}

ComplexMatrix complex_matrix_from_json(const Json& j, const std::string& where) {
  if (j.is_array()) return real_matrix_from_json(j, where).cast<Complex>();
  check_keys(j, {"re", "im"}, where);
  const RealMatrix re = real_matrix_from_json(require(j, "re", where), where + "/re");
  RealMatrix im = RealMatrix::Zero(re.rows(), re.cols());
  if (j.contains("im")) im = real_matrix_from_json(j.at("im"), where + "/im");
  if (im.rows() != re.rows() || im.cols() != re.cols()) fail(where, "re and im shapes differ");
  ComplexMatrix m(re.rows(), re.cols());
  m.real() = re;
  m.imag() = im;
  return m;
}

toy::Schedule schedule_from_json(const Json& j, const std::string& where) {
  if (!j.is_array()) fail(where, "expected an array of segments");
  toy::Schedule s;
  for (size_t k = 0; k < j.size(); ++k) {
    const std::string at = where + "/" + std::to_string(k);
    check_keys(j[k], {"perm", "dt"}, at);
    const Json& p = require(j[k], "perm", at);
    if (!p.is_array()) fail(at + "/perm", "expected an integer array");
    Permutation perm;
    for (size_t i = 0; i < p.size(); ++i) {
      if (!p[i].is_number_integer()) fail(at + "/perm/" + std::to_string(i), "expected an integer");
      perm.push_back(p[i].get<int>());
    }
    if (!is_permutation(perm)) fail(at + "/perm", "not a permutation of 0..n-1");
    const double dt = number_at(require(j[k], "dt", at), at + "/dt");
    if (dt < 0) fail(at + "/dt", "duration must be nonnegative");
    s.push_back({perm, dt});
  }
  return s;
}

RealVector parse_vector(const std::string& text, const std::string& what) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) vals.push_back(parse_double(item, what));
  if (vals.empty()) fail(what, "empty vector");
  return Eigen::Map<RealVector>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

std::string write_csv(const CsvTable& t) {
  std::string out;
  for (size_t i = 0; i < t.header.size(); ++i) out += (i ? "," : "") + t.header[i];
  out += "\n";
  for (const auto& row : t.rows) {
    for (size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + format_number(row[i]);
    out += "\n";
  }
  return out;
}

CsvTable read_csv(const std::string& text) {
  CsvTable t;
  std::stringstream ss(text);
  std::string line;
  size_t lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string cell;
    if (t.header.empty()) {
      while (std::getline(ls, cell, ',')) t.header.push_back(cell);
      continue;
    }
    std::vector<double> row;
    while (std::getline(ls, cell, ','))
      row.push_back(parse_double(cell, "csv line " + std::to_string(lineno)));
    if (row.size() != t.header.size()) fail("csv line " + std::to_string(lineno), "wrong number of columns");
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::string trajectory_csv(const toy::Trajectory& tr) {
  CsvTable t;
  t.header.push_back("t");
  const int n = tr.empty() ? 0 : tr.front().x.size();
  for (int i = 0; i < n; ++i) t.header.push_back("x" + std::to_string(i + 1));
  for (const auto& p : tr) {
    std::vector<double> row{p.t};
    for (int i = 0; i < n; ++i) row.push_back(p.x[i]);
    t.rows.push_back(std::move(row));
  }
  return write_csv(t);
}

toy::Trajectory trajectory_from_csv(const std::string& text) {
  const CsvTable t = read_csv(text);
  if (t.header.empty() || t.header[0] != "t") fail("trajectory csv", "first column must be t");
  toy::Trajectory tr;
  for (const auto& row : t.rows) {
    RealVector x(row.size() - 1);
    for (size_t i = 1; i < row.size(); ++i) x[i - 1] = row[i];
    tr.push_back({row[0], ProbVector(x, 1e-9)});
  }
  return tr;
}

Json bound_json(const toy::ReachBound& b) {
  Json v = Json::array();
  for (const auto& x : b.vertices()) v.push_back(to_json(x));
  return Json{{"z", to_json(b.z().entries())}, {"vertices", v}};
}

Json polytope_json(const RealVector& d, const RealVector& y) {
  const thermomaj::MajPolytope poly(d, y);
  Json hs = Json::array();
  for (const auto& h : poly.halfspaces()) hs.push_back(Json{{"m", h.mask}, {"bound", number(h.bound)}});
  Json out{{"total", number(poly.total())}, {"halfspaces", hs}};
  if (poly.dim() <= 9) {
    Json v = Json::array();
    for (const auto& x : poly.vertices()) v.push_back(to_json(x));
    out["vertices"] = v;
  }
  return out;
}

ProblemFile parse_problem(const Json& j) {
  check_keys(j, {"thermal", "toy", "qubit", "schedule", "H0_diag", "T", "H_tot", "H_B", "H"}, "");
  ProblemFile pf;
  auto thermal_from = [](const Json& s, const std::string& where) {
    ThermalSection t;
    t.h0_diag = vector_from_json(require(s, "H0_diag", where), where + "/H0_diag");
    t.temperature = number_at(require(s, "T", where), where + "/T");
    if (!(t.temperature > 0)) fail(where + "/T", "temperature must be positive");
    return t;
  };
  if (j.contains("thermal")) {
    check_keys(j["thermal"], {"H0_diag", "T"}, "/thermal");
    pf.thermal = thermal_from(j["thermal"], "/thermal");
  } else if (j.contains("H0_diag") || j.contains("T")) {
    pf.thermal = thermal_from(j, "");
  }
  if (j.contains("H_tot") || j.contains("H_B") || j.contains("H")) {
    GeneratorSection g;
    g.h_tot = complex_matrix_from_json(require(j, "H_tot", ""), "/H_tot");
    g.h_bath = complex_matrix_from_json(require(j, "H_B", ""), "/H_B");
    g.h = complex_matrix_from_json(require(j, "H", ""), "/H");
    pf.generator = g;
  }
  if (j.contains("toy")) {
    const Json& s = j["toy"];
    check_keys(s, {"a", "B", "n"}, "/toy");
    ToySection t;
    if (s.contains("a") == s.contains("B")) fail("/toy", "give exactly one of 'a' or 'B'");
    if (s.contains("a")) t.a = number_at(s["a"], "/toy/a");
    if (s.contains("B")) t.b = real_matrix_from_json(s["B"], "/toy/B");
    if (s.contains("n")) {
      if (!s["n"].is_number_integer()) fail("/toy/n", "expected an integer");
      t.n = s["n"].get<int>();
    }
    pf.toy = t;
  }
  if (j.contains("qubit")) {
    const Json& s = j["qubit"];
    check_keys(s, {"mu", "eps", "c"}, "/qubit");
    QubitSection q;
    q.mu = number_at(require(s, "mu", "/qubit"), "/qubit/mu");
    q.eps = number_at(require(s, "eps", "/qubit"), "/qubit/eps");
    if (s.contains("c")) {
      const Json& c = s["c"];
      if (c.is_number()) {
        q.c = number_at(c, "/qubit/c");
      } else {
        check_keys(c, {"re", "im"}, "/qubit/c");
        q.c = Complex(number_at(require(c, "re", "/qubit/c"), "/qubit/c/re"),
                      c.contains("im") ? number_at(c["im"], "/qubit/c/im") : 0.0);
      }
    }
    pf.qubit = q;
  }
  if (j.contains("schedule")) pf.schedule = schedule_from_json(j["schedule"], "/schedule");
  return pf;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  out << text;
}

ProblemFile read_problem_file(const std::string& path) {
  Json j;
  try {
    j = Json::parse(read_text_file(path));
  } catch (const Json::parse_error& e) {
    throw InvalidInput(path + ": " + e.what());
  }
  return parse_problem(j);
}

}  // namespace thermo::io
