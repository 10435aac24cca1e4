#include "qnewton/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

#include "qnewton/error.hpp"

namespace qnewton {

namespace {

using nlohmann::json;

[[noreturn]] void parse_error(const std::string& what) { throw Error(ErrorCode::kParseError, what); }

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& cell, std::size_t line_no) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = first + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    parse_error("line " + std::to_string(line_no) + ": '" + cell + "' is not a finite number");
  }
  return v;
}

// Typed accessors with uniform error reporting.
template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    parse_error(std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
T require(const json& j, const char* key) {
  if (!j.contains(key)) parse_error(std::string("missing field '") + key + "'");
  return get_or<T>(j, key, T{});
}

ScaleBounds interval(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    parse_error(std::string(what) + " must be a [L, U] pair");
  }
  return ScaleBounds{j[0].get<double>(), j[1].get<double>()};
}

Matrix matrix_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) parse_error(std::string(what) + " must be a nonempty 2-D array");
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) parse_error(std::string(what) + " rows must be nonempty arrays");
  std::vector<double> v;
  v.reserve(rows * cols);
  for (const auto& r : j) {
    if (!r.is_array() || r.size() != cols) parse_error(std::string(what) + " is ragged");
    for (const auto& e : r) {
      if (!e.is_number()) parse_error(std::string(what) + " entries must be numbers");
      v.push_back(e.get<double>());
    }
  }
  return Matrix(rows, cols, std::move(v));
}

}  // namespace

CsvTable read_csv(std::istream& in) {
  CsvTable t;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    const auto cells = split(s);
    if (t.header.empty()) {
      t.header = cells;
      continue;
    }
    if (cells.size() != t.header.size()) {
      parse_error("line " + std::to_string(line_no) + ": expected " +
                  std::to_string(t.header.size()) + " fields, got " +
                  std::to_string(cells.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_number(c, line_no));
    t.rows.push_back(std::move(row));
  }
  if (t.header.empty()) parse_error("CSV has no header");
  if (t.rows.empty()) parse_error("CSV has no data rows");
  return t;
}

CsvTable read_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return read_csv(in);
}

RegressionTable split_regression_table(const CsvTable& table) {
  const std::size_t cols = table.header.size();
  if (cols < 2 || table.header.back() != "y") {
    parse_error("dataset header must be x1,...,xd,y");
  }
  for (std::size_t i = 0; i + 1 < cols; ++i) {
    if (table.header[i] != "x" + std::to_string(i + 1)) {
      parse_error("dataset header column " + std::to_string(i + 1) + " must be x" +
                  std::to_string(i + 1));
    }
  }
  const std::size_t d = cols - 1;
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& r : table.rows) {
    x.insert(x.end(), r.begin(), r.begin() + static_cast<std::ptrdiff_t>(d));
    y.push_back(r.back());
  }
  return RegressionTable{Matrix(table.rows.size(), d, std::move(x)), Vector(std::move(y))};
}

BoundsSidecar parse_bounds(const json& j) {
  const auto lo = require<std::vector<double>>(j, "L");
  const auto hi = require<std::vector<double>>(j, "U");
  if (lo.size() != hi.size()) parse_error("bounds L and U differ in length");
  BoundsSidecar b;
  for (std::size_t i = 0; i < lo.size(); ++i) b.x.push_back(ScaleBounds{lo[i], hi[i]});
  b.y = ScaleBounds{require<double>(j, "L_y"), require<double>(j, "U_y")};
  return b;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    parse_error(path.string() + ": " + e.what());
  }
}

NewtonProblem parse_newton_problem(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) parse_error("problem must be a JSON object");
  const auto family = require<std::string>(j, "family");
  const double lambda = get_or<double>(j, "lambda", 0.0);
  const double radius = get_or<double>(j, "region_radius", 4.0);

  Matrix x = Matrix::zeros(1, 1);
  std::vector<double> y;
  if (j.contains("data_csv")) {
    std::filesystem::path p = require<std::string>(j, "data_csv");
    if (p.is_relative()) p = base_dir / p;
    const CsvTable t = read_csv_file(p);
    if (family == "quadratic") {
      std::vector<double> v;
      for (const auto& r : t.rows) v.insert(v.end(), r.begin(), r.end());
      x = Matrix(t.rows.size(), t.header.size(), std::move(v));
    } else {
      RegressionTable rt = split_regression_table(t);
      x = std::move(rt.x);
      y = rt.y.to_std();
    }
  } else if (j.contains("data")) {
    const json& d = j.at("data");
    x = matrix_from_json(d.contains("x") ? d.at("x") : json(), "data.x");
    if (family != "quadratic") y = require<std::vector<double>>(d, "y");
  } else {
    parse_error("problem needs 'data' or 'data_csv'");
  }

  NewtonProblem p;
  if (family == "least_squares" || family == "ridge_least_squares") {
    if (y.size() != x.rows()) parse_error("data.y length must match data.x rows");
    p.objective = make_least_squares(Dataset(x, Vector(y)), lambda, radius);
  } else if (family == "logistic") {
    p.objective = make_logistic(x, y, lambda, radius);
  } else if (family == "quadratic") {
    p.objective = make_quadratic(x, lambda, radius);
  } else {
    parse_error("unknown objective family '" + family + "'");
  }

  if (j.contains("bounds")) {
    const json& b = j.at("bounds");
    DerivativeBounds db = p.objective->bounds();
    if (b.contains("gradient")) db.gradient = interval(b.at("gradient"), "bounds.gradient");
    if (b.contains("hessian")) db.hessian = interval(b.at("hessian"), "bounds.hessian");
    p.objective->set_bounds(db);
  }

  const double mu_default = p.objective->analytic_mu();
  const double m_default = p.objective->analytic_hessian_lipschitz();
  p.cert.mu = get_or<double>(j, "mu", mu_default);
  p.cert.m_lip = get_or<double>(j, "m_lip", m_default);
  p.a0 = get_or<std::vector<double>>(j, "a0", std::vector<double>(p.objective->dim(), 0.0));
  if (p.a0.size() != p.objective->dim()) parse_error("a0 length must equal the dimension");
  p.options.eps = require<double>(j, "eps");
  p.options.gamma = get_or<double>(j, "gamma", 0.01);
  p.options.delta0 = require<double>(j, "delta0");
  p.options.seed = get_or<std::uint64_t>(j, "seed", 0);
  const auto engine = get_or<std::string>(j, "engine", "qae");
  if (engine == "qae") {
    p.engine = NewtonEngine::kQae;
  } else if (engine == "exact") {
    p.engine = NewtonEngine::kExact;
  } else if (engine == "cmc") {
    p.engine = NewtonEngine::kCmc;
  } else {
    parse_error("engine must be qae, exact or cmc");
  }
  return p;
}

SweepSpec parse_sweep_spec(const json& j) {
  if (!j.is_object()) parse_error("sweep spec must be a JSON object");
  SweepSpec s;
  try {
    s.mode = parse_sweep_mode(get_or<std::string>(j, "mode", "regression"));
    s.axis = parse_sweep_axis(require<std::string>(j, "axis"));
  } catch (const Error& e) {
    parse_error(e.what());
  }
  s.values = require<std::vector<double>>(j, "values");
  s.trials = get_or<std::size_t>(j, "trials", 1);
  s.seed = get_or<std::uint64_t>(j, "seed", 0);
  s.workers = get_or<std::size_t>(j, "workers", 0);
  s.record_wall_time = get_or<bool>(j, "record_wall_time", true);
  if (j.contains("fixed")) {
    const json& f = j.at("fixed");
    SweepFixed& x = s.fixed;
    x.eps = get_or<double>(f, "eps", x.eps);
    x.d = get_or<std::size_t>(f, "d", x.d);
    x.kappa = get_or<double>(f, "kappa", x.kappa);
    x.n_data = get_or<std::size_t>(f, "n_data", x.n_data);
    x.gamma = get_or<double>(f, "gamma", x.gamma);
    x.noise = get_or<double>(f, "noise", x.noise);
    x.mu = get_or<double>(f, "mu", x.mu);
    x.m_lip = get_or<double>(f, "m_lip", x.m_lip);
    x.delta0 = get_or<double>(f, "delta0", x.delta0);
    x.region_radius = get_or<double>(f, "region_radius", x.region_radius);
  }
  return s;
}

LsmDemoSpec parse_lsm_spec(const json& j) {
  if (!j.is_object()) parse_error("LSM spec must be a JSON object");
  LsmDemoSpec s;
  LsmSpec& l = s.lsm;
  l.n_paths = get_or<std::size_t>(j, "n_paths", l.n_paths);
  l.n_steps = get_or<std::size_t>(j, "n_steps", l.n_steps);
  l.spot = get_or<double>(j, "spot", l.spot);
  l.volatility = get_or<double>(j, "volatility", l.volatility);
  l.rate = get_or<double>(j, "rate", l.rate);
  l.strike = get_or<double>(j, "strike", l.strike);
  l.maturity = get_or<double>(j, "maturity", l.maturity);
  l.basis_degree = get_or<int>(j, "basis_degree", l.basis_degree);
  l.seed = get_or<std::uint64_t>(j, "seed", l.seed);
  s.eps = get_or<double>(j, "eps", s.eps);
  s.gamma = get_or<double>(j, "gamma", s.gamma);
  s.seed = get_or<std::uint64_t>(j, "qae_seed", l.seed);
  return s;
}

}  // namespace qnewton
