#include <algorithm>
#include <cctype>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "homog/cli.hpp"
#include "homog/field_io.hpp"

namespace homog {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected a number, got '" + v + "'");
  }
}

long to_long(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long x = std::stol(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected an integer, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config key '" + key + "': expected true/false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// "name(a, b, ...)" -> name and numeric arguments
std::pair<std::string, std::vector<double>> parse_builtin(const std::string& spec) {
  static const std::regex re(R"(^\s*([a-z_]+)\s*\(([^)]*)\)\s*$)");
  std::smatch m;
  if (!std::regex_match(spec, m, re)) throw ConfigError("coefficients: cannot parse '" + spec + "'");
  std::vector<double> args;
  for (const auto& a : split_list(m[2].str())) args.push_back(to_double("coefficients", a));
  return {m[1].str(), args};
}

}  // namespace

void RunConfig::validate() const {
  if (d != 2 && d != 3) throw ConfigError("d must be 2 or 3");
  if (n < 2 || (n & (n - 1)) != 0) throw ConfigError("N must be a power of two >= 2");
  if (m_max < 1 || m_max > 10) throw ConfigError("m_max must lie in [1, 10]");
  if (!(solver.rel_tol > 0 && solver.rel_tol < 1)) throw ConfigError("solver.rel_tol must lie in (0, 1)");
  if (solver.max_iterations < 0) throw ConfigError("solver.max_iterations must be >= 0");
  if (coefficients.rfind("file:", 0) == 0) {
    const std::filesystem::path p = coefficients.substr(5);
    if (!std::filesystem::exists(p)) throw ConfigError("coefficient file not found: " + p.string());
  } else {
    const auto [name, args] = parse_builtin(coefficients);
    static const std::set<std::string> known{"constant", "laminate", "checkerboard", "smooth"};
    if (!known.count(name)) throw ConfigError("unknown coefficient family '" + name + "'");
    if ((name == "laminate" || name == "checkerboard") && args.size() != 2)
      throw ConfigError(name + " takes two arguments");
    if (name == "smooth" && args.size() != 1) throw ConfigError("smooth takes one argument");
    if (name == "smooth" && d != 2) throw ConfigError("smooth is two-dimensional");
    if (name == "constant" && args.size() != 1 && args.size() != d * d)
      throw ConfigError("constant takes one value or d*d matrix entries");
  }
  if (table && !std::filesystem::exists(*table)) throw ConfigError("corrector table not found: " + table->string());
  if (output_dir.empty()) throw ConfigError("output_dir is empty");
  study.validate();
  if (identity_tol && !(*identity_tol > 0)) throw ConfigError("verify.identity_tol must be positive");
  if (!(residual_ratio_min > 1)) throw ConfigError("verify.residual_ratio_min must exceed 1");
  if (verify_degree < 1 || verify_degree > m_max) throw ConfigError("verify.degree must lie in [1, m_max]");
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  RunConfig c;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto resolve = [&](const std::string& v) {
    std::filesystem::path p(v);
    return p.is_absolute() ? p : base_dir / p;
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq)), v = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) throw ConfigError("config key '" + key + "' given twice");
    if (key == "coefficients") {
      c.coefficients = v.rfind("file:", 0) == 0 ? "file:" + resolve(v.substr(5)).string() : v;
    } else if (key == "d") {
      c.d = static_cast<std::size_t>(std::max(0L, to_long(key, v)));
    } else if (key == "N") {
      c.n = static_cast<std::size_t>(std::max(0L, to_long(key, v)));
    } else if (key == "m_max") {
      c.m_max = static_cast<int>(to_long(key, v));
    } else if (key == "solver.rel_tol") {
      c.solver.rel_tol = to_double(key, v);
    } else if (key == "solver.max_iterations") {
      c.solver.max_iterations = static_cast<int>(to_long(key, v));
    } else if (key == "output_dir") {
      c.output_dir = resolve(v);
    } else if (key == "table") {
      c.table = resolve(v);
    } else if (key == "seed") {
      c.study.rng_seed = static_cast<std::uint64_t>(to_long(key, v));
    } else if (key == "study.theta") {
      c.study.theta = to_double(key, v);
    } else if (key == "study.m_list") {
      c.study.m_list.clear();
      for (const auto& s : split_list(v)) c.study.m_list.push_back(static_cast<int>(to_long(key, s)));
    } else if (key == "study.r_list") {
      c.study.r_list.clear();
      for (const auto& s : split_list(v)) c.study.r_list.push_back(to_double(key, s));
    } else if (key == "study.seeds") {
      c.study.seeds_per_degree = static_cast<int>(to_long(key, v));
    } else if (key == "study.quadrature_n") {
      c.study.quadrature_n = static_cast<int>(to_long(key, v));
    } else if (key == "study.negative_control") {
      c.study.negative_control = to_bool(key, v);
    } else if (key == "study.minimal_scale") {
      c.minimal_scale = to_bool(key, v);
    } else if (key == "study.slope_r_band") {
      const auto b = split_list(v);
      if (b.size() != 2) throw ConfigError("study.slope_r_band takes two numbers");
      c.study.slope_r_lo = to_double(key, b[0]);
      c.study.slope_r_hi = to_double(key, b[1]);
    } else if (key == "study.slope_m_max") {
      c.study.slope_m_max = to_double(key, v);
    } else if (key == "study.doubling_variation_max") {
      c.study.doubling_variation_max = to_double(key, v);
    } else if (key == "verify.identity_tol") {
      c.identity_tol = to_double(key, v);
    } else if (key == "verify.residual_ratio_min") {
      c.residual_ratio_min = to_double(key, v);
    } else if (key == "verify.degree") {
      c.verify_degree = static_cast<int>(to_long(key, v));
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open config file " + file.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), file.parent_path().empty() ? std::filesystem::path(".") : file.parent_path());
}

CoefficientField make_coefficients(const RunConfig& cfg) {
  if (cfg.coefficients.rfind("file:", 0) == 0) {
    auto a = read_coefficient_field(cfg.coefficients.substr(5));
    if (a.dim() != cfg.d || a.shape().n != cfg.n)
      throw ConfigError("coefficient file does not match d and N of the config");
    return a;
  }
  const auto [name, args] = parse_builtin(cfg.coefficients);
  if (name == "laminate") return CoefficientField::laminate(cfg.d, cfg.n, args[0], args[1]);
  if (name == "checkerboard") return CoefficientField::checkerboard(cfg.d, cfg.n, args[0], args[1]);
  if (name == "smooth") return CoefficientField::smooth(cfg.d, cfg.n, args[0]);
  SquareMatrix<double> a(cfg.d);
  if (args.size() == 1) {
    for (std::size_t i = 0; i < cfg.d; ++i) a(i, i) = args[0];
  } else {
    for (std::size_t i = 0; i < cfg.d; ++i)
      for (std::size_t j = 0; j < cfg.d; ++j) a(i, j) = args[i * cfg.d + j];
  }
  return CoefficientField::constant(cfg.d, cfg.n, a);
}

}  // namespace homog
