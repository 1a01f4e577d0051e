#include "gaplab/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "gaplab/textio.hpp"

namespace gaplab::experiments {

std::vector<double> EpsSchedule::values() const {
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(count));
  if (count == 1) {
    v.push_back(start);
    return v;
  }
  const double ratio = std::log(stop / start) / (count - 1);
  for (int i = 0; i < count; ++i) {
    v.push_back(start * std::exp(ratio * i));
  }
  v.back() = stop;
  return v;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& v, int line) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0') {
    throw ConfigError(line, "expected a number, got '" + v + "'");
  }
  return x;
}

int parse_int(const std::string& v, int line) {
  char* end = nullptr;
  const long x = std::strtol(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0') {
    throw ConfigError(line, "expected an integer, got '" + v + "'");
  }
  return static_cast<int>(x);
}

std::pair<int, int> parse_grid_size(const std::string& v, int line) {
  const std::size_t x = v.find('x');
  if (x == std::string::npos) {
    throw ConfigError(line, "expected WIDTHxHEIGHT, got '" + v + "'");
  }
  return {parse_int(v.substr(0, x), line), parse_int(v.substr(x + 1), line)};
}

std::vector<int> parse_int_list(const std::string& v, int line) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_int(item, line));
  }
  if (out.empty()) throw ConfigError(line, "expected a comma-separated integer list");
  return out;
}

void validate(const ExperimentConfig& c) {
  if (c.id != "sweep" && c.id != "h_certify" && c.id != "mode_decay" &&
      c.id != "local_gap") {
    throw ConfigError(0, "unknown experiment id '" + c.id + "'");
  }
  if (c.n < 3) throw ConfigError(0, "n must be >= 3");
  if (c.eps.count < 1) throw ConfigError(0, "eps schedule must have at least one point");
  if (!(c.eps.start > 0.0) || !(c.eps.stop > 0.0)) {
    throw ConfigError(0, "eps values must be positive");
  }
  if (c.eps.count > 1 && !(c.eps.start > c.eps.stop)) {
    throw ConfigError(0, "eps schedule must be strictly decreasing");
  }
  if (c.grid.coarse_nx < 8 || c.grid.coarse_ny < 8) {
    throw ConfigError(0, "coarse grid too small");
  }
  if (c.grid.fine_nx < c.grid.coarse_nx || c.grid.fine_ny < c.grid.coarse_ny) {
    throw ConfigError(0, "fine grid must not be smaller than the coarse grid");
  }
  if (c.shape != "ball" && c.shape != "perturbed") {
    throw ConfigError(0, "shape must be 'ball' or 'perturbed'");
  }
  if (c.dirichlet != "one" && c.dirichlet != "parabolic") {
    throw ConfigError(0, "dirichlet must be 'one' or 'parabolic'");
  }
  for (int k : c.k_list) {
    if (k < 1) throw ConfigError(0, "mode indices must be >= 1");
  }
  if (c.threads < 1) throw ConfigError(0, "threads must be >= 1");
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  std::istringstream is(text);
  std::string raw;
  std::string section;
  int line = 0;
  bool saw_experiment = false;
  while (std::getline(is, raw)) {
    ++line;
    std::string s = trim(raw);
    if (s.empty() || s[0] == '#') continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(line, "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section == "experiment") saw_experiment = true;
      continue;
    }
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "expected key = value");
    const std::string key = trim(s.substr(0, eq));
    const std::string val = trim(s.substr(eq + 1));
    if (key.empty() || val.empty()) throw ConfigError(line, "empty key or value");

    if (section == "experiment") {
      if (key == "id") c.id = val;
      else if (key == "n") c.n = parse_int(val, line);
      else if (key == "threads") c.threads = parse_int(val, line);
      else if (key == "out_dir") c.out_dir = val;
      else throw ConfigError(line, "unknown key '" + key + "' in [experiment]");
    } else if (section == "eps") {
      if (key == "start") c.eps.start = parse_double(val, line);
      else if (key == "stop") c.eps.stop = parse_double(val, line);
      else if (key == "count") c.eps.count = parse_int(val, line);
      else throw ConfigError(line, "unknown key '" + key + "' in [eps]");
    } else if (section == "grid") {
      if (key == "coarse") {
        auto [nx, ny] = parse_grid_size(val, line);
        c.grid.coarse_nx = nx;
        c.grid.coarse_ny = ny;
      } else if (key == "fine") {
        auto [nx, ny] = parse_grid_size(val, line);
        c.grid.fine_nx = nx;
        c.grid.fine_ny = ny;
      } else {
        throw ConfigError(line, "unknown key '" + key + "' in [grid]");
      }
    } else if (section == "shape") {
      if (key == "kind") c.shape = val;
      else if (key == "a") c.shape_a = parse_double(val, line);
      else if (key == "gamma") c.shape_gamma = parse_double(val, line);
      else if (key == "b") c.shape_b = parse_double(val, line);
      else if (key == "patch_radius") c.patch_radius = parse_double(val, line);
      else if (key == "dirichlet") c.dirichlet = val;
      else throw ConfigError(line, "unknown key '" + key + "' in [shape]");
    } else if (section == "modes") {
      if (key == "k_list") c.k_list = parse_int_list(val, line);
      else throw ConfigError(line, "unknown key '" + key + "' in [modes]");
    } else if (section == "ode") {
      if (key == "points_per_octave") c.points_per_octave = parse_int(val, line);
      else if (key == "beta") c.beta = (val == "auto") ? 0.0 : parse_double(val, line);
      else throw ConfigError(line, "unknown key '" + key + "' in [ode]");
    } else if (section == "fit") {
      if (key == "u11_slope_tol") c.u11_slope_tol = parse_double(val, line);
      else if (key == "grad_slope_tol") c.grad_slope_tol = parse_double(val, line);
      else if (key == "window_lo_factor") c.window_lo_factor = parse_double(val, line);
      else if (key == "window_hi_factor") c.window_hi_factor = parse_double(val, line);
      else throw ConfigError(line, "unknown key '" + key + "' in [fit]");
    } else {
      throw ConfigError(line, "key outside of any known section");
    }
  }
  if (!saw_experiment) throw ConfigError(line, "missing [experiment] section");
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("load_config: cannot open " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::string emit_config(const ExperimentConfig& c) {
  std::string out;
  auto kv = [&](const char* key, const std::string& val) {
    out += key;
    out += " = ";
    out += val;
    out += '\n';
  };
  out += "[experiment]\n";
  kv("id", c.id);
  kv("n", std::to_string(c.n));
  kv("threads", std::to_string(c.threads));
  kv("out_dir", c.out_dir);
  out += "\n[eps]\n";
  kv("start", io::format_g17(c.eps.start));
  kv("stop", io::format_g17(c.eps.stop));
  kv("count", std::to_string(c.eps.count));
  out += "\n[grid]\n";
  kv("coarse", std::to_string(c.grid.coarse_nx) + "x" + std::to_string(c.grid.coarse_ny));
  kv("fine", std::to_string(c.grid.fine_nx) + "x" + std::to_string(c.grid.fine_ny));
  out += "\n[shape]\n";
  kv("kind", c.shape);
  kv("a", io::format_g17(c.shape_a));
  kv("gamma", io::format_g17(c.shape_gamma));
  kv("b", io::format_g17(c.shape_b));
  kv("patch_radius", io::format_g17(c.patch_radius));
  kv("dirichlet", c.dirichlet);
  out += "\n[modes]\n";
  std::string ks;
  for (std::size_t i = 0; i < c.k_list.size(); ++i) {
    ks += std::to_string(c.k_list[i]);
    if (i + 1 < c.k_list.size()) ks += ",";
  }
  kv("k_list", ks);
  out += "\n[ode]\n";
  kv("points_per_octave", std::to_string(c.points_per_octave));
  kv("beta", c.beta == 0.0 ? "auto" : io::format_g17(c.beta));
  out += "\n[fit]\n";
  kv("u11_slope_tol", io::format_g17(c.u11_slope_tol));
  kv("grad_slope_tol", io::format_g17(c.grad_slope_tol));
  kv("window_lo_factor", io::format_g17(c.window_lo_factor));
  kv("window_hi_factor", io::format_g17(c.window_hi_factor));
  return out;
}

}  // namespace gaplab::experiments
