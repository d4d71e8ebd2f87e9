//========================================================================================
// aderdg — high-order discontinuous Galerkin solver with a-posteriori subcell limiting
// Licensed under the 3-clause BSD License, see LICENSE file for details
//========================================================================================

#include "aderdg/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace aderdg {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (...) {
    throw ConfigError("config: key '" + key + "' expects a number, got '" + v + "'");
  }
}

long to_long(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (...) {
    throw ConfigError("config: key '" + key + "' expects an integer, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "on" || v == "1") return true;
  if (v == "false" || v == "off" || v == "0") return false;
  throw ConfigError("config: key '" + key + "' expects a boolean, got '" + v + "'");
}

}  // namespace

void apply_key(RunConfig& cfg, const std::string& key, const std::string& value) {
  auto& ov = cfg.overrides;
  if (key == "scenario") {
    cfg.scenario = value;
  } else if (key == "pde") {
    if (value != "cns" && value != "vrmhd") {
      throw ConfigError("config: pde must be cns or vrmhd");
    }
    cfg.pde_override = value;
  } else if (key == "gamma") {
    ov.gamma = to_double(key, value);
  } else if (key == "mu") {
    ov.mu = to_double(key, value);
  } else if (key == "Pr") {
    ov.Pr = to_double(key, value);
  } else if (key == "eta") {
    ov.eta = to_double(key, value);
  } else if (key == "ch") {
    ov.ch = to_double(key, value);
  } else if (key == "Rgas") {
    ov.Rgas = to_double(key, value);
  } else if (key == "kappa") {
    ov.kappa = to_double(key, value);
  } else if (key == "tend") {
    ov.t_end = to_double(key, value);
  } else if (key == "nx") {
    ov.nx = static_cast<int>(to_long(key, value));
  } else if (key == "ny") {
    ov.ny = static_cast<int>(to_long(key, value));
  } else if (key == "nz") {
    ov.nz = static_cast<int>(to_long(key, value));
  } else if (key == "xlo") {
    ov.xlo = to_double(key, value);
  } else if (key == "xhi") {
    ov.xhi = to_double(key, value);
  } else if (key == "ylo") {
    ov.ylo = to_double(key, value);
  } else if (key == "yhi") {
    ov.yhi = to_double(key, value);
  } else if (key == "zlo") {
    ov.zlo = to_double(key, value);
  } else if (key == "zhi") {
    ov.zhi = to_double(key, value);
  } else if (key == "degree" || key == "order") {
    cfg.degree = static_cast<int>(to_long(key, value));
  } else if (key == "cfl") {
    cfg.cfl = to_double(key, value);
  } else if (key == "limiter.scheme") {
    parse_scheme(value);  // validates
    cfg.limiter.scheme = value;
  } else if (key == "limiter.delta0") {
    cfg.limiter.delta0 = to_double(key, value);
  } else if (key == "limiter.eps") {
    cfg.limiter.eps = to_double(key, value);
  } else if (key == "limiter.dmp_vars") {
    if (value == "all") {
      cfg.limiter.dmp_all_vars = true;
    } else if (value == "subset") {
      cfg.limiter.dmp_all_vars = false;
    } else {
      throw ConfigError("config: limiter.dmp_vars must be 'subset' or 'all'");
    }
  } else if (key == "limiter.enabled") {
    cfg.limiter_enabled = to_bool(key, value);
  } else if (key == "limiter.ns") {
    cfg.ns = static_cast<int>(to_long(key, value));
  } else if (key == "predictor.maxiter") {
    cfg.predictor.maxiter = static_cast<int>(to_long(key, value));
  } else if (key == "predictor.tol") {
    cfg.predictor.tol = to_double(key, value);
  } else if (key == "amr.lmax") {
    cfg.amr.lmax = static_cast<int>(to_long(key, value));
  } else if (key == "amr.r") {
    cfg.amr.rfac = static_cast<int>(to_long(key, value));
  } else if (key == "amr.chiref") {
    cfg.amr.chi_ref = to_double(key, value);
  } else if (key == "amr.chirec") {
    cfg.amr.chi_rec = to_double(key, value);
  } else if (key == "amr.noise") {
    cfg.amr.eps_noise = to_double(key, value);
  } else if (key == "amr.indicator") {
    cfg.amr.indicator = value;
  } else if (key == "amr.interval") {
    cfg.amr_interval = static_cast<int>(to_long(key, value));
  } else if (key == "max_steps") {
    cfg.max_steps = to_long(key, value);
  } else if (key == "threads") {
    cfg.threads = static_cast<int>(to_long(key, value));
  } else if (key == "output.dir") {
    cfg.out_dir = value;
  } else if (key == "output.every_steps") {
    cfg.out_every_steps = static_cast<int>(to_long(key, value));
  } else if (key == "output.every_time") {
    cfg.out_every_time = to_double(key, value);
  } else if (key == "diag.every_steps") {
    cfg.diag_every_steps = static_cast<int>(to_long(key, value));
  } else {
    throw ConfigError("config: unknown key '" + key + "'");
  }
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  RunConfig cfg;
  cfg.amr.indicator = "";  // scenario default unless set
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config: line " + std::to_string(lineno) + " is not 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError("config: line " + std::to_string(lineno) + " is not 'key = value'");
    }
    apply_key(cfg, key, value);
  }
  return cfg;
}

void validate_config(const RunConfig& cfg) {
  if (cfg.scenario.empty()) throw ConfigError("config: missing 'scenario'");
  if (cfg.degree < 0 || cfg.degree > 5) throw ConfigError("config: degree must be in [0,5]");
  if (!(cfg.cfl > 0.0 && cfg.cfl < 1.0)) throw ConfigError("config: cfl must be in (0,1)");
  if (cfg.ns >= 0 && cfg.ns < cfg.degree + 1) {
    throw ConfigError("config: limiter.ns must be at least degree+1");
  }
  if (cfg.amr.lmax < 0) throw ConfigError("config: amr.lmax must be >= 0");
  if (cfg.amr.rfac < 2) throw ConfigError("config: amr.r must be >= 2");
  if (cfg.amr.chi_rec >= cfg.amr.chi_ref) {
    throw ConfigError("config: amr.chirec must be below amr.chiref");
  }
  if (cfg.amr_interval < 1) throw ConfigError("config: amr.interval must be >= 1");
  if (cfg.threads < 1) throw ConfigError("config: threads must be >= 1");
  if (cfg.diag_every_steps < 1) throw ConfigError("config: diag.every_steps must be >= 1");
  if (cfg.out_every_steps < 0 || cfg.out_every_time < 0.0) {
    throw ConfigError("config: output cadence must be non-negative");
  }
  if (!cfg.amr.indicator.empty() && cfg.amr.indicator != "density" &&
      cfg.amr.indicator != "pressure" && cfg.amr.indicator != "velocity" &&
      cfg.amr.indicator != "vorticity") {
    throw ConfigError("config: unknown amr.indicator '" + cfg.amr.indicator + "'");
  }
}

}  // namespace aderdg
