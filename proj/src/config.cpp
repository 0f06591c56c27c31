#include "adhesim/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace adhesim {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Ctx {
  std::string key;
  std::string value;
  int line;
};

[[noreturn]] void parse_fail(const Ctx& c, const std::string& what) {
  throw Error(ErrorKind::ParseError,
              "line " + std::to_string(c.line) + ": " + c.key + " = '" + c.value + "': " + what);
}

double to_double(const Ctx& c) {
  double v = 0.0;
  const char* b = c.value.data();
  const char* e = b + c.value.size();
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e || !std::isfinite(v)) parse_fail(c, "expected a number");
  return v;
}

long long to_int(const Ctx& c) {
  long long v = 0;
  const char* b = c.value.data();
  const char* e = b + c.value.size();
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e) parse_fail(c, "expected an integer");
  return v;
}

bool to_bool(const Ctx& c) {
  if (c.value == "true" || c.value == "1" || c.value == "yes") return true;
  if (c.value == "false" || c.value == "0" || c.value == "no") return false;
  throw Error(ErrorKind::UnknownValue, c.key + " = '" + c.value + "'; valid: true|false");
}

std::vector<std::string> split_list(const std::string& s) {
  std::string t = s;
  std::replace(t.begin(), t.end(), ',', ' ');
  std::istringstream in(t);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

[[noreturn]] void unknown_value(const Ctx& c, const char* valid) {
  throw Error(ErrorKind::UnknownValue, c.key + " = '" + c.value + "'; valid: " + valid);
}

ImexScheme to_scheme(const Ctx& c) {
  if (c.value == "cn") return ImexScheme::CrankNicolson;
  if (c.value == "ars222") return ImexScheme::Ars222;
  unknown_value(c, "cn|ars222");
}

void range(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw Error(ErrorKind::RangeError, key + ": " + what);
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}


struct Pending {
  std::string mode = "periodic";
  std::string base;
  bool beta0_set = false, betaL_set = false;
  std::string h_kind = "linear";
  bool h_coeffs_set = false;
};

const std::map<std::string, std::function<void(RunConfig&, Pending&, const Ctx&)>>& setters() {
  using F = std::function<void(RunConfig&, Pending&, const Ctx&)>;
  static const std::map<std::string, F> table = {
      {"kernel.family", [](RunConfig& r, Pending&, const Ctx& c) { r.kernel.family = parse_kernel_family(c.value); }},
      {"kernel.xi", [](RunConfig& r, Pending&, const Ctx& c) { r.kernel.xi = to_double(c); }},
      {"kernel.R", [](RunConfig& r, Pending&, const Ctx& c) { r.kernel.R = to_double(c); }},
      {"kernel.a1", [](RunConfig& r, Pending&, const Ctx& c) { r.kernel.a1 = to_double(c); }},
      {"kernel.a2", [](RunConfig& r, Pending&, const Ctx& c) { r.kernel.a2 = to_double(c); }},
      {"kernel.r1", [](RunConfig& r, Pending&, const Ctx& c) { r.kernel.r1 = to_double(c); }},
      {"kernel.r2", [](RunConfig& r, Pending&, const Ctx& c) { r.kernel.r2 = to_double(c); }},
      {"kernel.sigma", [](RunConfig& r, Pending&, const Ctx& c) { r.kernel.sigma = to_double(c); }},
      {"kernel.table", [](RunConfig& r, Pending&, const Ctx& c) { r.kernel_table = c.value; }},
      {"bc.mode", [](RunConfig&, Pending& p, const Ctx& c) {
         if (c.value != "periodic" && c.value != "naive" && c.value != "noflux" &&
             c.value != "neutral" && c.value != "weighted")
           unknown_value(c, "periodic|naive|noflux|neutral|weighted");
         p.mode = c.value;
       }},
      {"bc.base", [](RunConfig&, Pending& p, const Ctx& c) {
         if (c.value != "periodic" && c.value != "naive" && c.value != "noflux")
           unknown_value(c, "periodic|naive|noflux");
         p.base = c.value;
       }},
      {"bc.uref", [](RunConfig& r, Pending&, const Ctx& c) {
         r.bc_uref = c.value == "auto" ? std::numeric_limits<double>::quiet_NaN() : to_double(c);
       }},
      {"bc.beta0", [](RunConfig& r, Pending& p, const Ctx& c) {
         if (c.value == "auto") return;
         r.beta0 = to_double(c);
         p.beta0_set = true;
       }},
      {"bc.betaL", [](RunConfig& r, Pending& p, const Ctx& c) {
         if (c.value == "auto") return;
         r.betaL = to_double(c);
         p.betaL_set = true;
       }},
      {"h.kind", [](RunConfig&, Pending& p, const Ctx& c) {
         if (c.value != "linear" && c.value != "poly") unknown_value(c, "linear|poly");
         p.h_kind = c.value;
       }},
      {"h.coeffs", [](RunConfig& r, Pending& p, const Ctx& c) {
         r.h_coeffs.clear();
         for (const auto& w : split_list(c.value)) r.h_coeffs.push_back(to_double({c.key, w, c.line}));
         if (r.h_coeffs.empty()) parse_fail(c, "expected a list of coefficients");
         p.h_coeffs_set = true;
       }},
      {"grid.L", [](RunConfig& r, Pending&, const Ctx& c) { r.L = to_double(c); }},
      {"grid.N", [](RunConfig& r, Pending&, const Ctx& c) { r.N = static_cast<int>(to_int(c)); }},
      {"sim.D", [](RunConfig& r, Pending&, const Ctx& c) { r.D = to_double(c); }},
      {"sim.alpha", [](RunConfig& r, Pending&, const Ctx& c) { r.alpha = to_double(c); }},
      {"sim.t_end", [](RunConfig& r, Pending&, const Ctx& c) { r.t_end = to_double(c); }},
      {"sim.rtol", [](RunConfig& r, Pending&, const Ctx& c) { r.rtol = to_double(c); }},
      {"sim.atol", [](RunConfig& r, Pending&, const Ctx& c) { r.atol = to_double(c); }},
      {"sim.outputs", [](RunConfig& r, Pending&, const Ctx& c) { r.outputs = static_cast<int>(to_int(c)); }},
      {"sim.scheme", [](RunConfig& r, Pending&, const Ctx& c) { r.scheme = to_scheme(c); }},
      {"steady.scheme", [](RunConfig& r, Pending&, const Ctx& c) { r.steady_scheme = to_scheme(c); }},
      {"ic.kind", [](RunConfig& r, Pending&, const Ctx& c) {
         const std::string& v = c.value;
         if (v == "constant") r.ic = IcKind::Constant;
         else if (v == "noise" || v == "constant+noise") r.ic = IcKind::Noise;
         else if (v == "cos" || v == "constant+cos") r.ic = IcKind::Cosine;
         else if (v == "cos+noise" || v == "constant+cos+noise") r.ic = IcKind::CosineNoise;
         else unknown_value(c, "constant|constant+noise|constant+cos|constant+cos+noise");
       }},
      {"ic.ubar", [](RunConfig& r, Pending&, const Ctx& c) { r.ubar = to_double(c); }},
      {"ic.seed", [](RunConfig& r, Pending&, const Ctx& c) {
         const long long v = to_int(c);
         range(v >= 0, c.key, "must be nonnegative");
         r.seed = static_cast<std::uint64_t>(v);
       }},
      {"ic.amp", [](RunConfig& r, Pending&, const Ctx& c) { r.amp = to_double(c); }},
      {"ic.noise_amp", [](RunConfig& r, Pending&, const Ctx& c) { r.noise_amp = to_double(c); }},
      {"ic.mode_n", [](RunConfig& r, Pending&, const Ctx& c) { r.mode_n = static_cast<int>(to_int(c)); }},
      {"steady.tol", [](RunConfig& r, Pending&, const Ctx& c) { r.ss_tol = to_double(c); }},
      {"steady.t_max", [](RunConfig& r, Pending&, const Ctx& c) { r.t_max = to_double(c); }},
      {"steady.newton", [](RunConfig& r, Pending&, const Ctx& c) { r.newton_polish = to_bool(c); }},
      {"bif.n_max", [](RunConfig& r, Pending&, const Ctx& c) { r.n_max = static_cast<int>(to_int(c)); }},
      {"branch.n", [](RunConfig& r, Pending&, const Ctx& c) {
         r.branch_modes.clear();
         for (const auto& w : split_list(c.value))
           r.branch_modes.push_back(static_cast<int>(to_int({c.key, w, c.line})));
         if (r.branch_modes.empty()) parse_fail(c, "expected a list of modes");
       }},
      {"branch.alpha_end", [](RunConfig& r, Pending&, const Ctx& c) {
         r.branch_alpha_end = c.value == "auto" ? 0.0 : to_double(c);
       }},
      {"branch.steps", [](RunConfig& r, Pending&, const Ctx& c) { r.branch_steps = static_cast<int>(to_int(c)); }},
      {"branch.s0", [](RunConfig& r, Pending&, const Ctx& c) { r.branch_s0 = to_double(c); }},
  };
  return table;
}

void finish(RunConfig& r, const Pending& p, const std::string& base_dir) {
  if (p.mode == "neutral" || p.mode == "weighted") {
    const std::string base = p.base.empty() ? "noflux" : p.base;
    r.bc_base = base == "naive" ? Domain::Naive : base == "noflux" ? Domain::NoFlux : Domain::Periodic;
    r.bc_neutral = p.mode == "neutral";
    r.bc_weighted = p.mode == "weighted";
    if (r.bc_weighted && r.bc_base == Domain::Periodic)
      throw Error(ErrorKind::RangeError, "bc.base: weighted boundaries need naive or noflux");
  } else {
    r.bc_base = p.mode == "naive" ? Domain::Naive : p.mode == "noflux" ? Domain::NoFlux : Domain::Periodic;
  }
  r.beta_auto = !(p.beta0_set || p.betaL_set);
  if (p.h_kind == "linear") {
    if (p.h_coeffs_set && AdhesionFunction::polynomial(r.h_coeffs).is_linear() == false)
      throw Error(ErrorKind::RangeError, "h.coeffs: h.kind = linear takes no coefficients");
    r.h_coeffs = {0.0, 1.0};
  } else if (!p.h_coeffs_set) {
    throw Error(ErrorKind::RangeError, "h.coeffs: required for h.kind = poly");
  }

  if (!r.kernel_table.empty()) {
    std::filesystem::path tp(r.kernel_table);
    if (tp.is_relative()) tp = std::filesystem::path(base_dir) / tp;
    KernelSpec t = load_kernel_table(tp.string(), r.kernel.R);
    r.kernel.table_r = std::move(t.table_r);
    r.kernel.table_omega = std::move(t.table_omega);
  } else if (r.kernel.family == KernelFamily::Tabulated) {
    throw Error(ErrorKind::RangeError, "kernel.table: required for kernel.family = tabulated");
  }
  r.kernel = normalize(r.kernel);

  range(r.L > 2.0 * r.kernel.R, "grid.L",
        "domain must be larger than one sensing diameter (L > 2R = " + num(2.0 * r.kernel.R) + ")");
  range(r.N > 0, "grid.N", "must be positive");
  range(r.N <= 1 << 16, "grid.N", "too large");
  Grid check(r.L, r.N);  // N·L integral
  (void)check;
  range(r.D > 0.0, "sim.D", "must be positive");
  range(r.t_end > 0.0, "sim.t_end", "must be positive");
  range(r.rtol > 0.0 && r.atol > 0.0, "sim.rtol/sim.atol", "must be positive");
  range(r.outputs >= 1, "sim.outputs", "must be at least 1");
  range(r.ubar > 0.0, "ic.ubar", "must be positive");
  range(r.amp >= 0.0 && r.noise_amp >= 0.0, "ic.amp", "must be nonnegative");
  range(r.mode_n >= 1, "ic.mode_n", "must be at least 1");
  range(r.ss_tol > 0.0 && r.t_max > 0.0, "steady.tol/steady.t_max", "must be positive");
  range(r.n_max >= 1 && r.n_max <= 10000, "bif.n_max", "must be in [1, 10000]");
  range(r.branch_steps >= 1, "branch.steps", "must be at least 1");
  for (int n : r.branch_modes) range(n >= 1, "branch.n", "modes must be positive");
  range(r.branch_s0 != 0.0, "branch.s0", "must be nonzero");
}

}  // namespace

RunConfig parse_config_text(const std::string& text, const std::string& base_dir) {
  RunConfig cfg;
  Pending pending;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  const auto& table = setters();
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::ParseError, "line " + std::to_string(line) + ": expected key = value");
    Ctx c{trim(body.substr(0, eq)), trim(body.substr(eq + 1)), line};
    if (c.key.empty()) throw Error(ErrorKind::ParseError, "line " + std::to_string(line) + ": empty key");
    if (c.value.empty()) parse_fail(c, "empty value");
    const auto it = table.find(c.key);
    if (it == table.end())
      throw Error(ErrorKind::UnknownKey, "line " + std::to_string(line) + ": unknown key '" + c.key + "'");
    it->second(cfg, pending, c);
  }
  finish(cfg, pending, base_dir);
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_config_text(ss.str(), dir.empty() ? "." : dir.string());
}

SensingMode sensing_mode(const RunConfig& cfg) {
  SensingMode m;
  m.domain = cfg.bc_base;
  if (cfg.bc_neutral) m = SensingMode::make_neutral(m, cfg.bc_uref);
  if (cfg.bc_weighted) m = SensingMode::make_weighted(m, cfg.beta0, cfg.betaL);
  return m;
}

AdhesionFunction adhesion_function(const RunConfig& cfg) {
  return AdhesionFunction::polynomial(cfg.h_coeffs);
}

Grid make_grid(const RunConfig& cfg) { return Grid(cfg.L, cfg.N); }

Field initial_field(const RunConfig& cfg, const Grid& grid) {
  switch (cfg.ic) {
    case IcKind::Constant:
      return constant_field(grid, cfg.ubar);
    case IcKind::Noise:
      return noise_field(grid, cfg.ubar, cfg.amp, cfg.seed);
    case IcKind::Cosine:
      return cosine_field(grid, cfg.ubar, cfg.mode_n, cfg.amp);
    case IcKind::CosineNoise: {
      Field u = cosine_field(grid, cfg.ubar, cfg.mode_n, cfg.amp);
      const Field z = noise_field(grid, 0.0, cfg.noise_amp, cfg.seed);
      for (std::size_t i = 0; i < u.size(); ++i) u[i] += z[i];
      return u;
    }
  }
  return constant_field(grid, cfg.ubar);
}

NonlocalOperator make_operator(const RunConfig& cfg, const Field& u0) {
  const Grid grid = make_grid(cfg);
  SensingMode mode = resolve_reference(sensing_mode(cfg), mean(u0));
  const AdhesionFunction h = adhesion_function(cfg);
  if (mode.weighted && cfg.beta_auto) {
    const auto [b0, bL] = weighted_boundary_noflux_beta(grid, cfg.kernel, mode, h, u0);
    mode.beta0 = b0;
    mode.betaL = bL;
  }
  return NonlocalOperator(grid, cfg.kernel, mode, h);
}

std::string resolved_text(const RunConfig& c) {
  std::ostringstream o;
  auto kv = [&](const std::string& k, const std::string& v) { o << k << " = " << v << "\n"; };
  kv("kernel.family", to_string(c.kernel.family));
  kv("kernel.R", num(c.kernel.R));
  o << "# normalisation omega0 = " << num(c.kernel.omega0) << "\n";
  switch (c.kernel.family) {
    case KernelFamily::Exponential:
    case KernelFamily::Peak:
      kv("kernel.xi", num(c.kernel.xi));
      break;
    case KernelFamily::TwoPoint:
      kv("kernel.a1", num(c.kernel.a1));
      kv("kernel.a2", num(c.kernel.a2));
      kv("kernel.r1", num(c.kernel.r1));
      kv("kernel.r2", num(c.kernel.r2));
      kv("kernel.sigma", num(c.kernel.mollifier_width()));
      break;
    case KernelFamily::Tabulated:
      kv("kernel.table", c.kernel_table);
      break;
    default:
      break;
  }
  const char* mode = c.bc_neutral ? "neutral" : c.bc_weighted ? "weighted" : to_string(c.bc_base);
  kv("bc.mode", mode);
  if (c.bc_neutral || c.bc_weighted) kv("bc.base", to_string(c.bc_base));
  if (c.bc_neutral) kv("bc.uref", std::isnan(c.bc_uref) ? "auto" : num(c.bc_uref));
  if (c.bc_weighted) {
    kv("bc.beta0", c.beta_auto ? "auto" : num(c.beta0));
    kv("bc.betaL", c.beta_auto ? "auto" : num(c.betaL));
  }
  const bool lin = AdhesionFunction::polynomial(c.h_coeffs).is_linear();
  kv("h.kind", lin ? "linear" : "poly");
  if (!lin) {
    std::string s;
    for (std::size_t i = 0; i < c.h_coeffs.size(); ++i) s += (i ? "," : "") + num(c.h_coeffs[i]);
    kv("h.coeffs", s);
  }
  kv("grid.L", num(c.L));
  kv("grid.N", std::to_string(c.N));
  kv("sim.D", num(c.D));
  kv("sim.alpha", num(c.alpha));
  kv("sim.t_end", num(c.t_end));
  kv("sim.rtol", num(c.rtol));
  kv("sim.atol", num(c.atol));
  kv("sim.outputs", std::to_string(c.outputs));
  kv("sim.scheme", c.scheme == ImexScheme::CrankNicolson ? "cn" : "ars222");
  const char* ic = c.ic == IcKind::Constant ? "constant"
                   : c.ic == IcKind::Noise  ? "constant+noise"
                   : c.ic == IcKind::Cosine ? "constant+cos"
                                            : "constant+cos+noise";
  kv("ic.kind", ic);
  kv("ic.ubar", num(c.ubar));
  kv("ic.seed", std::to_string(c.seed));
  kv("ic.amp", num(c.amp));
  kv("ic.noise_amp", num(c.noise_amp));
  kv("ic.mode_n", std::to_string(c.mode_n));
  kv("steady.tol", num(c.ss_tol));
  kv("steady.t_max", num(c.t_max));
  kv("steady.scheme", c.steady_scheme == ImexScheme::CrankNicolson ? "cn" : "ars222");
  kv("steady.newton", c.newton_polish ? "true" : "false");
  kv("bif.n_max", std::to_string(c.n_max));
  std::string modes;
  for (std::size_t i = 0; i < c.branch_modes.size(); ++i)
    modes += (i ? "," : "") + std::to_string(c.branch_modes[i]);
  kv("branch.n", modes);
  kv("branch.alpha_end", c.branch_alpha_end > 0.0 ? num(c.branch_alpha_end) : "auto");
  kv("branch.steps", std::to_string(c.branch_steps));
  kv("branch.s0", num(c.branch_s0));
  return o.str();
}

}  // namespace adhesim
