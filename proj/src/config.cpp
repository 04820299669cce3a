#include "esbgk/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <variant>

namespace esbgk {

ConfigError::ConfigError(std::string key, int line, const std::string& message)
    : std::runtime_error([&] {
        std::string s;
        if (line > 0) s += "line " + std::to_string(line) + ": ";
        if (!key.empty()) s += "key '" + key + "': ";
        return s + message;
      }()),
      key_(std::move(key)),
      line_(line) {}

namespace {

struct Value {
  std::variant<double, std::string, bool, std::vector<double>> data;
  bool integral = false;  // scalar or every list element written without fraction/exponent
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

bool parse_number(const std::string& text, double& out, bool& integral) {
  if (text.empty()) return false;
  std::size_t used = 0;
  try {
    out = std::stod(text, &used);
  } catch (const std::exception&) {
    return false;
  }
  if (used != text.size() || !std::isfinite(out)) return false;
  integral = text.find_first_of(".eE") == std::string::npos;
  return true;
}

Value parse_value(const std::string& key, const std::string& text, int line) {
  Value v;
  if (text.empty()) throw ConfigError(key, line, "missing value");
  if (text.front() == '"') {
    if (text.size() < 2 || text.back() != '"')
      throw ConfigError(key, line, "unterminated string");
    v.data = text.substr(1, text.size() - 2);
    return v;
  }
  if (text == "true" || text == "false") {
    v.data = text == "true";
    return v;
  }
  if (text.front() == '[') {
    if (text.back() != ']') throw ConfigError(key, line, "unterminated list");
    std::vector<double> items;
    bool all_integral = true;
    std::stringstream ss(text.substr(1, text.size() - 2));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) {
        if (ss.eof() && !items.empty()) break;  // trailing comma
        throw ConfigError(key, line, "empty list element");
      }
      double x;
      bool integral;
      if (!parse_number(item, x, integral))
        throw ConfigError(key, line, "list element '" + item + "' is not a number");
      all_integral = all_integral && integral;
      items.push_back(x);
    }
    v.data = items;
    v.integral = all_integral;
    return v;
  }
  double x;
  bool integral;
  if (!parse_number(text, x, integral))
    throw ConfigError(key, line, "value '" + text + "' is not a number, string, boolean or list");
  v.data = x;
  v.integral = integral;
  return v;
}

double as_real(const std::string& key, const Value& v, int line) {
  if (auto p = std::get_if<double>(&v.data)) return *p;
  throw ConfigError(key, line, "expected a number");
}

long long as_int(const std::string& key, const Value& v, int line) {
  const double x = as_real(key, v, line);
  if (!v.integral || std::abs(x) > 9.0e15) throw ConfigError(key, line, "expected an integer");
  return static_cast<long long>(x);
}

std::uint64_t as_seed(const std::string& key, const Value& v, int line) {
  const long long x = as_int(key, v, line);
  if (x < 0) throw ConfigError(key, line, "seed must be nonnegative");
  return static_cast<std::uint64_t>(x);
}

std::string as_string(const std::string& key, const Value& v, int line) {
  if (auto p = std::get_if<std::string>(&v.data)) return *p;
  throw ConfigError(key, line, "expected a quoted string");
}

std::vector<double> as_list(const std::string& key, const Value& v, int line) {
  if (auto p = std::get_if<std::vector<double>>(&v.data)) return *p;
  throw ConfigError(key, line, "expected a list");
}

Vector3d as_vec3(const std::string& key, const Value& v, int line) {
  const auto xs = as_list(key, v, line);
  if (xs.size() != 3) throw ConfigError(key, line, "expected a list of 3 numbers");
  return Vector3d(xs[0], xs[1], xs[2]);
}

using Setter = std::function<void(RunConfig&, const std::string&, const Value&, int)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"model.nu", [](RunConfig& c, auto& k, auto& v, int l) { c.nu = as_real(k, v, l); }},
      {"model.theta", [](RunConfig& c, auto& k, auto& v, int l) { c.theta = as_real(k, v, l); }},
      {"model.delta", [](RunConfig& c, auto& k, auto& v, int l) { c.delta = as_real(k, v, l); }},

      {"grid.nx", [](RunConfig& c, auto& k, auto& v, int l) { c.grid.nx = int(as_int(k, v, l)); }},
      {"grid.nv", [](RunConfig& c, auto& k, auto& v, int l) { c.grid.nv = int(as_int(k, v, l)); }},
      {"grid.ni", [](RunConfig& c, auto& k, auto& v, int l) { c.grid.ni = int(as_int(k, v, l)); }},
      {"grid.v_max", [](RunConfig& c, auto& k, auto& v, int l) { c.grid.v_max = as_real(k, v, l); }},
      {"grid.i_max", [](RunConfig& c, auto& k, auto& v, int l) { c.grid.i_max = as_real(k, v, l); }},
      {"grid.length", [](RunConfig& c, auto& k, auto& v, int l) { c.grid.length = as_real(k, v, l); }},

      {"solver.cfl", [](RunConfig& c, auto& k, auto& v, int l) { c.solver.cfl = as_real(k, v, l); }},
      {"solver.t_end", [](RunConfig& c, auto& k, auto& v, int l) { c.solver.t_end = as_real(k, v, l); }},
      {"solver.steps",
       [](RunConfig& c, auto& k, auto& v, int l) { c.solver.steps = int(as_int(k, v, l)); }},
      {"solver.output_every",
       [](RunConfig& c, auto& k, auto& v, int l) { c.solver.output_every = int(as_int(k, v, l)); }},
      {"solver.energy_order",
       [](RunConfig& c, auto& k, auto& v, int l) { c.solver.energy_order = int(as_int(k, v, l)); }},
      {"solver.splitting",
       [](RunConfig& c, auto& k, auto& v, int l) {
         const std::string s = as_string(k, v, l);
         if (s == "lie") c.solver.splitting = Splitting::lie;
         else if (s == "strang") c.solver.splitting = Splitting::strang;
         else throw ConfigError(k, l, "expected \"lie\" or \"strang\", got \"" + s + "\"");
       }},
      {"solver.limiter",
       [](RunConfig& c, auto& k, auto& v, int l) {
         const std::string s = as_string(k, v, l);
         if (s == "none") c.solver.limiter = Limiter::none;
         else if (s == "minmod") c.solver.limiter = Limiter::minmod;
         else if (s == "vanleer") c.solver.limiter = Limiter::vanleer;
         else throw ConfigError(k, l, "expected \"none\", \"minmod\" or \"vanleer\", got \"" + s + "\"");
       }},
      {"solver.relaxation",
       [](RunConfig& c, auto& k, auto& v, int l) {
         const std::string s = as_string(k, v, l);
         if (s == "exponential") c.solver.relaxation = RelaxationScheme::exponential;
         else if (s == "implicit") c.solver.relaxation = RelaxationScheme::implicit;
         else throw ConfigError(k, l, "expected \"exponential\" or \"implicit\", got \"" + s + "\"");
       }},

      {"initial.kind",
       [](RunConfig& c, auto& k, auto& v, int l) {
         const std::string s = as_string(k, v, l);
         if (s == "equilibrium") c.initial.kind = InitialKind::equilibrium;
         else if (s == "shifted") c.initial.kind = InitialKind::shifted;
         else if (s == "anisotropic") c.initial.kind = InitialKind::anisotropic;
         else if (s == "perturbation") c.initial.kind = InitialKind::perturbation;
         else throw ConfigError(k, l, "unknown initial kind \"" + s + "\"");
       }},
      {"initial.u0", [](RunConfig& c, auto& k, auto& v, int l) { c.initial.u0 = as_vec3(k, v, l); }},
      {"initial.theta0",
       [](RunConfig& c, auto& k, auto& v, int l) { c.initial.theta0 = as_vec3(k, v, l); }},
      {"initial.t_internal0",
       [](RunConfig& c, auto& k, auto& v, int l) { c.initial.t_internal0 = as_real(k, v, l); }},
      {"initial.amplitude",
       [](RunConfig& c, auto& k, auto& v, int l) { c.initial.amplitude = as_real(k, v, l); }},
      {"initial.seed", [](RunConfig& c, auto& k, auto& v, int l) { c.initial.seed = as_seed(k, v, l); }},
      {"initial.modes",
       [](RunConfig& c, auto& k, auto& v, int l) {
         if (!v.integral) throw ConfigError(k, l, "modes must be integers");
         c.initial.modes.clear();
         for (double x : as_list(k, v, l)) c.initial.modes.push_back(int(x));
       }},

      {"experiment.thetas",
       [](RunConfig& c, auto& k, auto& v, int l) { c.experiment.thetas = as_list(k, v, l); }},
      {"experiment.nus",
       [](RunConfig& c, auto& k, auto& v, int l) { c.experiment.nus = as_list(k, v, l); }},
      {"experiment.samples",
       [](RunConfig& c, auto& k, auto& v, int l) { c.experiment.samples = int(as_int(k, v, l)); }},
      {"experiment.seed",
       [](RunConfig& c, auto& k, auto& v, int l) { c.experiment.seed = as_seed(k, v, l); }},

      {"output.dir", [](RunConfig& c, auto& k, auto& v, int l) { c.output_dir = as_string(k, v, l); }},
  };
  return table;
}

bool valid_key_text(const std::string& s) {
  if (s.empty()) return false;
  for (char ch : s)
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '.')) return false;
  return true;
}

}  // namespace

RunConfig parse_config(std::istream& in) {
  RunConfig config;
  std::string section;
  std::set<std::string> seen;
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("", line_no, "malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      if (!valid_key_text(section))
        throw ConfigError(section, line_no, "malformed section name");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      const std::string bare = trim(line);
      throw ConfigError(section.empty() ? bare : section + "." + bare, line_no,
                        "expected 'key = value'");
    }
    const std::string name = trim(line.substr(0, eq));
    if (!valid_key_text(name)) throw ConfigError(name, line_no, "malformed key");
    const std::string key = section.empty() ? name : section + "." + name;
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(key, line_no, "unknown key");
    if (!seen.insert(key).second) throw ConfigError(key, line_no, "duplicate key");
    it->second(config, key, parse_value(key, trim(line.substr(eq + 1)), line_no), line_no);
  }
  validate_config(config);
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", 0, "cannot open config file " + path.string());
  return parse_config(in);
}

void validate_config(const RunConfig& c) {
  auto require = [](bool ok, const char* key, const std::string& what) {
    if (!ok) throw ConfigError(key, 0, what);
  };
  require(c.nu > -0.5 && c.nu < 1.0, "model.nu", "must lie in (-1/2, 1)");
  require(c.theta >= 0.0 && c.theta <= 1.0, "model.theta", "must lie in [0, 1]");
  require(c.delta > 0.0, "model.delta", "must be positive");
  require(c.grid.nx >= 1, "grid.nx", "must be at least 1");
  require(c.grid.nv >= 4, "grid.nv", "must be at least 4");
  require(c.grid.ni >= 4, "grid.ni", "must be at least 4");
  require(!c.grid.v_max || *c.grid.v_max > 0.0, "grid.v_max", "must be positive");
  require(!c.grid.i_max || *c.grid.i_max > 0.0, "grid.i_max", "must be positive");
  require(c.grid.length > 0.0, "grid.length", "must be positive");
  require(c.solver.cfl > 0.0 && c.solver.cfl <= 0.9, "solver.cfl", "must lie in (0, 0.9]");
  require(c.solver.t_end > 0.0, "solver.t_end", "must be positive");
  require(c.solver.steps >= 0, "solver.steps", "must be nonnegative");
  require(c.solver.output_every >= 1, "solver.output_every", "must be at least 1");
  require(c.solver.energy_order >= 0 && c.solver.energy_order <= 2, "solver.energy_order",
          "must be 0, 1 or 2");
  require((c.initial.theta0.array() > 0.0).all(), "initial.theta0", "entries must be positive");
  require(c.initial.t_internal0 > 0.0, "initial.t_internal0", "must be positive");
  require(c.initial.amplitude >= 0.0, "initial.amplitude", "must be nonnegative");
  require(!c.initial.modes.empty(), "initial.modes", "must not be empty");
  for (int k : c.initial.modes) require(k >= 1, "initial.modes", "modes must be positive");
  require(!c.experiment.thetas.empty(), "experiment.thetas", "must not be empty");
  for (double t : c.experiment.thetas)
    require(t >= 0.0 && t <= 1.0, "experiment.thetas", "entries must lie in [0, 1]");
  for (double n : c.experiment.nus)
    require(n > -0.5 && n < 1.0, "experiment.nus", "entries must lie in (-1/2, 1)");
  require(c.experiment.samples >= 1, "experiment.samples", "must be at least 1");
}

std::string to_string(InitialKind kind) {
  switch (kind) {
    case InitialKind::equilibrium: return "equilibrium";
    case InitialKind::shifted: return "shifted";
    case InitialKind::anisotropic: return "anisotropic";
    case InitialKind::perturbation: return "perturbation";
  }
  return "?";
}

std::string to_string(Limiter limiter) {
  switch (limiter) {
    case Limiter::none: return "none";
    case Limiter::minmod: return "minmod";
    case Limiter::vanleer: return "vanleer";
  }
  return "?";
}

}  // namespace esbgk
