#include "mlrsga/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace mlrsga {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct RawValue {
  std::string value;
  int line = 0;
};

using Section = std::map<std::string, RawValue>;

struct RawConfig {
  std::map<std::string, Section> sections;
  std::string filename;
};

[[noreturn]] void fail(const RawConfig& raw, int line, const std::string& field,
                       const std::string& message) {
  std::ostringstream os;
  os << raw.filename << ":" << line << ": " << field << ": " << message;
  throw ConfigError(os.str(), line, field);
}

double parse_double(const RawConfig& raw, const std::string& field, const RawValue& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v.value, &pos);
    if (pos != v.value.size()) throw std::invalid_argument("trailing characters");
    return d;
  } catch (const std::exception&) {
    fail(raw, v.line, field, "expected a number, got '" + v.value + "'");
  }
}

int parse_int(const RawConfig& raw, const std::string& field, const RawValue& v) {
  int out = 0;
  const auto [ptr, ec] = std::from_chars(v.value.data(), v.value.data() + v.value.size(), out);
  if (ec != std::errc() || ptr != v.value.data() + v.value.size()) {
    fail(raw, v.line, field, "expected an integer, got '" + v.value + "'");
  }
  return out;
}

std::uint64_t parse_u64(const RawConfig& raw, const std::string& field, const RawValue& v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.value.data(), v.value.data() + v.value.size(), out);
  if (ec != std::errc() || ptr != v.value.data() + v.value.size()) {
    fail(raw, v.line, field, "expected a non-negative integer, got '" + v.value + "'");
  }
  return out;
}

bool parse_bool(const RawConfig& raw, const std::string& field, const RawValue& v) {
  if (v.value == "true" || v.value == "on" || v.value == "1") return true;
  if (v.value == "false" || v.value == "off" || v.value == "0") return false;
  fail(raw, v.line, field, "expected true/false, got '" + v.value + "'");
}

RawConfig tokenize(const std::string& text, const std::string& filename) {
  RawConfig raw;
  raw.filename = filename;
  std::istringstream is(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(raw, lineno, "<section>", "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) fail(raw, lineno, "<section>", "empty section name");
      if (section != "game" && section != "run" && section.rfind("solver.", 0) != 0) {
        fail(raw, lineno, section, "unknown section (expected game, run, or solver.<name>)");
      }
      raw.sections.try_emplace(section);
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      fail(raw, lineno, section.empty() ? "<top>" : section, "expected 'key = value'");
    }
    if (section.empty()) fail(raw, lineno, "<top>", "key before any [section] header");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(raw, lineno, section, "empty key");
    auto [it, inserted] = raw.sections[section].try_emplace(key, RawValue{value, lineno});
    if (!inserted) fail(raw, lineno, section + "." + key, "duplicate key");
  }
  return raw;
}

void apply_solver_section(const RawConfig& raw, const std::string& section_name,
                          const Section& section, SolverConfig& cfg) {
  for (const auto& [key, v] : section) {
    const std::string field = section_name + "." + key;
    if (key == "eta") {
      cfg.eta = parse_double(raw, field, v);
    } else if (key == "tau") {
      cfg.tau = parse_double(raw, field, v);
    } else if (key == "max_iter") {
      cfg.max_iter = parse_int(raw, field, v);
    } else if (key == "residual_tol") {
      cfg.residual_tol = parse_double(raw, field, v);
    } else if (key == "record_every") {
      cfg.record_every = parse_int(raw, field, v);
    } else if (key == "skip_tol") {
      cfg.skip_tol = parse_double(raw, field, v);
    } else if (key == "divergence_tol") {
      cfg.divergence_tol = parse_double(raw, field, v);
    } else if (key == "secant_init") {
      if (v.value == "zero") {
        cfg.secant_init.strategy = SecantInit::kZero;
      } else if (v.value == "fd") {
        cfg.secant_init.strategy = SecantInit::kFiniteDifference;
      } else if (v.value == "random") {
        cfg.secant_init.strategy = SecantInit::kRandom;
      } else {
        fail(raw, v.line, field, "expected zero, fd, or random, got '" + v.value + "'");
      }
    } else if (key == "secant_scale") {
      cfg.secant_init.scale = parse_double(raw, field, v);
    } else {
      fail(raw, v.line, field, "unknown key");
    }
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(raw.filename + ": " + section_name + ": " + e.what(), 0, section_name);
  }
}

}  // namespace

ConfigError::ConfigError(const std::string& message, int line_in, std::string field_in)
    : std::runtime_error(message), line(line_in), field(std::move(field_in)) {}

SolverConfig RunConfig::solver_config(const std::string& name) const {
  const auto it = solver_configs.find(name);
  SolverConfig cfg = (it != solver_configs.end()) ? it->second : SolverConfig{};
  cfg.secant_init.seed = seed;
  return cfg;
}

RunConfig parse_run_config(const std::string& text, const std::string& filename) {
  const RawConfig raw = tokenize(text, filename);
  RunConfig cfg;

  bool game_seed_given = false;
  for (const auto& [name, section] : raw.sections) {
    if (name == "game") {
      for (const auto& [key, v] : section) {
        const std::string field = "game." + key;
        if (key == "name") {
          cfg.game = v.value;
          if (std::find(benchmark_names().begin(), benchmark_names().end(), cfg.game) ==
              benchmark_names().end()) {
            std::string known;
            for (const std::string& n : benchmark_names()) known += " " + n;
            fail(raw, v.line, field, "unknown game '" + v.value + "' (known:" + known + ")");
          }
        } else if (key == "coupling") {
          cfg.game_params.coupling = parse_double(raw, field, v);
        } else if (key == "players") {
          cfg.game_params.players = parse_int(raw, field, v);
        } else if (key == "dims") {
          cfg.game_params.dims.clear();
          for (const std::string& item : split_list(v.value)) {
            cfg.game_params.dims.push_back(parse_int(raw, field, RawValue{item, v.line}));
          }
          if (cfg.game_params.dims.empty()) fail(raw, v.line, field, "expected a list of sizes");
        } else if (key == "seed") {
          cfg.game_params.seed = parse_u64(raw, field, v);
          game_seed_given = true;
        } else if (key == "margin") {
          cfg.game_params.stability_margin = parse_double(raw, field, v);
        } else {
          fail(raw, v.line, field, "unknown key");
        }
      }
    } else if (name == "run") {
      for (const auto& [key, v] : section) {
        const std::string field = "run." + key;
        if (key == "solvers") {
          cfg.solvers = split_list(v.value);
          if (cfg.solvers.empty()) fail(raw, v.line, field, "expected a list of solvers");
          for (const std::string& s : cfg.solvers) {
            if (s != "multilrsga" && s != "gd" && s != "sga") {
              fail(raw, v.line, field,
                   "unknown solver '" + s + "' (known: multilrsga gd sga)");
            }
          }
        } else if (key == "out") {
          cfg.out_dir = v.value;
        } else if (key == "seed") {
          cfg.seed = parse_u64(raw, field, v);
        } else if (key == "emit") {
          cfg.emit_csv = cfg.emit_json = cfg.emit_svg = false;
          for (const std::string& item : split_list(v.value)) {
            if (item == "csv") {
              cfg.emit_csv = true;
            } else if (item == "json") {
              cfg.emit_json = true;
            } else if (item == "svg") {
              cfg.emit_svg = true;
            } else {
              fail(raw, v.line, field, "unknown emit kind '" + item + "' (known: csv json svg)");
            }
          }
        } else if (key == "start") {
          std::vector<double> start;
          for (const std::string& item : split_list(v.value)) {
            start.push_back(parse_double(raw, field, RawValue{item, v.line}));
          }
          if (start.empty()) fail(raw, v.line, field, "expected a list of coordinates");
          cfg.start = std::move(start);
        } else if (key == "dump_secant") {
          cfg.dump_secant = parse_bool(raw, field, v);
        } else {
          fail(raw, v.line, field, "unknown key");
        }
      }
    } else {  // solver.<name>
      const std::string solver = name.substr(std::string("solver.").size());
      if (solver != "multilrsga" && solver != "gd" && solver != "sga") {
        throw ConfigError(raw.filename + ": unknown solver section [" + name + "]", 0, name);
      }
      SolverConfig sc;
      apply_solver_section(raw, name, section, sc);
      cfg.solver_configs[solver] = sc;
    }
  }

  if (!game_seed_given) cfg.game_params.seed = cfg.seed;

  // The comparison contract: every selected solver shares tolerance and budget.
  const SolverConfig ref = cfg.solver_config(cfg.solvers.front());
  for (const std::string& s : cfg.solvers) {
    const SolverConfig sc = cfg.solver_config(s);
    if (sc.residual_tol != ref.residual_tol || sc.max_iter != ref.max_iter) {
      throw ConfigError(
          raw.filename + ": solver." + s +
              ": residual_tol and max_iter must match across selected solvers",
          0, "solver." + s);
    }
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_run_config(buffer.str(), path);
}

}  // namespace mlrsga
