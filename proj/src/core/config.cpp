#include "config.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "csv.hpp"

namespace revclt::cli {

const char* to_string(Command c) noexcept {
  switch (c) {
    case Command::exact: return "exact";
    case Command::simulate: return "simulate";
    case Command::decompose: return "decompose";
    case Command::ineq: return "ineq";
    case Command::clt: return "clt";
    case Command::fclt: return "fclt";
    case Command::regen: return "regen";
    case Command::all: return "all";
  }
  return "all";
}

namespace {

using Setter = std::function<void(RunConfig&, const std::string&)>;

struct KeySpec {
  std::string key;  // config-file key; the flag is --key with '_' -> '-'
  std::string default_text;
  std::string help;
  Setter set;
};

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  double d = 0.0;
  // Accept integral scientific notation such as 1e5.
  if (report::parse_uint(v, out)) return out;
  if (report::parse_double(v, d) && d >= 0.0 && d < 1.8e19 && d == std::floor(d))
    return static_cast<std::uint64_t>(d);
  throw UsageError(key + ": malformed non-negative integer '" + v + "'");
}

std::uint64_t to_positive(const std::string& key, const std::string& v) {
  const std::uint64_t out = to_uint(key, v);
  if (out == 0) throw UsageError(key + ": must be positive");
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double d = 0.0;
  if (!report::parse_double(v, d) || !std::isfinite(d))
    throw UsageError(key + ": malformed number '" + v + "'");
  return d;
}

std::vector<std::string> split(const std::string& v) {
  std::vector<std::string> parts;
  std::stringstream in(v);
  std::string item;
  while (std::getline(in, item, ',')) parts.push_back(trim(item));
  return parts;
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& s : split(v)) out.push_back(to_double(key, s));
  if (out.empty()) throw UsageError(key + ": empty list");
  return out;
}

std::vector<double> positive_doubles(const std::string& key, const std::string& v) {
  auto out = to_doubles(key, v);
  for (double d : out)
    if (!(d > 0.0)) throw UsageError(key + ": values must be positive");
  return out;
}

Command to_command(const std::string& v) {
  static const std::pair<const char*, Command> kNames[] = {
      {"exact", Command::exact}, {"simulate", Command::simulate}, {"decompose", Command::decompose},
      {"ineq", Command::ineq},   {"clt", Command::clt},           {"fclt", Command::fclt},
      {"regen", Command::regen}, {"all", Command::all}};
  for (const auto& [name, c] : kNames)
    if (v == name) return c;
  throw UsageError("command: unknown command '" + v + "'");
}

std::string join(const auto& values) {
  std::string out;
  for (const auto& v : values) {
    if (!out.empty()) out += ',';
    if constexpr (std::is_floating_point_v<std::decay_t<decltype(v)>>)
      out += report::format_double(v);
    else
      out += std::to_string(v);
  }
  return out;
}

const std::vector<KeySpec>& key_specs() {
  static const std::vector<KeySpec> specs = {
      {"n", "1000", "chain length",
       [](RunConfig& c, const std::string& v) { c.n = to_positive("n", v); }},
      {"n_grid", "per command", "comma-separated chain lengths, strictly increasing",
       [](RunConfig& c, const std::string& v) {
         std::vector<std::uint64_t> g;
         for (const auto& s : split(v)) g.push_back(to_positive("n_grid", s));
         if (g.empty()) throw UsageError("n_grid: empty list");
         for (std::size_t i = 1; i < g.size(); ++i)
           if (g[i] <= g[i - 1]) throw UsageError("n_grid: must be strictly increasing");
         c.n_grid = std::move(g);
       }},
      {"reps", "10000", "Monte Carlo replicates",
       [](RunConfig& c, const std::string& v) {
         c.reps = to_uint("reps", v);
         if (c.reps < 2) throw UsageError("reps: must be at least 2");
       }},
      {"seed", "42 or $REVCLT_SEED", "master seed",
       [](RunConfig& c, const std::string& v) { c.master_seed = to_uint("seed", v); }},
      {"t_grid", "0.25,0.5,0.75,1", "time grid in (0,1], sorted",
       [](RunConfig& c, const std::string& v) {
         auto g = to_doubles("t_grid", v);
         for (std::size_t i = 0; i < g.size(); ++i) {
           if (!(g[i] > 0.0 && g[i] <= 1.0))
             throw UsageError("t_grid: grid point " + report::format_double(g[i]) +
                              " out of (0,1]");
           if (i > 0 && g[i] < g[i - 1]) throw UsageError("t_grid: must be sorted");
         }
         c.t_grid = std::move(g);
       }},
      {"p", "1.5,2,4", "L_p exponents (> 1)",
       [](RunConfig& c, const std::string& v) {
         auto ps = to_doubles("p", v);
         for (double p : ps)
           if (!(p > 1.0)) throw UsageError("p: exponents must exceed 1");
         c.p = std::move(ps);
       }},
      {"x_sigma", "1,2,4", "tail thresholds in units of sigma_n",
       [](RunConfig& c, const std::string& v) { c.x_sigma = positive_doubles("x_sigma", v); }},
      {"delta_grid", "0.01,0.05,0.1,0.25,0.5", "tightness window fractions",
       [](RunConfig& c, const std::string& v) { c.delta_grid = positive_doubles("delta_grid", v); }},
      {"epsilon", "0.5", "tightness level in units of sigma_n",
       [](RunConfig& c, const std::string& v) {
         c.epsilon = to_double("epsilon", v);
         if (!(c.epsilon > 0.0)) throw UsageError("epsilon: must be positive");
       }},
      {"m_grid", "0,1,2,3", "uniform-integrability truncation levels",
       [](RunConfig& c, const std::string& v) {
         auto g = to_doubles("m_grid", v);
         for (double m : g)
           if (!(m >= 0.0)) throw UsageError("m_grid: levels must be non-negative");
         c.m_grid = std::move(g);
       }},
      {"horizon", "path length", "decomposition horizon",
       [](RunConfig& c, const std::string& v) { c.horizon = to_positive("horizon", v); }},
      {"key2_grid", "100,1000", "chain lengths of the nested conditional-variance estimate (<= 10000)",
       [](RunConfig& c, const std::string& v) {
         std::vector<std::uint64_t> g;
         for (const auto& s : split(v)) {
           g.push_back(to_positive("key2_grid", s));
           if (g.back() > 10'000) throw UsageError("key2_grid: values must not exceed 10000");
         }
         if (g.empty()) throw UsageError("key2_grid: empty list");
         c.key2_grid = std::move(g);
       }},
      {"outer_reps", "200", "outer replicates of the nested conditional-variance estimate",
       [](RunConfig& c, const std::string& v) {
         c.outer_reps = to_uint("outer_reps", v);
         if (c.outer_reps < 2) throw UsageError("outer_reps: must be at least 2");
       }},
      {"inner_reps", "200", "chains per start state (nested and conditional estimates)",
       [](RunConfig& c, const std::string& v) {
         c.inner_reps = to_uint("inner_reps", v);
         if (c.inner_reps < 2) throw UsageError("inner_reps: must be at least 2");
       }},
      {"blocks", "1000000", "regeneration cycles for the regen command",
       [](RunConfig& c, const std::string& v) {
         c.blocks = to_uint("blocks", v);
         if (c.blocks < 2) throw UsageError("blocks: must be at least 2");
       }},
      {"trajectory", "simulate one", "trajectory CSV to decompose",
       [](RunConfig& c, const std::string& v) { c.trajectory = v; }},
      {"out", "revclt_out", "output directory",
       [](RunConfig& c, const std::string& v) {
         if (v.empty()) throw UsageError("out: empty path");
         c.out_dir = v;
       }},
      {"threads", "auto", "worker threads (0 or auto = hardware)",
       [](RunConfig& c, const std::string& v) {
         c.threads = v == "auto" ? 0u : static_cast<unsigned>(to_uint("threads", v));
       }},
  };
  return specs;
}

const KeySpec* find_key(const std::string& key) {
  for (const auto& k : key_specs())
    if (k.key == key) return &k;
  return nullptr;
}

std::string flag_name(const std::string& key) {
  std::string f = key;
  std::replace(f.begin(), f.end(), '_', '-');
  return "--" + f;
}

void build_app(CLI::App& app, std::string& command, std::string& config_path,
               std::map<std::string, std::string>& flag_values) {
  app.add_option("command", command,
                 "one of exact, simulate, decompose, ineq, clt, fclt, regen, all "
                 "(may also come from the config file)");
  app.add_option("--config", config_path, "key = value config file (default: none)");
  for (const auto& k : key_specs()) {
    app.add_option(flag_name(k.key), flag_values[k.key],
                   k.help + " (default: " + k.default_text + ")");
  }
}

}  // namespace

std::map<std::string, std::string> read_key_values(const std::string& text,
                                                   const std::string& source) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError(source + ":" + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw UsageError(source + ":" + std::to_string(lineno) + ": missing key");
    if (key != "command" && !find_key(key)) throw UsageError(key + ": unknown key in " + source);
    if (out.count(key)) throw UsageError(key + ": given twice in " + source);
    out[key] = value;
  }
  return out;
}

std::string usage_text() {
  CLI::App app{"revclt: simulation and verification of the reversible holding chain", "revclt"};
  std::string command, config_path;
  std::map<std::string, std::string> values;
  build_app(app, command, config_path, values);
  return app.help();
}

ParseResult parse_config(int argc, const char* const* argv) {
  CLI::App app{"revclt: simulation and verification of the reversible holding chain", "revclt"};
  std::string command, config_path;
  std::map<std::string, std::string> flag_values;
  build_app(app, command, config_path, flag_values);

  ParseResult result;
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    result.help = true;
    result.help_text = app.help();
    return result;
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  RunConfig& cfg = result.config;
  if (const char* env = std::getenv("REVCLT_SEED"); env && *env)
    cfg.master_seed = to_uint("REVCLT_SEED", env);

  std::map<std::string, std::string> file_values;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw UsageError("config: cannot read " + config_path);
    std::stringstream buf;
    buf << in.rdbuf();
    file_values = read_key_values(buf.str(), config_path);
  }

  auto given = [&](const std::string& key) { return app.count(flag_name(key)) > 0; };
  if (given("n") && given("n_grid")) throw UsageError("n: conflicts with --n-grid");

  std::string command_text = command;
  if (command_text.empty()) {
    if (auto it = file_values.find("command"); it != file_values.end()) command_text = it->second;
  }
  if (command_text.empty()) throw UsageError("command: missing required command");
  cfg.command = to_command(command_text);

  for (const auto& k : key_specs()) {
    if (given(k.key)) {
      k.set(cfg, flag_values[k.key]);
    } else if (auto it = file_values.find(k.key); it != file_values.end()) {
      k.set(cfg, it->second);
    }
  }
  return result;
}

std::string to_key_values(const RunConfig& c) {
  std::ostringstream out;
  out << "command = " << to_string(c.command) << '\n'
      << "n = " << c.n << '\n';
  if (c.n_grid) out << "n_grid = " << join(*c.n_grid) << '\n';
  out << "reps = " << c.reps << '\n'
      << "seed = " << c.master_seed << '\n'
      << "t_grid = " << join(c.t_grid) << '\n'
      << "p = " << join(c.p) << '\n'
      << "x_sigma = " << join(c.x_sigma) << '\n'
      << "delta_grid = " << join(c.delta_grid) << '\n'
      << "epsilon = " << report::format_double(c.epsilon) << '\n'
      << "m_grid = " << join(c.m_grid) << '\n';
  if (c.horizon) out << "horizon = " << c.horizon << '\n';
  out << "key2_grid = " << join(c.key2_grid) << '\n'
      << "outer_reps = " << c.outer_reps << '\n'
      << "inner_reps = " << c.inner_reps << '\n'
      << "blocks = " << c.blocks << '\n';
  if (!c.trajectory.empty()) out << "trajectory = " << c.trajectory << '\n';
  out << "out = " << c.out_dir.string() << '\n'
      << "threads = " << (c.threads ? std::to_string(c.threads) : std::string("auto")) << '\n';
  return out.str();
}

}  // namespace revclt::cli
