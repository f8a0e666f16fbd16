// Run configuration: INI-style files with [grid] [species] [time] [scenario]
// [output] sections, strict key validation with typo suggestions, and a
// manifest writer that round-trips through the parser.
#pragma once

#include <fstream>
#include <map>
#include <sstream>

#include "plasmap/core.hpp"

namespace plasmap {

enum class RunMode { hybrid, direct, both, geometry_tests };

inline std::string to_string(RunMode m) {
  switch (m) {
    case RunMode::hybrid: return "hybrid";
    case RunMode::direct: return "direct";
    case RunMode::both: return "both";
    default: return "geometry-tests";
  }
}

struct RunConfig {
  // [grid]
  int nx = 64;
  int np = 128;
  double xlen = 0.0;  // 0: derived from the scenario wavenumber
  double pmax = 8.0;
  // [species]
  double m = 1.0;
  double e = 1.0;
  double c = 1.0;
  // [time]
  double dt = 0.0;  // 0: derived from cfl
  double t_end = 10.0;
  double cfl = 0.5;
  int interp_order = 3;
  // [scenario]
  std::string scenario = "landau";
  std::string mode = "hybrid";
  double amplitude = 0.01;
  double k = 0.5;
  double vb = 2.4;
  double temperature = 1.0;
  unsigned long seed = 1234;
  int series_max_order = 16;
  double series_tol = 1e-12;
  // [output]
  std::string out_dir = "out";
  int cadence = 10;

  RunMode run_mode() const {
    if (mode == "hybrid") return RunMode::hybrid;
    if (mode == "direct") return RunMode::direct;
    if (mode == "both") return RunMode::both;
    if (mode == "geometry-tests") return RunMode::geometry_tests;
    throw error("config: unknown mode '" + mode + "'");
  }

  friend bool operator==(const RunConfig& a, const RunConfig& b) {
    return a.nx == b.nx && a.np == b.np && a.xlen == b.xlen && a.pmax == b.pmax && a.m == b.m &&
           a.e == b.e && a.c == b.c && a.dt == b.dt && a.t_end == b.t_end && a.cfl == b.cfl &&
           a.interp_order == b.interp_order && a.scenario == b.scenario && a.mode == b.mode &&
           a.amplitude == b.amplitude && a.k == b.k && a.vb == b.vb &&
           a.temperature == b.temperature && a.seed == b.seed &&
           a.series_max_order == b.series_max_order && a.series_tol == b.series_tol &&
           a.out_dir == b.out_dir && a.cadence == b.cadence;
  }
};

namespace cfgdet {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline int edit_distance(const std::string& a, const std::string& b) {
  std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = int(j);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = int(i);
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

inline std::string suggest(const std::string& bad, const std::vector<std::string>& known) {
  std::string best;
  int dist = 1000;
  for (const auto& k : known) {
    const int d = edit_distance(bad, k);
    if (d < dist) {
      dist = d;
      best = k;
    }
  }
  if (dist <= 2 && !best.empty()) return "; did you mean '" + best + "'?";
  return "";
}

inline const std::map<std::string, std::vector<std::string>>& key_table() {
  static const std::map<std::string, std::vector<std::string>> table = {
      {"grid", {"nx", "np", "xlen", "pmax"}},
      {"species", {"m", "e", "c"}},
      {"time", {"dt", "t_end", "cfl", "interp_order"}},
      {"scenario",
       {"name", "mode", "amplitude", "k", "vb", "temperature", "seed", "series_max_order",
        "series_tol"}},
      {"output", {"dir", "cadence"}}};
  return table;
}

}  // namespace cfgdet

inline RunConfig parse_config(std::istream& in, const std::string& origin) {
  RunConfig cfg;
  std::string line, section;
  int lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw error(origin + ":" + std::to_string(lineno) + ": " + msg);
  };
  auto to_double = [&](const std::string& v) {
    try {
      std::size_t pos = 0;
      const double d = std::stod(v, &pos);
      if (pos != v.size()) fail("malformed number '" + v + "'");
      return d;
    } catch (const std::exception&) {
      fail("malformed number '" + v + "'");
    }
    return 0.0;
  };
  auto to_int = [&](const std::string& v) {
    const double d = to_double(v);
    if (d != std::floor(d)) fail("expected an integer, got '" + v + "'");
    return int(d);
  };

  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = cfgdet::trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header");
      section = cfgdet::trim(line.substr(1, line.size() - 2));
      if (!cfgdet::key_table().count(section)) {
        std::vector<std::string> names;
        for (const auto& kv : cfgdet::key_table()) names.push_back(kv.first);
        fail("unknown section '" + section + "'" + cfgdet::suggest(section, names));
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected 'key = value'");
    const std::string key = cfgdet::trim(line.substr(0, eq));
    const std::string val = cfgdet::trim(line.substr(eq + 1));
    if (section.empty()) fail("key '" + key + "' outside any section");
    const auto& known = cfgdet::key_table().at(section);
    if (std::find(known.begin(), known.end(), key) == known.end())
      fail("unknown key '" + key + "' in [" + section + "]" + cfgdet::suggest(key, known));

    if (section == "grid") {
      if (key == "nx") cfg.nx = to_int(val);
      else if (key == "np") cfg.np = to_int(val);
      else if (key == "xlen") cfg.xlen = to_double(val);
      else cfg.pmax = to_double(val);
    } else if (section == "species") {
      if (key == "m") cfg.m = to_double(val);
      else if (key == "e") cfg.e = to_double(val);
      else cfg.c = to_double(val);
    } else if (section == "time") {
      if (key == "dt") cfg.dt = to_double(val);
      else if (key == "t_end") cfg.t_end = to_double(val);
      else if (key == "cfl") cfg.cfl = to_double(val);
      else cfg.interp_order = to_int(val);
    } else if (section == "scenario") {
      if (key == "name") cfg.scenario = val;
      else if (key == "mode") cfg.mode = val;
      else if (key == "amplitude") cfg.amplitude = to_double(val);
      else if (key == "k") cfg.k = to_double(val);
      else if (key == "vb") cfg.vb = to_double(val);
      else if (key == "temperature") cfg.temperature = to_double(val);
      else if (key == "seed") cfg.seed = (unsigned long)to_double(val);
      else if (key == "series_max_order") cfg.series_max_order = to_int(val);
      else cfg.series_tol = to_double(val);
    } else {  // output
      if (key == "dir") cfg.out_dir = val;
      else cfg.cadence = to_int(val);
    }
  }

  // validation
  auto positive = [&](double v, const std::string& name) {
    if (v <= 0) throw error("config: " + name + " must be positive");
  };
  if (cfg.nx < 4) throw error("config: grid.nx must be at least 4");
  if (cfg.np < 4) throw error("config: grid.np must be at least 4");
  positive(cfg.pmax, "grid.pmax");
  positive(cfg.m, "species.m");
  positive(cfg.c, "species.c");
  if (cfg.dt < 0 || (cfg.dt == 0 && cfg.cfl <= 0)) throw error("config: time.dt must be positive");
  if (cfg.dt > 0) positive(cfg.dt, "time.dt");
  positive(cfg.t_end, "time.t_end");
  positive(cfg.cfl, "time.cfl");
  if (cfg.interp_order != 3 && cfg.interp_order != 5)
    throw error("config: time.interp_order must be 3 or 5");
  if (cfg.xlen < 0) throw error("config: grid.xlen must be nonnegative");
  positive(cfg.k, "scenario.k");
  positive(cfg.temperature, "scenario.temperature");
  if (cfg.cadence < 1) throw error("config: output.cadence must be at least 1");
  if (cfg.scenario != "landau" && cfg.scenario != "two_stream" && cfg.scenario != "cold_beam")
    throw error("config: unknown scenario '" + cfg.scenario + "'");
  cfg.run_mode();  // validates mode
  positive(cfg.series_tol, "scenario.series_tol");
  if (cfg.series_max_order < 1) throw error("config: scenario.series_max_order must be >= 1");
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw error("config: cannot open '" + path + "'");
  return parse_config(in, path);
}

inline std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

inline void write_manifest(const RunConfig& c, const std::string& path) {
  std::ofstream out(path);
  require(bool(out), "write_manifest: cannot open '" + path + "'");
  out << "# resolved run configuration\n";
  out << "[grid]\n";
  out << "nx = " << c.nx << "\n";
  out << "np = " << c.np << "\n";
  out << "xlen = " << format_double(c.xlen) << "\n";
  out << "pmax = " << format_double(c.pmax) << "\n";
  out << "[species]\n";
  out << "m = " << format_double(c.m) << "\n";
  out << "e = " << format_double(c.e) << "\n";
  out << "c = " << format_double(c.c) << "\n";
  out << "[time]\n";
  out << "dt = " << format_double(c.dt) << "\n";
  out << "t_end = " << format_double(c.t_end) << "\n";
  out << "cfl = " << format_double(c.cfl) << "\n";
  out << "interp_order = " << c.interp_order << "\n";
  out << "[scenario]\n";
  out << "name = " << c.scenario << "\n";
  out << "mode = " << c.mode << "\n";
  out << "amplitude = " << format_double(c.amplitude) << "\n";
  out << "k = " << format_double(c.k) << "\n";
  out << "vb = " << format_double(c.vb) << "\n";
  out << "temperature = " << format_double(c.temperature) << "\n";
  out << "seed = " << c.seed << "\n";
  out << "series_max_order = " << c.series_max_order << "\n";
  out << "series_tol = " << format_double(c.series_tol) << "\n";
  out << "[output]\n";
  out << "dir = " << c.out_dir << "\n";
  out << "cadence = " << c.cadence << "\n";
}

}  // namespace plasmap
