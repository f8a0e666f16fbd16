// Run artifacts: diagnostics CSV, flat little-endian field snapshots with a
// text sidecar, and per-channel plot exports. Numbers carry 17 significant
// digits so reruns are bit-comparable.
#pragma once

#include <filesystem>
#include <fstream>

#include "plasmap/action.hpp"
#include "plasmap/config.hpp"

namespace plasmap {

inline void write_diagnostics_csv(const DiagnosticSeries& ds, const std::string& path) {
  std::ofstream out(path);
  require(bool(out), "write_diagnostics_csv: cannot open '" + path + "'");
  out << "t";
  for (const auto& n : ds.channel_names()) out << "," << n;
  out << "\n";
  out.precision(17);
  const auto& t = ds.times();
  for (std::size_t i = 0; i < t.size(); ++i) {
    out << t[i];
    for (const auto& n : ds.channel_names()) out << "," << ds.channel(n)[i];
    out << "\n";
  }
}

// flat little-endian float64 dump plus "<name>.shape": one line with the
// dims followed by each axis (min, length)
template <int D>
void write_snapshot(const Field<D>& f, const std::string& dir, const std::string& name) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  {
    std::ofstream bin(fs::path(dir) / (name + ".f64"), std::ios::binary);
    require(bool(bin), "write_snapshot: cannot open binary output");
    bin.write(reinterpret_cast<const char*>(f.data()), f.size() * sizeof(double));
  }
  std::ofstream side(fs::path(dir) / (name + ".shape"));
  require(bool(side), "write_snapshot: cannot open sidecar");
  side.precision(17);
  for (int d = 0; d < D; ++d) side << f.grid().extent(d) << (d + 1 < D ? " " : "");
  for (int d = 0; d < D; ++d)
    side << " " << f.grid().axis(d).min << " " << f.grid().axis(d).length;
  side << "\n";
}

template <int D>
Field<D> read_snapshot(const Grid<D>& g, const std::string& dir, const std::string& name) {
  namespace fs = std::filesystem;
  std::ifstream bin(fs::path(dir) / (name + ".f64"), std::ios::binary);
  require(bool(bin), "read_snapshot: cannot open '" + name + "'");
  Field<D> f(g);
  bin.read(reinterpret_cast<char*>(f.data()), f.size() * sizeof(double));
  require(bin.gcount() == std::streamsize(f.size() * sizeof(double)),
          "read_snapshot: truncated file");
  return f;
}

// one CSV per channel with t,value rows
inline void export_plotdata(const std::string& run_dir, const std::vector<std::string>& channels) {
  namespace fs = std::filesystem;
  std::ifstream in(fs::path(run_dir) / "diag.csv");
  require(bool(in), "export_plotdata: no diag.csv under '" + run_dir + "'");
  std::string header;
  require(bool(std::getline(in, header)), "export_plotdata: empty diag.csv");
  std::vector<std::string> names;
  {
    std::stringstream ss(header);
    std::string tok;
    while (std::getline(ss, tok, ',')) names.push_back(tok);
  }
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> row;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) row.push_back(tok);
    rows.push_back(row);
  }
  for (const auto& ch : channels) {
    int col = -1;
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == ch) col = int(i);
    if (col < 0) {
      std::string avail;
      for (std::size_t i = 1; i < names.size(); ++i)
        avail += (i > 1 ? ", " : "") + names[i];
      throw error("export_plotdata: no channel '" + ch + "'; available: " + avail);
    }
    std::ofstream out(fs::path(run_dir) / (ch + ".csv"));
    out << "t," << ch << "\n";
    for (const auto& row : rows) out << row[0] << "," << row[col] << "\n";
  }
}

}  // namespace plasmap
