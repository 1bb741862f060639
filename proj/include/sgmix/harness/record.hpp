#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sgmix/core/errors.hpp"

namespace sgmix {

// Tidy table: one observation per row.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct StageRecord {
  std::string name;
  std::vector<std::string> outputs;
  double wall_seconds = -1.0;  // negative when timings are not recorded
};

struct RunRecord {
  std::string config_hash;
  std::string pipeline;
  std::uint64_t seed = 0;
  std::vector<StageRecord> stages;
  nlohmann::json metrics = nlohmann::json::object();
  std::map<std::string, Table> tables;         // plot data keyed by kind
  std::vector<std::string> substreams;         // named RNG streams the run drew from
};

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_csv(const Table& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path);
  for (size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << t.columns[c];
  out << '\n';
  for (const auto& row : t.rows) {
    if (row.size() != t.columns.size()) throw InvalidInput("table row width does not match its header");
    for (size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_double(row[c]);
    out << '\n';
  }
}

inline Table read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot read " + path);
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput(path + ": empty file");
  std::stringstream hs(line);
  for (std::string cell; std::getline(hs, cell, ',');) t.columns.push_back(cell);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw InvalidInput(path + ": non-numeric cell '" + cell + "'");
      }
    }
    if (row.size() != t.columns.size()) throw InvalidInput(path + ": ragged row");
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline const std::map<std::string, std::vector<std::string>>& plot_schemas() {
  static const std::map<std::string, std::vector<std::string>> schemas{
      {"newton-trace", {"iteration", "max_error", "dominance_margin"}},
      {"collision", {"pair_id", "moment_distance", "delta_param", "tv", "tv_ci"}},
      {"sweep", {"separation", "final_max_error", "initial_max_error", "converged"}},
      {"singular-values", {"index", "singular_value"}},
  };
  return schemas;
}

// Writes <dir>/<kind>.csv and returns the path.
inline std::string emit_plotdata(const RunRecord& rec, const std::string& kind, const std::string& dir) {
  const auto& schemas = plot_schemas();
  if (!schemas.count(kind)) throw InvalidInput("unknown plot kind '" + kind + "'");
  const auto it = rec.tables.find(kind);
  if (it == rec.tables.end()) throw InvalidInput("run record has no '" + kind + "' data");
  if (it->second.columns != schemas.at(kind)) throw InvalidInput("'" + kind + "' table does not match its schema");
  const std::string path = dir + "/" + kind + ".csv";
  write_csv(it->second, path);
  return path;
}

inline nlohmann::json to_json(const RunRecord& r) {
  nlohmann::json stages = nlohmann::json::array();
  for (const auto& s : r.stages) {
    nlohmann::json js{{"name", s.name}, {"outputs", s.outputs}};
    if (s.wall_seconds >= 0.0) js["wall_seconds"] = s.wall_seconds;
    stages.push_back(js);
  }
  return {{"config_hash", r.config_hash},
          {"pipeline", r.pipeline},
          {"seed", r.seed},
          {"stages", stages},
          {"metrics", r.metrics},
          {"substreams", r.substreams}};
}

}  // namespace sgmix
