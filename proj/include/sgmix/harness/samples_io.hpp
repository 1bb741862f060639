#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sgmix/core/errors.hpp"
#include "sgmix/core/sampling.hpp"
#include "sgmix/harness/record.hpp"

namespace sgmix {

// CSV with header x0,x1,...; one draw per row at 17 significant digits.
inline void write_samples_csv(const SampleBatch& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path);
  for (int a = 0; a < s.dim(); ++a) out << (a ? "," : "") << 'x' << a;
  out << '\n';
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    for (int a = 0; a < s.dim(); ++a) out << (a ? "," : "") << format_double(s.points(i, a));
    out << '\n';
  }
}

inline SampleBatch read_samples_csv(const std::string& path) {
  const Table t = read_csv(path);
  if (t.columns.empty() || t.rows.empty()) throw InvalidInput(path + ": no samples");
  for (size_t a = 0; a < t.columns.size(); ++a) {
    if (t.columns[a] != "x" + std::to_string(a)) throw InvalidInput(path + ": expected header x0,x1,...");
  }
  SampleBatch s;
  s.points.resize(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(t.columns.size()));
  for (size_t i = 0; i < t.rows.size(); ++i)
    for (size_t a = 0; a < t.columns.size(); ++a) s.points(i, a) = t.rows[i][a];
  if (!s.points.allFinite()) throw InvalidInput(path + ": non-finite sample");
  return s;
}

}  // namespace sgmix
