#pragma once

#include <fstream>
#include <set>
#include <string>

#include <json.hpp>

#include "sgmix/core/mixture.hpp"

namespace sgmix {

inline std::vector<double> to_std(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

inline Vec to_vec(const nlohmann::json& j) {
  if (!j.is_array()) throw InvalidInput("expected a numeric array");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw InvalidInput("expected a numeric array");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

inline void reject_unknown_fields(const nlohmann::json& j, const std::set<std::string>& allowed,
                                  const std::string& where) {
  if (!j.is_object()) throw InvalidInput(where + ": expected an object");
  for (const auto& [key, _] : j.items()) {
    if (!allowed.count(key)) throw InvalidInput(where + ": unknown field '" + key + "'");
  }
}

inline MixtureParams mixture_from_json(const nlohmann::json& j) {
  reject_unknown_fields(j, {"d", "components"}, "mixture");
  if (!j.contains("d") || !j.contains("components")) throw InvalidInput("mixture: need 'd' and 'components'");
  if (!j["d"].is_number_integer()) throw InvalidInput("mixture: 'd' must be an integer");
  const int d = j["d"].get<int>();
  std::vector<Component> comps;
  for (const auto& c : j["components"]) {
    reject_unknown_fields(c, {"w", "mu", "sigma"}, "component");
    if (!c.contains("w") || !c.contains("mu") || !c.contains("sigma")) {
      throw InvalidInput("component: need 'w', 'mu', 'sigma'");
    }
    if (!c["w"].is_number() || !c["sigma"].is_number()) throw InvalidInput("component: 'w' and 'sigma' must be numbers");
    Component comp{c["w"].get<double>(), to_vec(c["mu"]), c["sigma"].get<double>()};
    if (comp.mean.size() != d) throw InvalidInput("component: 'mu' length differs from 'd'");
    comps.push_back(std::move(comp));
  }
  return MixtureParams(std::move(comps));
}

inline nlohmann::json mixture_to_json(const MixtureParams& mix) {
  nlohmann::json j;
  j["d"] = mix.dim();
  j["components"] = nlohmann::json::array();
  for (const auto& c : mix.components()) {
    j["components"].push_back({{"w", c.weight}, {"mu", to_std(c.mean)}, {"sigma", c.sigma}});
  }
  return j;
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

inline MixtureParams read_mixture(const std::string& path) { return mixture_from_json(read_json_file(path)); }

}  // namespace sgmix
