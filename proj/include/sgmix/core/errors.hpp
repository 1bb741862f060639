#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

namespace sgmix {

// Bad caller input: dimension mismatch, invalid parameters, malformed files.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A computation stage could not produce a trustworthy result. Carries a
// JSON payload describing the state at the point of failure.
class StageFailure : public std::runtime_error {
 public:
  StageFailure(const std::string& what, nlohmann::json diagnostics = nlohmann::json::object())
      : std::runtime_error(what), diagnostics_(std::move(diagnostics)) {}

  const nlohmann::json& diagnostics() const { return diagnostics_; }

 private:
  nlohmann::json diagnostics_;
};

}  // namespace sgmix
