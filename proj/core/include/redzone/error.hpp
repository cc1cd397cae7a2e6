#pragma once

#include <stdexcept>
#include <string>

namespace redzone {

// Invalid argument to a numeric kernel (negative time, u outside (0,1), ...).
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

// Configuration or model-parameter validation failure. `path` names the
// offending field (e.g. "hazard.burnin.shape") when known.
class ConfigError : public std::invalid_argument {
  public:
    explicit ConfigError(const std::string& message, std::string path = {})
        : std::invalid_argument(path.empty() ? message : path + ": " + message),
          path_(std::move(path)),
          detail_(message) {}

    const std::string& path() const noexcept { return path_; }
    // The message without the path prefix.
    const std::string& detail() const noexcept { return detail_; }

  private:
    std::string path_;
    std::string detail_;
};

// Operation applied to a unit in the wrong state (e.g. hazard of a failed unit).
class StateError : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

// Parallel composition with every unit certainly failed.
class CompositionError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace redzone
