#pragma once

#include <stdexcept>
#include <string>

namespace barrier_mc {

// Invalid experiment wiring: unknown family kinds, curves failing their
// envelope, missing declared limits. Distinct from std::domain_error, which
// is reserved for out-of-range arguments to otherwise valid objects.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace barrier_mc
