#ifndef KANPPO_ERRORS_HPP_
#define KANPPO_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace kanppo {

// Unrecoverable runtime failure (non-finite outputs, dead bridge child).
// The CLI maps this to exit code 3.
struct RunAbort : std::runtime_error {
  explicit RunAbort(const std::string& what) : std::runtime_error(what) {}
};

// Invalid experiment configuration; CLI exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace kanppo

#endif  // KANPPO_ERRORS_HPP_
