#ifndef SENSORVIS_ERROR_HPP_
#define SENSORVIS_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace sensorvis {

enum class ErrorKind {
  kInvalidArgument,  // violated precondition or bad configuration value
  kData,             // malformed or inconsistent input data
  kInternal,
};

// Every error raised by the library carries the module it originated from,
// so the CLI can report provenance.
class Error : public std::runtime_error {
 public:
  Error(std::string_view module, ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(module) + ": " + message),
        module_(module),
        kind_(kind) {}

  const std::string& module() const { return module_; }
  ErrorKind kind() const { return kind_; }

 private:
  std::string module_;
  ErrorKind kind_;
};

}  // namespace sensorvis

#endif  // SENSORVIS_ERROR_HPP_
