#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace conemin {

// Every failure raised by the library names the module, the operation and the
// invariant that was violated, so the CLI can emit a structured error record.
class Error : public std::runtime_error {
public:
  Error(std::string module, std::string operation, std::string invariant, const std::string& message)
      : std::runtime_error(message), module_(std::move(module)), operation_(std::move(operation)),
        invariant_(std::move(invariant)) {}

  const std::string& module() const { return module_; }
  const std::string& operation() const { return operation_; }
  const std::string& invariant() const { return invariant_; }

private:
  std::string module_;
  std::string operation_;
  std::string invariant_;
};

} // namespace conemin
