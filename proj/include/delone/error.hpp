#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace delone {

/// Domain error carrying a machine-readable code such as "geometry.degenerate".
/// The prefix names the module that raised it.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

}  // namespace delone
