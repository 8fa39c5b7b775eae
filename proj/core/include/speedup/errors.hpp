#pragma once

#include <stdexcept>
#include <string>

namespace speedup {

// Every refusal raised by the library carries a stable kind string; the CLI
// maps kinds to exit codes and serializes them verbatim.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& detail)
      : std::runtime_error(kind + ": " + detail), kind_(std::move(kind)), detail_(detail) {}
  const std::string& kind() const { return kind_; }
  const std::string& detail() const { return detail_; }

 private:
  std::string kind_;
  std::string detail_;
};

}  // namespace speedup
