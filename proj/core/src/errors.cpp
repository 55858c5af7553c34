#include "secrelay/errors.hpp"

#include <sstream>

namespace secrelay {
namespace {

std::string join_issues(const std::string& context, const std::vector<std::string>& issues) {
  std::ostringstream os;
  os << context;
  for (std::size_t i = 0; i < issues.size(); ++i) {
    os << (i == 0 ? ": " : "; ") << issues[i];
  }
  return os.str();
}

}  // namespace

InputError::InputError(std::vector<std::string> issues)
    : InputError("invalid input", std::move(issues)) {}

InputError::InputError(const std::string& context, std::vector<std::string> issues)
    : std::runtime_error(join_issues(context, issues)), issues_(std::move(issues)) {}

}  // namespace secrelay
