#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace secrelay {

/// Argument outside the mathematical domain of an operation (negative SNR,
/// non-Hermitian matrix, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A computation produced a non-finite or otherwise unusable number.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent user input. Carries every failing field so a
/// caller can report all problems at once instead of one per run.
class InputError : public std::runtime_error {
 public:
  explicit InputError(std::vector<std::string> issues);
  InputError(const std::string& context, std::vector<std::string> issues);

  const std::vector<std::string>& issues() const noexcept { return issues_; }

 private:
  std::vector<std::string> issues_;
};

}  // namespace secrelay
