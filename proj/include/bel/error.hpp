#pragma once

#include <stdexcept>
#include <string>

namespace bel {

// Exit codes used by the command-line front end.
enum class ExitCode : int { ok = 0, usage = 1, data = 2, numerical = 3 };

class Error : public std::runtime_error {
public:
  Error(ExitCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

private:
  ExitCode code_;
};

struct UsageError : Error {
  explicit UsageError(const std::string& what) : Error(ExitCode::usage, what) {}
};

struct DataError : Error {
  explicit DataError(const std::string& what) : Error(ExitCode::data, what) {}
};

struct NumericalError : Error {
  explicit NumericalError(const std::string& what)
      : Error(ExitCode::numerical, what) {}
};

}  // namespace bel
