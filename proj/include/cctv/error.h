#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cctv {

enum class error_kind : std::uint8_t {
  kProjectionOutOfRange,
  kUndefinedBearing,
  kInvalidGeometry,
  kParse,
  kIntegrity,
  kEmptyNetwork,
  kValidation,
  kConfiguration,
  kIo
};

char const* to_str(error_kind);

// Base for every error thrown by this library. The kind lets callers map
// failures to exit codes / HTTP status without string matching.
class error : public std::runtime_error {
public:
  error(error_kind kind, std::string const& msg)
      : std::runtime_error{msg}, kind_{kind} {}

  error_kind kind() const noexcept { return kind_; }

private:
  error_kind kind_;
};

class parse_error : public error {
public:
  parse_error(std::uint64_t line, std::string const& msg)
      : error{error_kind::kParse,
              "line " + std::to_string(line) + ": " + msg},
        line_{line} {}

  std::uint64_t line() const noexcept { return line_; }

private:
  std::uint64_t line_;
};

}  // namespace cctv
