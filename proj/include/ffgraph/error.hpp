#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace ffg {

enum class Errc {
  backward_edge,
  out_of_range,
  parse_error,
  invalid_argument,
  invalid_degree,
  zero_out_degree,
  zero_in_degree,
  size_limit,
  count_overflow,
  precondition_failed,
  insufficient_data,
  io_error,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Malformed graph text or configuration. `cause` carries the underlying
// structural violation (e.g. backward_edge) when there is one; `line` is
// 1-based and 0 when the error is not tied to a line; `key_path` names the
// offending JSON key when parsing configuration.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, Errc cause = Errc::parse_error,
             std::string key_path = {})
      : Error(Errc::parse_error, what),
        line_(line),
        cause_(cause),
        key_path_(std::move(key_path)) {}

  std::size_t line() const noexcept { return line_; }
  Errc cause() const noexcept { return cause_; }
  const std::string& key_path() const noexcept { return key_path_; }

 private:
  std::size_t line_;
  Errc cause_;
  std::string key_path_;
};

}  // namespace ffg
