#pragma once

#include <stdexcept>
#include <string>

namespace ars {

// Error categories map one-to-one onto CLI exit codes.
enum class ErrorKind {
  input,        // schema, parse, range, join errors (exit 2)
  provider,     // lookup misses, process protocol failures (exit 3)
  degenerate,   // statistics that leave a formula undefined (exit 4)
  domain,       // bad argument to a numeric routine
  io,           // unreadable or unwritable file (exit 2)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline Error input_error(const std::string& msg) { return {ErrorKind::input, msg}; }
inline Error provider_error(const std::string& msg) { return {ErrorKind::provider, msg}; }
inline Error degenerate_error(const std::string& msg) { return {ErrorKind::degenerate, msg}; }
inline Error domain_error(const std::string& msg) { return {ErrorKind::domain, msg}; }
inline Error io_error(const std::string& msg) { return {ErrorKind::io, msg}; }

}  // namespace ars
