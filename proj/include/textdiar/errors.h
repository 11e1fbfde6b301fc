#pragma once

#include <stdexcept>
#include <string>

namespace textdiar {

enum class ErrorKind {
  kConfig,
  kIo,
  kProtocol,
  // Remote transport failures; callers may retry these.
  kTransport,
  kValidation,
  kParse,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }
  bool retriable() const { return kind_ == ErrorKind::kTransport; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void throw_config(const std::string& what);
[[noreturn]] void throw_io(const std::string& what);
[[noreturn]] void throw_protocol(const std::string& what);
[[noreturn]] void throw_transport(const std::string& what);
[[noreturn]] void throw_validation(const std::string& what);
[[noreturn]] void throw_parse(const std::string& what);

// Process exit status for an error class. 0 is success, 1 is reserved for
// unexpected failures.
int exit_code(ErrorKind kind);

const char* to_string(ErrorKind kind);

}  // namespace textdiar
