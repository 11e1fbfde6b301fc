#include "textdiar/errors.h"

namespace textdiar {

void throw_config(const std::string& what) {
  throw Error(ErrorKind::kConfig, what);
}
void throw_io(const std::string& what) { throw Error(ErrorKind::kIo, what); }
void throw_protocol(const std::string& what) {
  throw Error(ErrorKind::kProtocol, what);
}
void throw_transport(const std::string& what) {
  throw Error(ErrorKind::kTransport, what);
}
void throw_validation(const std::string& what) {
  throw Error(ErrorKind::kValidation, what);
}
void throw_parse(const std::string& what) {
  throw Error(ErrorKind::kParse, what);
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
      return 2;
    case ErrorKind::kIo:
      return 3;
    case ErrorKind::kProtocol:
    case ErrorKind::kTransport:
      return 4;
    case ErrorKind::kValidation:
    case ErrorKind::kParse:
      return 5;
  }
  return 1;
}

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
      return "config error";
    case ErrorKind::kIo:
      return "I/O error";
    case ErrorKind::kProtocol:
      return "protocol error";
    case ErrorKind::kTransport:
      return "transport error";
    case ErrorKind::kValidation:
      return "validation error";
    case ErrorKind::kParse:
      return "parse error";
  }
  return "error";
}

}  // namespace textdiar
