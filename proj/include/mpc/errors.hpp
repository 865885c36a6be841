#pragma once

#include <stdexcept>
#include <string>

namespace mpc {

// Error taxonomy mirrored by the C API status codes.
enum class ErrorKind {
  io,
  format,
  consistency,
  argument,
  config,
  dimension,
  topology,
  divergence,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) {
  throw Error(kind, msg);
}

}  // namespace mpc
