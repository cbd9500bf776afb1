#pragma once

#include <stdexcept>
#include <string>

namespace gconv {

enum class ErrorKind {
  SpaceMismatch,      // point or function does not belong to the expected group
  DimensionMismatch,  // vector/pairing dimensions do not line up
  InvalidArgument,
  Precondition,       // a documented hypothesis of an operation is violated
  GridTooCoarse,      // bump radius below ten grid cells
  Parse,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace gconv
