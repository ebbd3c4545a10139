#pragma once

#include <stdexcept>
#include <string>

namespace beltrami {

enum class ErrorCode {
  InvalidArgument = 1,
  EllipticityViolated,
  SpecMismatch,
  MalformedFile,
  SampleCountMismatch,
  NonFiniteValue,
  ShearResampling,
  LipschitzAudit,
  InsufficientLevels,
  Io,
  MapGrammar,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace beltrami
