#pragma once

#include <stdexcept>
#include <string>

namespace cpf {

enum class ErrorCode {
  config_invalid,
  degenerate_ensemble,
  singular_covariance,
  not_symmetric_pd,
  ill_conditioned,
  bandwidth_underflow,
  non_finite_position,
  singular_fisher,
  quadrature_overflow,
  singular_system,
  oracle_unavailable,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cpf
