#pragma once

#include <stdexcept>
#include <string>

namespace gmv {

enum class errc {
  invalid_modulus,
  composite_modulus,
  field_mismatch,
  division_by_zero,
  missing_variable,
  not_univariate,
  not_linear,
  trivial_dense,
  zero_degree,
  zero_polynomial,
  zero_modulus,
  both_zero,
  bad_shape,
  bad_n,
  bad_plan,
  degenerate_leading_coefficient,
  degenerate_system,
  empty_ideal,
  oracle_too_large,
  cache_integrity,
  io_error,
  exponent_overflow,
  internal,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::invalid_modulus: return "InvalidModulus";
    case errc::composite_modulus: return "CompositeModulus";
    case errc::field_mismatch: return "FieldMismatch";
    case errc::division_by_zero: return "DivisionByZero";
    case errc::missing_variable: return "MissingVariable";
    case errc::not_univariate: return "NotUnivariate";
    case errc::not_linear: return "NotLinear";
    case errc::trivial_dense: return "TrivialDense";
    case errc::zero_degree: return "ZeroDegree";
    case errc::zero_polynomial: return "ZeroPolynomial";
    case errc::zero_modulus: return "ZeroModulus";
    case errc::both_zero: return "BothZero";
    case errc::bad_shape: return "BadShape";
    case errc::bad_n: return "BadN";
    case errc::bad_plan: return "BadPlan";
    case errc::degenerate_leading_coefficient: return "DegenerateLeadingCoefficient";
    case errc::degenerate_system: return "DegenerateSystem";
    case errc::empty_ideal: return "EmptyIdeal";
    case errc::oracle_too_large: return "OracleTooLarge";
    case errc::cache_integrity: return "CacheIntegrity";
    case errc::io_error: return "IoError";
    case errc::exponent_overflow: return "ExponentOverflow";
    case errc::internal: return "InternalError";
  }
  return "UnknownError";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& what) { throw error(code, what); }

}  // namespace gmv
