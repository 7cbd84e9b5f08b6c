#pragma once

#include <stdexcept>
#include <string>

namespace gibbsbp {

// Base of every library error. kind() is a stable snake_case token used in
// CSV status columns and CLI diagnostics.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

#define GIBBSBP_DEFINE_ERROR(Name, token)                          \
  class Name : public Error {                                      \
   public:                                                         \
    using Error::Error;                                            \
    const char* kind() const noexcept override { return token; }   \
  }

GIBBSBP_DEFINE_ERROR(NotHermitian, "not_hermitian");
GIBBSBP_DEFINE_ERROR(NoConvergence, "no_convergence");
GIBBSBP_DEFINE_ERROR(DomainError, "domain_error");
GIBBSBP_DEFINE_ERROR(DimensionMismatch, "dimension_mismatch");
GIBBSBP_DEFINE_ERROR(IndexOutOfRange, "index_out_of_range");
GIBBSBP_DEFINE_ERROR(InvalidArgument, "invalid_argument");
GIBBSBP_DEFINE_ERROR(StateSpaceTooLarge, "state_space_too_large");
GIBBSBP_DEFINE_ERROR(NotATree, "not_a_tree");
GIBBSBP_DEFINE_ERROR(NotAnEdge, "not_an_edge");
GIBBSBP_DEFINE_ERROR(ComplexResidue, "complex_residue");
GIBBSBP_DEFINE_ERROR(NotDensityMatrix, "not_density_matrix");
GIBBSBP_DEFINE_ERROR(ConfigError, "config_error");
GIBBSBP_DEFINE_ERROR(IoError, "io_error");

#undef GIBBSBP_DEFINE_ERROR

}  // namespace gibbsbp
