#pragma once

#include "gibbsbp/densemat.hpp"

namespace gibbsbp {

// Inputs must be Hermitian, unit-trace, and positive semidefinite up to this
// slack; eigenvalues in [-slack, 0) are clamped to zero.
inline constexpr double kDensitySlack = 1e-8;

// Throws NotDensityMatrix describing the first violated condition.
void require_density_matrix(const ComplexMatrix& rho, const char* context);

// D = tr|rho - sigma| / 2. Throws DimensionMismatch or NotDensityMatrix.
double trace_distance(const ComplexMatrix& rho, const ComplexMatrix& sigma);

// F = tr sqrt(sqrt(rho) sigma sqrt(rho)). Throws as trace_distance, plus
// DomainError if the inner product has eigenvalues below -slack.
double fidelity(const ComplexMatrix& rho, const ComplexMatrix& sigma);

}  // namespace gibbsbp
