#include "gibbsbp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gibbsbp {

namespace {

void require_pair(const ComplexMatrix& rho, const ComplexMatrix& sigma, const char* context) {
  if (rho.dim() != sigma.dim()) {
    throw DimensionMismatch(std::string(context) + ": dimensions " +
                            std::to_string(rho.dim()) + " and " +
                            std::to_string(sigma.dim()));
  }
  require_density_matrix(rho, context);
  require_density_matrix(sigma, context);
}

// Square root with eigenvalues in [-slack, 0) clamped to zero.
ComplexMatrix psd_sqrt(const ComplexMatrix& a) {
  HermitianEigen eig = herm_eig(hermitian_part(a));
  for (double& x : eig.eigenvalues) x = std::sqrt(std::max(x, 0.0));
  return spectral_compose(eig, eig.eigenvalues);
}

}  // namespace

void require_density_matrix(const ComplexMatrix& rho, const char* context) {
  if (rho.dim() == 0) throw NotDensityMatrix(std::string(context) + ": empty matrix");
  double asym = 0.0;
  for (std::size_t i = 0; i < rho.dim(); ++i) {
    for (std::size_t j = i; j < rho.dim(); ++j) {
      asym = std::max(asym, std::abs(rho(i, j) - std::conj(rho(j, i))));
    }
  }
  if (asym > kDensitySlack) {
    throw NotDensityMatrix(std::string(context) + ": not Hermitian (defect " +
                           std::to_string(asym) + ")");
  }
  const cplx tr = trace(rho);
  if (std::abs(tr - 1.0) > kDensitySlack) {
    throw NotDensityMatrix(std::string(context) + ": trace " + std::to_string(tr.real()) +
                           " is not 1");
  }
  const double lowest = herm_eig(hermitian_part(rho)).eigenvalues.front();
  if (lowest < -kDensitySlack) {
    throw NotDensityMatrix(std::string(context) + ": eigenvalue " + std::to_string(lowest) +
                           " is negative");
  }
}

double trace_distance(const ComplexMatrix& rho, const ComplexMatrix& sigma) {
  require_pair(rho, sigma, "trace_distance");
  return 0.5 * abs_trace_norm(hermitian_part(rho - sigma));
}

double fidelity(const ComplexMatrix& rho, const ComplexMatrix& sigma) {
  require_pair(rho, sigma, "fidelity");
  const ComplexMatrix root = psd_sqrt(rho);
  const ComplexMatrix inner = hermitian_part(root * sigma * root);
  const HermitianEigen eig = herm_eig(inner);
  double f = 0.0;
  for (double x : eig.eigenvalues) {
    if (x < -kDensitySlack) {
      throw DomainError("fidelity: inner product has eigenvalue " + std::to_string(x));
    }
    f += std::sqrt(std::max(x, 0.0));
  }
  return f;
}

}  // namespace gibbsbp
