#pragma once

// Dense complex linear algebra for operators on a handful of qubits
// (side length up to 2^12). Row-major storage, no sparsity.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "gibbsbp/errors.hpp"

namespace gibbsbp {

using cplx = std::complex<double>;

class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}
  ComplexMatrix(std::size_t dim, std::vector<cplx> entries);
  // Row-by-row literal, e.g. {{0, 1}, {1, 0}}.
  ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

  static ComplexMatrix identity(std::size_t dim);
  static ComplexMatrix zero(std::size_t dim) { return ComplexMatrix(dim); }
  static ComplexMatrix diagonal(std::span<const double> values);

  std::size_t dim() const noexcept { return dim_; }
  std::span<const cplx> entries() const noexcept { return data_; }
  std::span<cplx> entries() noexcept { return data_; }

  cplx& operator()(std::size_t i, std::size_t j) { return data_[i * dim_ + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const {
    return data_[i * dim_ + j];
  }

  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix& operator*=(cplx scale);

  friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<cplx> data_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(cplx scale, ComplexMatrix a);
ComplexMatrix operator*(ComplexMatrix a, cplx scale);

// Matrix product. OpenMP-parallel over rows; serial::multiply is the
// reference loop and produces bit-identical results.
ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

ComplexMatrix adjoint(const ComplexMatrix& a);
ComplexMatrix hermitian_part(const ComplexMatrix& a);
cplx trace(const ComplexMatrix& a);
double frobenius_norm(const ComplexMatrix& a);
double max_abs(const ComplexMatrix& a);
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b);

// max |A_ij - conj(A_ji)| relative to max |A|.
double hermiticity_defect(const ComplexMatrix& a);
bool is_hermitian(const ComplexMatrix& a, double rel_tol = 1e-12);
// Throws NotHermitian naming `context` when the relative defect exceeds 1e-12.
void require_hermitian(const ComplexMatrix& a, std::string_view context);

struct HermitianEigen {
  std::vector<double> eigenvalues;  // ascending
  ComplexMatrix eigenvectors;       // columns, unitary
};

// Cyclic complex Jacobi. Throws NotHermitian or NoConvergence.
HermitianEigen herm_eig(const ComplexMatrix& a);

// V diag(values) V^dagger for the eigenbasis of `eig`.
ComplexMatrix spectral_compose(const HermitianEigen& eig,
                               std::span<const double> values);

template <class F>
ComplexMatrix mat_func(const ComplexMatrix& a, F&& f) {
  HermitianEigen eig = herm_eig(a);
  std::vector<double> mapped(eig.eigenvalues.size());
  for (std::size_t k = 0; k < mapped.size(); ++k) {
    mapped[k] = f(eig.eigenvalues[k]);
  }
  return spectral_compose(eig, mapped);
}

// Eigenvalues in (-1e-12 * max|lambda|, 0] are treated as roundoff: log
// clamps them to a 1e-300 floor and sqrt clamps them to zero. Anything more
// negative raises DomainError.
inline constexpr double kSpectralClampRelTol = 1e-12;
inline constexpr double kLogFloor = 1e-300;

ComplexMatrix mat_exp(const ComplexMatrix& a);
ComplexMatrix mat_log(const ComplexMatrix& a);
ComplexMatrix mat_sqrt(const ComplexMatrix& a);

// exp(A) / tr exp(A), evaluated with the spectrum shifted by its maximum so
// that large |A| does not overflow.
ComplexMatrix exp_normalized(const ComplexMatrix& a);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

// Traces out every site not listed in `keep`. Sites are 0-based; the result
// is ordered by ascending site index.
ComplexMatrix partial_trace(const ComplexMatrix& a,
                            std::span<const std::size_t> site_dims,
                            std::span<const std::size_t> keep);

// tr|A| = sum |lambda_i| for Hermitian A.
double abs_trace_norm(const ComplexMatrix& a);

// Dense real rectangular matrix, row-major. Used for classical potentials and
// transfer weights.
class RealMatrix {
 public:
  RealMatrix() = default;
  RealMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  RealMatrix(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::span<const double> entries() const noexcept { return data_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  RealMatrix transposed() const;

  friend bool operator==(const RealMatrix&, const RealMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

namespace serial {
ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b);
}  // namespace serial

}  // namespace gibbsbp
