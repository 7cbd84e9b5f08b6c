#include "gibbsbp/densemat.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace gibbsbp {

namespace {

constexpr int kMaxJacobiSweeps = 100;

void require_same_dim(const ComplexMatrix& a, const ComplexMatrix& b,
                      const char* what) {
  if (a.dim() != b.dim()) {
    throw DimensionMismatch(std::string(what) + ": " + std::to_string(a.dim()) +
                            " vs " + std::to_string(b.dim()));
  }
}

template <bool Parallel>
ComplexMatrix multiply_impl(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_dim(a, b, "multiply");
  const std::size_t n = a.dim();
  ComplexMatrix c(n);
  const cplx* pa = a.entries().data();
  const cplx* pb = b.entries().data();
  cplx* pc = c.entries().data();
  const auto rows = static_cast<std::ptrdiff_t>(n);
  // i-k-j order: the inner loop streams a row of B into a row of C.
#pragma omp parallel for schedule(static) if (Parallel && n >= 32)
  for (std::ptrdiff_t ii = 0; ii < rows; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    cplx* crow = pc + i * n;
    for (std::size_t k = 0; k < n; ++k) {
      const cplx aik = pa[i * n + k];
      if (aik == cplx{}) continue;
      const cplx* brow = pb + k * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += aik * brow[j];
    }
  }
  return c;
}

// One complex Jacobi rotation annihilating A(p, q); V accumulates U.
void jacobi_rotate(ComplexMatrix& a, ComplexMatrix& v, std::size_t p,
                   std::size_t q) {
  const std::size_t n = a.dim();
  const cplx apq = a(p, q);
  const double g = std::abs(apq);
  const cplx phase = apq / g;  // e^{i phi}
  const cplx phase_c = std::conj(phase);
  const double app = a(p, p).real();
  const double aqq = a(q, q).real();

  // Real Jacobi on [[app, g], [g, aqq]] after removing the phase.
  const double tau = (aqq - app) / (2.0 * g);
  double t;
  if (std::abs(tau) > 1e150) {
    t = 0.5 / tau;
  } else {
    t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
  }
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;

  // U = [[c, s], [-s e^{-i phi}, c e^{-i phi}]] acting on (p, q).
  const cplx uqp = -s * phase_c;
  const cplx uqq = c * phase_c;
  for (std::size_t k = 0; k < n; ++k) {
    const cplx akp = a(k, p);
    const cplx akq = a(k, q);
    a(k, p) = akp * c + akq * uqp;
    a(k, q) = akp * s + akq * uqq;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const cplx apk = a(p, k);
    const cplx aqk = a(q, k);
    a(p, k) = c * apk - s * phase * aqk;
    a(q, k) = s * apk + c * phase * aqk;
  }
  a(p, q) = cplx{};
  a(q, p) = cplx{};
  a(p, p) = cplx{a(p, p).real(), 0.0};
  a(q, q) = cplx{a(q, q).real(), 0.0};
  for (std::size_t k = 0; k < n; ++k) {
    const cplx vkp = v(k, p);
    const cplx vkq = v(k, q);
    v(k, p) = vkp * c + vkq * uqp;
    v(k, q) = vkp * s + vkq * uqq;
  }
}

std::vector<double> clamp_nonnegative(const std::vector<double>& values,
                                      const char* what) {
  double scale = 0.0;
  for (double x : values) scale = std::max(scale, std::abs(x));
  const double tol = kSpectralClampRelTol * scale;
  std::vector<double> out(values.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    const double x = values[k];
    if (x > 0.0) {
      out[k] = x;
    } else if (x >= -tol) {
      out[k] = 0.0;
    } else {
      throw DomainError(std::string(what) + ": eigenvalue " + std::to_string(x) +
                        " below clamping tolerance " + std::to_string(-tol));
    }
  }
  return out;
}

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t dim, std::vector<cplx> entries)
    : dim_(dim), data_(std::move(entries)) {
  if (data_.size() != dim * dim) {
    throw DimensionMismatch("ComplexMatrix: " + std::to_string(data_.size()) +
                            " entries for dim " + std::to_string(dim));
  }
}

ComplexMatrix::ComplexMatrix(
    std::initializer_list<std::initializer_list<cplx>> rows)
    : dim_(rows.size()) {
  data_.reserve(dim_ * dim_);
  for (const auto& row : rows) {
    if (row.size() != dim_) {
      throw DimensionMismatch("ComplexMatrix: literal is not square");
    }
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
  ComplexMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> values) {
  ComplexMatrix m(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  require_same_dim(*this, other, "operator+=");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  require_same_dim(*this, other, "operator-=");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx scale) {
  for (auto& x : data_) x *= scale;
  return *this;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(cplx scale, ComplexMatrix a) { return a *= scale; }
ComplexMatrix operator*(ComplexMatrix a, cplx scale) { return a *= scale; }

ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b) {
  return multiply_impl<true>(a, b);
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  return multiply(a, b);
}

namespace serial {
ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b) {
  return multiply_impl<false>(a, b);
}
}  // namespace serial

ComplexMatrix adjoint(const ComplexMatrix& a) {
  const std::size_t n = a.dim();
  ComplexMatrix out(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) out(j, i) = std::conj(a(i, j));
  }
  return out;
}

ComplexMatrix hermitian_part(const ComplexMatrix& a) {
  const std::size_t n = a.dim();
  ComplexMatrix out(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      out(i, j) = 0.5 * (a(i, j) + std::conj(a(j, i)));
    }
  }
  return out;
}

cplx trace(const ComplexMatrix& a) {
  cplx t{};
  for (std::size_t i = 0; i < a.dim(); ++i) t += a(i, i);
  return t;
}

double frobenius_norm(const ComplexMatrix& a) {
  double s = 0.0;
  for (const cplx& x : a.entries()) s += std::norm(x);
  return std::sqrt(s);
}

double max_abs(const ComplexMatrix& a) {
  double m = 0.0;
  for (const cplx& x : a.entries()) m = std::max(m, std::abs(x));
  return m;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_dim(a, b, "max_abs_diff");
  double m = 0.0;
  for (std::size_t k = 0; k < a.entries().size(); ++k) {
    m = std::max(m, std::abs(a.entries()[k] - b.entries()[k]));
  }
  return m;
}

ComplexMatrix commutator(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a * b - b * a;
}

double hermiticity_defect(const ComplexMatrix& a) {
  const double scale = max_abs(a);
  if (scale == 0.0) return 0.0;
  double d = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (std::size_t j = i; j < a.dim(); ++j) {
      d = std::max(d, std::abs(a(i, j) - std::conj(a(j, i))));
    }
  }
  return d / scale;
}

bool is_hermitian(const ComplexMatrix& a, double rel_tol) {
  return hermiticity_defect(a) <= rel_tol;
}

void require_hermitian(const ComplexMatrix& a, std::string_view context) {
  const double defect = hermiticity_defect(a);
  if (defect > 1e-12) {
    throw NotHermitian(std::string(context) + ": relative Hermiticity defect " +
                       std::to_string(defect));
  }
}

HermitianEigen herm_eig(const ComplexMatrix& input) {
  require_hermitian(input, "herm_eig");
  const std::size_t n = input.dim();
  ComplexMatrix a = hermitian_part(input);
  ComplexMatrix v = ComplexMatrix::identity(n);

  const double norm = frobenius_norm(a);
  const double skip = 1e-16 * norm / static_cast<double>(std::max<std::size_t>(n, 1));

  bool converged = (norm == 0.0 || n <= 1);
  for (int sweep = 0; sweep < kMaxJacobiSweeps && !converged; ++sweep) {
    std::size_t rotations = 0;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) <= skip) continue;
        jacobi_rotate(a, v, p, q);
        ++rotations;
      }
    }
    converged = (rotations == 0);
  }
  if (!converged) {
    throw NoConvergence("herm_eig: Jacobi exceeded " +
                        std::to_string(kMaxJacobiSweeps) + " sweeps (dim " +
                        std::to_string(n) + ")");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return a(x, x).real() < a(y, y).real();
  });

  HermitianEigen out;
  out.eigenvalues.resize(n);
  out.eigenvectors = ComplexMatrix(n);
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]).real();
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = v(i, order[k]);
  }
  return out;
}

ComplexMatrix spectral_compose(const HermitianEigen& eig,
                               std::span<const double> values) {
  const ComplexMatrix& v = eig.eigenvectors;
  const std::size_t n = v.dim();
  if (values.size() != n) {
    throw DimensionMismatch("spectral_compose: value count does not match basis");
  }
  ComplexMatrix out(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      cplx s{};
      for (std::size_t k = 0; k < n; ++k) {
        s += v(i, k) * values[k] * std::conj(v(j, k));
      }
      out(i, j) = s;
      out(j, i) = std::conj(s);
    }
    out(i, i) = cplx{out(i, i).real(), 0.0};
  }
  return out;
}

ComplexMatrix mat_exp(const ComplexMatrix& a) {
  return mat_func(a, [](double x) { return std::exp(x); });
}

ComplexMatrix mat_log(const ComplexMatrix& a) {
  HermitianEigen eig = herm_eig(a);
  double scale = 0.0;
  for (double x : eig.eigenvalues) scale = std::max(scale, std::abs(x));
  const double tol = kSpectralClampRelTol * scale;
  std::vector<double> mapped(eig.eigenvalues.size());
  for (std::size_t k = 0; k < mapped.size(); ++k) {
    const double x = eig.eigenvalues[k];
    if (x > kLogFloor) {
      mapped[k] = std::log(x);
    } else if (x >= -tol) {
      mapped[k] = std::log(kLogFloor);
    } else {
      throw DomainError("mat_log: eigenvalue " + std::to_string(x) +
                        " below clamping tolerance " + std::to_string(-tol));
    }
  }
  return spectral_compose(eig, mapped);
}

ComplexMatrix mat_sqrt(const ComplexMatrix& a) {
  HermitianEigen eig = herm_eig(a);
  std::vector<double> mapped = clamp_nonnegative(eig.eigenvalues, "mat_sqrt");
  for (double& x : mapped) x = std::sqrt(x);
  return spectral_compose(eig, mapped);
}

ComplexMatrix exp_normalized(const ComplexMatrix& a) {
  HermitianEigen eig = herm_eig(a);
  if (eig.eigenvalues.empty()) return ComplexMatrix{};
  const double top = eig.eigenvalues.back();
  std::vector<double> weights(eig.eigenvalues.size());
  double z = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    weights[k] = std::exp(eig.eigenvalues[k] - top);
    z += weights[k];
  }
  for (double& w : weights) w /= z;
  return spectral_compose(eig, weights);
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t na = a.dim();
  const std::size_t nb = b.dim();
  ComplexMatrix out(na * nb);
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < na; ++j) {
      const cplx aij = a(i, j);
      for (std::size_t k = 0; k < nb; ++k) {
        for (std::size_t l = 0; l < nb; ++l) {
          out(i * nb + k, j * nb + l) = aij * b(k, l);
        }
      }
    }
  }
  return out;
}

ComplexMatrix partial_trace(const ComplexMatrix& a,
                            std::span<const std::size_t> site_dims,
                            std::span<const std::size_t> keep) {
  const std::size_t n_sites = site_dims.size();
  std::size_t total = 1;
  for (std::size_t d : site_dims) {
    if (d == 0) throw DimensionMismatch("partial_trace: zero site dimension");
    total *= d;
  }
  if (total != a.dim()) {
    throw DimensionMismatch("partial_trace: site dimensions multiply to " +
                            std::to_string(total) + ", matrix dim is " +
                            std::to_string(a.dim()));
  }
  if (keep.empty()) throw DimensionMismatch("partial_trace: empty keep set");

  std::vector<bool> kept(n_sites, false);
  for (std::size_t s : keep) {
    if (s >= n_sites) {
      throw DimensionMismatch("partial_trace: site " + std::to_string(s) +
                              " out of range for " + std::to_string(n_sites) +
                              " sites");
    }
    kept[s] = true;
  }

  // Site 0 is the most significant digit of the row index.
  std::vector<std::size_t> stride(n_sites, 1);
  for (std::size_t s = n_sites; s-- > 1;) stride[s - 1] = stride[s] * site_dims[s];

  // Offsets of every multi-index over a subset of sites, enumerated with the
  // last listed site varying fastest.
  auto offsets = [&](bool want_kept) {
    std::vector<std::size_t> out{0};
    for (std::size_t s = 0; s < n_sites; ++s) {
      if (kept[s] != want_kept) continue;
      std::vector<std::size_t> next;
      next.reserve(out.size() * site_dims[s]);
      for (std::size_t base : out) {
        for (std::size_t x = 0; x < site_dims[s]; ++x) next.push_back(base + x * stride[s]);
      }
      out = std::move(next);
    }
    return out;
  };
  const std::vector<std::size_t> kept_off = offsets(true);
  const std::vector<std::size_t> traced_off = offsets(false);

  const std::size_t dk = kept_off.size();
  ComplexMatrix out(dk);
  for (std::size_t r = 0; r < dk; ++r) {
    for (std::size_t c = 0; c < dk; ++c) {
      cplx s{};
      for (std::size_t t : traced_off) s += a(kept_off[r] + t, kept_off[c] + t);
      out(r, c) = s;
    }
  }
  return out;
}

double abs_trace_norm(const ComplexMatrix& a) {
  const HermitianEigen eig = herm_eig(a);
  double s = 0.0;
  for (double x : eig.eigenvalues) s += std::abs(x);
  return s;
}

RealMatrix::RealMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size()) {
  data_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) throw DimensionMismatch("RealMatrix: ragged literal");
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

RealMatrix RealMatrix::transposed() const {
  RealMatrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  }
  return t;
}

}  // namespace gibbsbp
