#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace vqsd {

using cplx = std::complex<double>;

/// Dense row-major complex matrix. Sized for the few-qubit regime (dim <= 16).
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols);
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries);
  /// Row-list literal, e.g. {{1, 0}, {0, -1}}.
  ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix zeros(std::size_t rows, std::size_t cols);
  static ComplexMatrix diagonal(std::span<const cplx> diag);
  static ComplexMatrix diagonal(std::span<const double> diag);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<cplx> data() noexcept { return data_; }
  std::span<const cplx> data() const noexcept { return data_; }

  ComplexMatrix adjoint() const;
  cplx trace() const;
  bool all_finite() const;

  ComplexMatrix& operator+=(const ComplexMatrix& o);
  ComplexMatrix& operator-=(const ComplexMatrix& o);
  ComplexMatrix& operator*=(cplx s);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(ComplexMatrix a, cplx s);
ComplexMatrix operator*(cplx s, ComplexMatrix a);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

/// a^dagger * b without forming the adjoint.
ComplexMatrix adjoint_times(const ComplexMatrix& a, const ComplexMatrix& b);

/// Max entrywise |a - b|; throws on shape mismatch.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

/// Max entrywise |m - m^dagger|.
double hermiticity_error(const ComplexMatrix& m);

/// Re Tr[a b] for Hermitian a, b.
double real_trace_product(const ComplexMatrix& a, const ComplexMatrix& b);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

namespace pauli {
ComplexMatrix I();
ComplexMatrix X();
ComplexMatrix Y();
ComplexMatrix Z();
}  // namespace pauli

/// Normalized state vector over n qubits. Qubit 0 is the most significant bit
/// of the basis index.
class PureState {
 public:
  PureState(std::size_t n_qubits, std::vector<cplx> amplitudes);
  /// |0...0> on n qubits.
  static PureState zero(std::size_t n_qubits);

  std::size_t n_qubits() const noexcept { return n_qubits_; }
  std::size_t dim() const noexcept { return amps_.size(); }
  std::span<const cplx> amplitudes() const noexcept { return amps_; }
  const cplx& operator[](std::size_t i) const { return amps_[i]; }

  /// Column vector as a dim x 1 matrix.
  ComplexMatrix as_column() const;
  /// |psi><psi|
  ComplexMatrix projector() const;

  /// this (x) other
  PureState tensor(const PureState& other) const;

 private:
  std::size_t n_qubits_;
  std::vector<cplx> amps_;
};

/// Hermitian, PSD, unit-trace matrix; validated on construction.
class DensityMatrix {
 public:
  static constexpr double kTolerance = 1e-10;

  explicit DensityMatrix(ComplexMatrix m);
  static DensityMatrix from_pure(const PureState& psi);
  static DensityMatrix maximally_mixed(std::size_t dim);

  std::size_t dim() const noexcept { return m_.rows(); }
  const ComplexMatrix& matrix() const noexcept { return m_; }

 private:
  ComplexMatrix m_;
};

struct EigenDecomposition {
  std::vector<double> values;  // ascending
  ComplexMatrix vectors;       // unitary, eigenvectors in columns
};

/// Cyclic complex Jacobi. Rejects inputs more than 1e-8 from Hermitian; the
/// input is symmetrized before rotating.
EigenDecomposition hermitian_eig(const ComplexMatrix& h);

/// V diag(values) V^dagger
ComplexMatrix reconstruct(const EigenDecomposition& e);

/// Sum of |eigenvalues| of a Hermitian matrix.
double trace_norm(const ComplexMatrix& a);

double min_eigenvalue(const ComplexMatrix& h);

/// Pseudo-inverse square root of a PSD matrix: eigenvalues above kernel_tol
/// map to 1/sqrt(lambda), the rest to 0.
ComplexMatrix psd_inv_sqrt(const ComplexMatrix& a, double kernel_tol = 1e-12);

/// exp(i h) for Hermitian h via eigendecomposition.
ComplexMatrix expi_hermitian(const ComplexMatrix& h);

/// Reduced density matrix on the subsystems listed in `keep` (ascending
/// order is imposed). `dims` lists the local dimension of every subsystem.
DensityMatrix partial_trace(const DensityMatrix& rho,
                            std::span<const std::size_t> dims,
                            std::span<const std::size_t> keep);

/// Reduced state of a pure qubit register, without forming |psi><psi|. The
/// first entry of `keep` is the most significant qubit of the result.
ComplexMatrix reduced_matrix(const PureState& psi,
                             std::span<const std::size_t> keep);

/// Tr_B|Psi><Psi| = rho where |Psi> = sum_i sqrt(lambda_i)|v_i>|i>. The
/// purifying qubits are appended after the system qubits.
PureState purify(const DensityMatrix& rho);

}  // namespace vqsd
