#include "vqsd/qmath.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "vqsd/kernels.hpp"

namespace vqsd {

namespace {

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b,
                        const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument(std::string(what) + ": shape mismatch");
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

// ---------------------------------------------------------------------------
// ComplexMatrix

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, cplx{0.0, 0.0}) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols,
                             std::vector<cplx> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows * cols)
    throw std::invalid_argument("ComplexMatrix: entry count != rows * cols");
  if (!all_finite())
    throw std::invalid_argument("ComplexMatrix: non-finite entry");
}

ComplexMatrix::ComplexMatrix(
    std::initializer_list<std::initializer_list<cplx>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_)
      throw std::invalid_argument("ComplexMatrix: ragged row literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::zeros(std::size_t rows, std::size_t cols) {
  return ComplexMatrix(rows, cols);
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const cplx> diag) {
  ComplexMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> diag) {
  ComplexMatrix m(diag.size(), diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
  return out;
}

cplx ComplexMatrix::trace() const {
  if (!square()) throw std::invalid_argument("trace: matrix not square");
  cplx t = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
  return t;
}

bool ComplexMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](const cplx& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
  require_same_shape(*this, o, "operator+=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& o) {
  require_same_shape(*this, o, "operator-=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(cplx s) {
  for (auto& z : data_) z *= s;
  return *this;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }
ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows())
    throw std::invalid_argument("operator*: inner dimension mismatch");
  ComplexMatrix c(a.rows(), b.cols());
  kernels::active().gemm(a.data(), b.data(), c.data(), a.rows(), a.cols(),
                         b.cols());
  return c;
}

ComplexMatrix adjoint_times(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows())
    throw std::invalid_argument("adjoint_times: row count mismatch");
  ComplexMatrix c(a.cols(), b.cols());
  kernels::active().gemm_adj(a.data(), b.data(), c.data(), a.cols(), a.rows(),
                             b.cols());
  return c;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_shape(a, b, "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i)
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

double hermiticity_error(const ComplexMatrix& m) {
  if (!m.square()) throw std::invalid_argument("hermiticity_error: not square");
  double e = 0.0;
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = r; c < m.cols(); ++c)
      e = std::max(e, std::abs(m(r, c) - std::conj(m(c, r))));
  return e;
}

double real_trace_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_shape(a, b, "real_trace_product");
  return kernels::active().real_inner(a.data(), b.data());
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t ia = 0; ia < a.rows(); ++ia)
    for (std::size_t ja = 0; ja < a.cols(); ++ja) {
      const cplx s = a(ia, ja);
      for (std::size_t ib = 0; ib < b.rows(); ++ib)
        for (std::size_t jb = 0; jb < b.cols(); ++jb)
          out(ia * b.rows() + ib, ja * b.cols() + jb) = s * b(ib, jb);
    }
  return out;
}

namespace pauli {
ComplexMatrix I() { return {{1.0, 0.0}, {0.0, 1.0}}; }
ComplexMatrix X() { return {{0.0, 1.0}, {1.0, 0.0}}; }
ComplexMatrix Y() { return {{0.0, cplx{0.0, -1.0}}, {cplx{0.0, 1.0}, 0.0}}; }
ComplexMatrix Z() { return {{1.0, 0.0}, {0.0, -1.0}}; }
}  // namespace pauli

// ---------------------------------------------------------------------------
// PureState

PureState::PureState(std::size_t n_qubits, std::vector<cplx> amplitudes)
    : n_qubits_(n_qubits), amps_(std::move(amplitudes)) {
  if (amps_.size() != (std::size_t{1} << n_qubits))
    throw std::invalid_argument("PureState: amplitude count != 2^n");
  for (const auto& z : amps_)
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw std::invalid_argument("PureState: non-finite amplitude");
  const double n2 = kernels::active().norm2(amps_);
  if (std::abs(n2 - 1.0) > 1e-10)
    throw std::invalid_argument("PureState: squared norm " +
                                std::to_string(n2) + " != 1");
}

PureState PureState::zero(std::size_t n_qubits) {
  std::vector<cplx> a(std::size_t{1} << n_qubits, 0.0);
  a[0] = 1.0;
  return PureState(n_qubits, std::move(a));
}

ComplexMatrix PureState::as_column() const {
  return ComplexMatrix(amps_.size(), 1, amps_);
}

ComplexMatrix PureState::projector() const {
  const std::size_t d = amps_.size();
  ComplexMatrix p(d, d);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c) p(r, c) = amps_[r] * std::conj(amps_[c]);
  return p;
}

PureState PureState::tensor(const PureState& other) const {
  std::vector<cplx> out;
  out.reserve(dim() * other.dim());
  for (const auto& a : amps_)
    for (const auto& b : other.amps_) out.push_back(a * b);
  return PureState(n_qubits_ + other.n_qubits_, std::move(out));
}

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(ComplexMatrix m) : m_(std::move(m)) {
  if (!m_.square() || !is_power_of_two(m_.rows()))
    throw std::invalid_argument("DensityMatrix: dimension must be a power of 2");
  if (!m_.all_finite())
    throw std::invalid_argument("DensityMatrix: non-finite entry");
  if (hermiticity_error(m_) > kTolerance)
    throw std::invalid_argument("DensityMatrix: not Hermitian");
  if (std::abs(m_.trace() - cplx{1.0, 0.0}) > kTolerance)
    throw std::invalid_argument("DensityMatrix: trace != 1");
  if (min_eigenvalue(m_) < -kTolerance)
    throw std::invalid_argument("DensityMatrix: negative eigenvalue");
}

DensityMatrix DensityMatrix::from_pure(const PureState& psi) {
  return DensityMatrix(psi.projector());
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
  return DensityMatrix(ComplexMatrix::identity(dim) *
                       cplx{1.0 / static_cast<double>(dim), 0.0});
}

// ---------------------------------------------------------------------------
// Hermitian eigendecomposition

EigenDecomposition hermitian_eig(const ComplexMatrix& h) {
  if (!h.square()) throw std::invalid_argument("hermitian_eig: not square");
  if (!h.all_finite())
    throw std::invalid_argument("hermitian_eig: non-finite entry");
  if (hermiticity_error(h) > 1e-8)
    throw std::invalid_argument("hermitian_eig: matrix is not Hermitian");

  const std::size_t n = h.rows();
  ComplexMatrix a = (h + h.adjoint()) * cplx{0.5, 0.0};
  ComplexMatrix v = ComplexMatrix::identity(n);

  double frob2 = 0.0;
  for (const auto& z : a.data()) frob2 += std::norm(z);
  const double scale = std::max(1.0, std::sqrt(frob2));
  constexpr double kOffTol = 1e-12;
  constexpr int kMaxSweeps = 100;

  bool polishing = false;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    if (off == 0.0) break;
    // One extra sweep after reaching tolerance takes the off-diagonal mass
    // to rounding level (quadratic convergence).
    if (polishing) break;
    if (std::sqrt(off) <= kOffTol * scale) polishing = true;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag < 1e-300) continue;
        const cplx phase_conj = std::conj(apq / mag);
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double zeta = (aqq - app) / (2.0 * mag);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const cplx jpp = c, jpq = s;
        const cplx jqp = -s * phase_conj, jqq = c * phase_conj;

        for (std::size_t r = 0; r < n; ++r) {
          const cplx arp = a(r, p), arq = a(r, q);
          a(r, p) = arp * jpp + arq * jqp;
          a(r, q) = arp * jpq + arq * jqq;
          const cplx vrp = v(r, p), vrq = v(r, q);
          v(r, p) = vrp * jpp + vrq * jqp;
          v(r, q) = vrp * jpq + vrq * jqq;
        }
        for (std::size_t r = 0; r < n; ++r) {
          const cplx apr = a(p, r), aqr = a(q, r);
          a(p, r) = std::conj(jpp) * apr + std::conj(jqp) * aqr;
          a(q, r) = std::conj(jpq) * apr + std::conj(jqq) * aqr;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a(i, i).real() < a(j, j).real();
  });
  EigenDecomposition out{std::vector<double>(n), ComplexMatrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
  }
  return out;
}

namespace {

template <typename F>
ComplexMatrix spectral_map(const EigenDecomposition& e, F&& f) {
  const std::size_t n = e.values.size();
  ComplexMatrix scaled = e.vectors;
  for (std::size_t k = 0; k < n; ++k) {
    const cplx fk = f(e.values[k]);
    for (std::size_t r = 0; r < n; ++r) scaled(r, k) *= fk;
  }
  return scaled * e.vectors.adjoint();
}

}  // namespace

ComplexMatrix reconstruct(const EigenDecomposition& e) {
  return spectral_map(e, [](double l) { return cplx{l, 0.0}; });
}

double trace_norm(const ComplexMatrix& a) {
  const auto e = hermitian_eig(a);
  double s = 0.0;
  for (double l : e.values) s += std::abs(l);
  return s;
}

double min_eigenvalue(const ComplexMatrix& h) {
  return hermitian_eig(h).values.front();
}

ComplexMatrix psd_inv_sqrt(const ComplexMatrix& a, double kernel_tol) {
  const auto e = hermitian_eig(a);
  if (e.values.front() < -kernel_tol)
    throw std::invalid_argument("psd_inv_sqrt: matrix is not PSD");
  return spectral_map(e, [kernel_tol](double l) {
    return l > kernel_tol ? cplx{1.0 / std::sqrt(l), 0.0} : cplx{0.0, 0.0};
  });
}

ComplexMatrix expi_hermitian(const ComplexMatrix& h) {
  return spectral_map(hermitian_eig(h),
                      [](double l) { return std::polar(1.0, l); });
}

// ---------------------------------------------------------------------------
// Partial trace

DensityMatrix partial_trace(const DensityMatrix& rho,
                            std::span<const std::size_t> dims,
                            std::span<const std::size_t> keep) {
  const std::size_t total =
      std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                      std::multiplies<>());
  if (dims.empty() || total != rho.dim())
    throw std::invalid_argument("partial_trace: subsystem dims do not match");
  if (keep.empty())
    throw std::invalid_argument("partial_trace: keep set is empty");

  const std::size_t nsub = dims.size();
  std::vector<bool> kept(nsub, false);
  for (std::size_t k : keep) {
    if (k >= nsub || kept[k])
      throw std::invalid_argument("partial_trace: invalid keep index");
    kept[k] = true;
  }

  // Split a full index into (kept index, traced index), both row-major over
  // their own subsystems in original order.
  std::size_t kept_dim = 1;
  for (std::size_t s = 0; s < nsub; ++s)
    if (kept[s]) kept_dim *= dims[s];
  auto split = [&](std::size_t idx) {
    std::size_t kidx = 0, tidx = 0, kmul = 1, tmul = 1;
    for (std::size_t s = nsub; s-- > 0;) {
      const std::size_t digit = idx % dims[s];
      idx /= dims[s];
      if (kept[s]) {
        kidx += digit * kmul;
        kmul *= dims[s];
      } else {
        tidx += digit * tmul;
        tmul *= dims[s];
      }
    }
    return std::pair{kidx, tidx};
  };

  ComplexMatrix out(kept_dim, kept_dim);
  const auto& m = rho.matrix();
  for (std::size_t i = 0; i < total; ++i) {
    const auto [ki, ti] = split(i);
    for (std::size_t j = 0; j < total; ++j) {
      const auto [kj, tj] = split(j);
      if (ti == tj) out(ki, kj) += m(i, j);
    }
  }
  return DensityMatrix(std::move(out));
}

ComplexMatrix reduced_matrix(const PureState& psi,
                             std::span<const std::size_t> keep) {
  const std::size_t n = psi.n_qubits();
  std::vector<bool> kept(n, false);
  for (std::size_t k : keep) {
    if (k >= n || kept[k])
      throw std::invalid_argument("reduced_matrix: invalid keep index");
    kept[k] = true;
  }
  if (keep.empty())
    throw std::invalid_argument("reduced_matrix: keep set is empty");
  const std::size_t nk = keep.size();
  const std::size_t kdim = std::size_t{1} << nk;
  const std::size_t tdim = std::size_t{1} << (n - nk);

  // a(kidx, tidx) = psi[idx]
  ComplexMatrix a(tdim, kdim);
  for (std::size_t idx = 0; idx < psi.dim(); ++idx) {
    std::size_t kidx = 0, tidx = 0;
    for (std::size_t q = 0; q < n; ++q)
      if (!kept[q]) tidx = (tidx << 1) | ((idx >> (n - 1 - q)) & 1U);
    for (std::size_t k : keep) kidx = (kidx << 1) | ((idx >> (n - 1 - k)) & 1U);
    a(tidx, kidx) = psi[idx];
  }
  // rho(i, j) = sum_t a(t, i) conj(a(t, j)) = (a^T conj(a))(i, j); computed as
  // conj(a^dagger a) to stay on the kernel path.
  ComplexMatrix r = adjoint_times(a, a);
  for (auto& z : r.data()) z = std::conj(z);
  return r;
}

PureState purify(const DensityMatrix& rho) {
  const auto e = hermitian_eig(rho.matrix());
  const std::size_t d = rho.dim();
  const std::size_t nsys = static_cast<std::size_t>(std::countr_zero(d));
  std::vector<std::size_t> support;
  for (std::size_t k = 0; k < d; ++k)
    if (e.values[k] > 1e-14) support.push_back(k);
  std::size_t npur = 0;
  while ((std::size_t{1} << npur) < support.size()) ++npur;
  const std::size_t pdim = std::size_t{1} << npur;

  std::vector<cplx> amps(d * pdim, 0.0);
  double norm2 = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    const double w = std::sqrt(e.values[support[i]]);
    for (std::size_t s = 0; s < d; ++s) {
      amps[s * pdim + i] = w * e.vectors(s, support[i]);
      norm2 += std::norm(amps[s * pdim + i]);
    }
  }
  const double inv = 1.0 / std::sqrt(norm2);
  for (auto& z : amps) z *= inv;
  return PureState(nsys + npur, std::move(amps));
}

}  // namespace vqsd
