#include "vqsd/povm_circuit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>

namespace vqsd {

// ---------------------------------------------------------------------------
// Spec and parameter layout

PovmCircuitSpec::PovmCircuitSpec(std::size_t n_target_, std::size_t n_ancilla_,
                                 std::size_t n_outcomes_,
                                 std::vector<std::size_t> target_qubits_)
    : n_target(n_target_),
      n_ancilla(n_ancilla_),
      n_outcomes(n_outcomes_),
      target_qubits(std::move(target_qubits_)) {
  if (n_target < 1 || n_ancilla < 1)
    throw std::invalid_argument("PovmCircuitSpec: need n_target, n_ancilla >= 1");
  if (n_outcomes < 2)
    throw std::invalid_argument("PovmCircuitSpec: at least two outcomes required");
  const std::size_t full = std::size_t{1} << n_ancilla;
  if (n_outcomes > full || 2 * n_outcomes <= full)
    throw std::invalid_argument(
        "PovmCircuitSpec: n_ancilla must equal ceil(log2(n_outcomes))");
  if (target_qubits.size() != n_target)
    throw std::invalid_argument("PovmCircuitSpec: target qubit count != n_target");
  auto sorted = target_qubits;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("PovmCircuitSpec: duplicate target qubit");
}

PovmCircuitSpec PovmCircuitSpec::for_outcomes(std::size_t n_target,
                                              std::size_t n_outcomes,
                                              std::vector<std::size_t> targets) {
  std::size_t na = 0;
  while ((std::size_t{1} << na) < n_outcomes) ++na;
  return PovmCircuitSpec(n_target, na, n_outcomes, std::move(targets));
}

std::size_t param_count(std::size_t n_target, std::size_t n_ancilla) {
  const std::size_t blocks = (std::size_t{1} << n_ancilla) - 1;
  return blocks * ((std::size_t{1} << (2 * n_target)) - 1 +
                   (std::size_t{1} << n_target));
}

std::size_t kraus_index(std::size_t a, std::span<const int> prefix_bits) {
  if (a < 1) throw std::invalid_argument("kraus_index: a must be >= 1");
  if (prefix_bits.size() != a - 1)
    throw std::invalid_argument("kraus_index: prefix length must be a - 1");
  std::size_t j = std::size_t{1} << (a - 1);
  for (std::size_t i = 1; i < a; ++i)
    if (prefix_bits[i - 1] != 0) j += std::size_t{1} << (a - 1 - i);
  return j;
}

namespace {

std::size_t generator_len(std::size_t n) { return (std::size_t{1} << (2 * n)) - 1; }
std::size_t block_len(std::size_t n) {
  return generator_len(n) + (std::size_t{1} << n);
}

}  // namespace

ParamVector::ParamVector(const PovmCircuitSpec& spec, std::vector<double> theta)
    : n_target_(spec.n_target), n_ancilla_(spec.n_ancilla), theta_(std::move(theta)) {
  const std::size_t want = param_count(n_target_, n_ancilla_);
  if (theta_.size() != want)
    throw std::invalid_argument("ParamVector: expected " + std::to_string(want) +
                                " parameters, got " + std::to_string(theta_.size()));
  for (double t : theta_)
    if (!std::isfinite(t)) throw std::invalid_argument("ParamVector: non-finite entry");
}

ParamVector ParamVector::zeros(const PovmCircuitSpec& spec) {
  return ParamVector(spec, std::vector<double>(param_count(spec.n_target, spec.n_ancilla)));
}

std::span<const double> ParamVector::generator(std::size_t j) const {
  const std::size_t off = (j - 1) * block_len(n_target_);
  return std::span<const double>(theta_).subspan(off, generator_len(n_target_));
}

std::span<const double> ParamVector::angles(std::size_t j) const {
  const std::size_t off = (j - 1) * block_len(n_target_) + generator_len(n_target_);
  return std::span<const double>(theta_).subspan(off, std::size_t{1} << n_target_);
}

// ---------------------------------------------------------------------------
// Block unitaries

const std::vector<ComplexMatrix>& pauli_generators(std::size_t n_qubits) {
  constexpr std::size_t kMaxQubits = 6;
  if (n_qubits < 1 || n_qubits > kMaxQubits)
    throw std::invalid_argument("pauli_generators: unsupported qubit count");
  static std::array<std::vector<ComplexMatrix>, kMaxQubits + 1> cache;
  static std::array<std::once_flag, kMaxQubits + 1> once;
  std::call_once(once[n_qubits], [n_qubits] {
    const std::array<ComplexMatrix, 4> single{pauli::I(), pauli::X(), pauli::Y(),
                                              pauli::Z()};
    const std::size_t count = std::size_t{1} << (2 * n_qubits);
    auto& out = cache[n_qubits];
    out.reserve(count - 1);
    for (std::size_t code = 1; code < count; ++code) {
      ComplexMatrix g = ComplexMatrix::identity(1);
      for (std::size_t q = 0; q < n_qubits; ++q) {
        const std::size_t digit = (code >> (2 * (n_qubits - 1 - q))) & 3U;
        g = kron(g, single[digit]);
      }
      out.push_back(std::move(g));
    }
  });
  return cache[n_qubits];
}

ComplexMatrix build_block_unitary(std::span<const double> generator_coeffs) {
  std::size_t n = 0;
  while (generator_len(n) < generator_coeffs.size()) ++n;
  if (n == 0 || generator_len(n) != generator_coeffs.size())
    throw std::invalid_argument("build_block_unitary: coefficient count must be 4^n - 1");
  const auto& gens = pauli_generators(n);
  const std::size_t d = std::size_t{1} << n;
  ComplexMatrix h(d, d);
  for (std::size_t k = 0; k < gens.size(); ++k) {
    const double c = generator_coeffs[k];
    if (c == 0.0) continue;
    auto hd = h.data();
    auto gd = gens[k].data();
    for (std::size_t i = 0; i < hd.size(); ++i) hd[i] += c * gd[i];
  }
  return expi_hermitian(h);
}

namespace {

std::vector<ComplexMatrix> block_unitaries(const PovmCircuitSpec& spec,
                                           const ParamVector& theta) {
  if (theta.n_target() != spec.n_target || theta.n_ancilla() != spec.n_ancilla)
    throw std::invalid_argument("ParamVector does not match circuit spec");
  std::vector<ComplexMatrix> u;
  u.reserve(spec.block_count() + 1);
  u.emplace_back();  // blocks are 1-indexed
  for (std::size_t j = 1; j <= spec.block_count(); ++j)
    u.push_back(build_block_unitary(theta.generator(j)));
  return u;
}

// Bit mask inside a register of n qubits for qubit q (qubit 0 = MSB).
std::size_t qubit_mask(std::size_t n, std::size_t q) {
  return std::size_t{1} << (n - 1 - q);
}

}  // namespace

// ---------------------------------------------------------------------------
// Statevector route

PureState apply_povm_circuit(const PureState& input, const PovmCircuitSpec& spec,
                             const ParamVector& theta) {
  const std::size_t n_in = input.n_qubits();
  for (std::size_t t : spec.target_qubits)
    if (t >= n_in)
      throw std::invalid_argument("apply_povm_circuit: target qubit outside input register");

  const auto u = block_unitaries(spec, theta);
  const std::size_t na = spec.n_ancilla;
  const std::size_t n = n_in + na;
  const std::size_t dim = std::size_t{1} << n;
  const std::size_t td = spec.target_dim();

  std::vector<cplx> psi(dim, 0.0);
  for (std::size_t i = 0; i < input.dim(); ++i) psi[i << na] = input[i];

  // offset[t] = full-register bits of target basis configuration t.
  std::vector<std::size_t> offset(td, 0);
  std::size_t target_bits = 0;
  for (std::size_t t = 0; t < td; ++t)
    for (std::size_t k = 0; k < spec.n_target; ++k)
      if ((t >> (spec.n_target - 1 - k)) & 1U)
        offset[t] |= qubit_mask(n, spec.target_qubits[k]);
  for (std::size_t k = 0; k < spec.n_target; ++k)
    target_bits |= qubit_mask(n, spec.target_qubits[k]);
  auto target_index = [&](std::size_t idx) {
    std::size_t t = 0;
    for (std::size_t k = 0; k < spec.n_target; ++k)
      t = (t << 1) | ((idx & qubit_mask(n, spec.target_qubits[k])) ? 1U : 0U);
    return t;
  };

  std::vector<cplx> gathered(td), mixed(td);
  for (std::size_t a = 1; a <= na; ++a) {
    // Ancilla a sits at register qubit n_in + a - 1; its control prefix is
    // ancillas 1..a-1, i.e. the top (a-1) bits of the ancilla field.
    const std::size_t anc_mask = qubit_mask(n, n_in + a - 1);
    const std::size_t prefix_shift = na - (a - 1);
    for (std::size_t idx = 0; idx < dim; ++idx) {
      if (idx & target_bits) continue;
      const std::size_t anc_field = idx & ((std::size_t{1} << na) - 1);
      const std::size_t pre = (a == 1) ? 0 : (anc_field >> prefix_shift);
      const ComplexMatrix& uj = u[(std::size_t{1} << (a - 1)) + pre];
      for (std::size_t t = 0; t < td; ++t) gathered[t] = psi[idx | offset[t]];
      for (std::size_t r = 0; r < td; ++r) {
        cplx acc = 0.0;
        for (std::size_t c = 0; c < td; ++c) acc += uj(r, c) * gathered[c];
        mixed[r] = acc;
      }
      for (std::size_t t = 0; t < td; ++t) psi[idx | offset[t]] = mixed[t];
    }
    // Target-controlled R_y on ancilla a; angles from block j(a).
    for (std::size_t idx = 0; idx < dim; ++idx) {
      if (idx & anc_mask) continue;
      const std::size_t anc_field = idx & ((std::size_t{1} << na) - 1);
      const std::size_t pre = (a == 1) ? 0 : (anc_field >> prefix_shift);
      const std::size_t j = (std::size_t{1} << (a - 1)) + pre;
      const double ang = theta.angles(j)[target_index(idx)];
      const double c = std::cos(0.5 * ang), s = std::sin(0.5 * ang);
      const cplx a0 = psi[idx], a1 = psi[idx | anc_mask];
      psi[idx] = c * a0 - s * a1;
      psi[idx | anc_mask] = s * a0 + c * a1;
    }
  }
  return PureState(n, std::move(psi));
}

std::vector<double> outcome_probabilities(const PureState& input,
                                          const PovmCircuitSpec& spec,
                                          const ParamVector& theta) {
  const PureState out = apply_povm_circuit(input, spec, theta);
  const std::size_t nm = spec.outcome_count();
  std::vector<double> p(nm, 0.0);
  for (std::size_t idx = 0; idx < out.dim(); ++idx) p[idx & (nm - 1)] += std::norm(out[idx]);
  return p;
}

// ---------------------------------------------------------------------------
// Kraus route

KrausSet kraus_operators(const PovmCircuitSpec& spec, const ParamVector& theta) {
  const auto u = block_unitaries(spec, theta);
  const std::size_t td = spec.target_dim();

  // Breadth-first over the binary tree; level a holds 2^(a-1) partial products
  // indexed by the prefix z_1..z_(a-1) read as an integer.
  std::vector<ComplexMatrix> level{ComplexMatrix::identity(td)};
  for (std::size_t a = 1; a <= spec.n_ancilla; ++a) {
    std::vector<ComplexMatrix> next;
    next.reserve(2 * level.size());
    for (std::size_t pre = 0; pre < level.size(); ++pre) {
      const std::size_t j = (std::size_t{1} << (a - 1)) + pre;
      const ComplexMatrix m = u[j] * level[pre];
      const auto ang = theta.angles(j);
      ComplexMatrix c = m, s = m;
      for (std::size_t r = 0; r < td; ++r) {
        const double cr = std::cos(0.5 * ang[r]), sr = std::sin(0.5 * ang[r]);
        for (std::size_t col = 0; col < td; ++col) {
          c(r, col) *= cr;
          s(r, col) *= sr;
        }
      }
      next.push_back(std::move(c));
      next.push_back(std::move(s));
    }
    level = std::move(next);
  }
  return KrausSet{std::move(level)};
}

PovmSet povm_elements(const KrausSet& kraus) {
  PovmSet out;
  out.elements.reserve(kraus.operators.size());
  for (const auto& k : kraus.operators) {
    ComplexMatrix e = adjoint_times(k, k);
    // Exact Hermitian symmetry for downstream eigensolvers.
    for (std::size_t r = 0; r < e.rows(); ++r) {
      e(r, r) = e(r, r).real();
      for (std::size_t c = r + 1; c < e.cols(); ++c) {
        const cplx avg = 0.5 * (e(r, c) + std::conj(e(c, r)));
        e(r, c) = avg;
        e(c, r) = std::conj(avg);
      }
    }
    out.elements.push_back(std::move(e));
  }
  return out;
}

PovmSet povm_elements(const PovmCircuitSpec& spec, const ParamVector& theta) {
  return povm_elements(kraus_operators(spec, theta));
}

double PovmSet::completeness_error() const {
  if (elements.empty()) throw std::invalid_argument("PovmSet: empty");
  ComplexMatrix sum(dim(), dim());
  for (const auto& e : elements) sum += e;
  return max_abs_diff(sum, ComplexMatrix::identity(dim()));
}

double PovmSet::min_eigenvalue() const {
  double m = 0.0;
  bool first = true;
  for (const auto& e : elements) {
    const double v = vqsd::min_eigenvalue(e);
    m = first ? v : std::min(m, v);
    first = false;
  }
  return m;
}

}  // namespace vqsd
