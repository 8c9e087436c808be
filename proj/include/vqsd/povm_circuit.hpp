#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "vqsd/qmath.hpp"

// Parameterized POVM circuit built from the cosine-sine binary tree: n_A
// layers W_a, layer a uniformly controlled by ancillas 1..a-1. Every
// controlled variant j(a) applies a general target unitary U_j followed by a
// target-controlled R_y on ancilla a.
//
// Conventions:
//  * R_y(theta)|0> = cos(theta/2)|0> + sin(theta/2)|1>.
//  * Ancillas are appended after the input register; ancilla 1 is the most
//    significant bit of the outcome index m.
//  * U_j = exp(i sum_k c_k G_k) over the 4^n - 1 non-identity Pauli strings,
//    ordered lexicographically with I < X < Y < Z per qubit.

namespace vqsd {

struct PovmCircuitSpec {
  std::size_t n_target = 1;
  std::size_t n_ancilla = 1;
  std::size_t n_outcomes = 2;  // l; outcomes m >= l are never labels
  std::vector<std::size_t> target_qubits{0};

  /// Validates: l >= 2, 2^(n_A-1) < l <= 2^n_A, distinct targets.
  PovmCircuitSpec(std::size_t n_target, std::size_t n_ancilla,
                  std::size_t n_outcomes, std::vector<std::size_t> target_qubits);

  /// n_A = ceil(log2 l).
  static PovmCircuitSpec for_outcomes(std::size_t n_target, std::size_t n_outcomes,
                                      std::vector<std::size_t> target_qubits);

  std::size_t target_dim() const noexcept { return std::size_t{1} << n_target; }
  /// 2^n_A simulated outcomes.
  std::size_t outcome_count() const noexcept { return std::size_t{1} << n_ancilla; }
  std::size_t block_count() const noexcept { return outcome_count() - 1; }
};

/// (2^n_A - 1)(4^n_T - 1 + 2^n_T)
std::size_t param_count(std::size_t n_target, std::size_t n_ancilla);

/// j(a) = 2^(a-1) + sum_i z_i 2^(a-1-i), for a >= 1 and prefix z_1..z_(a-1).
std::size_t kraus_index(std::size_t a, std::span<const int> prefix_bits);

/// Circuit parameters. Layout per block j = 1..2^n_A-1: the 4^n_T-1 generator
/// coefficients of U_j, then the 2^n_T R_y angles indexed by target basis.
class ParamVector {
 public:
  ParamVector(const PovmCircuitSpec& spec, std::vector<double> theta);
  static ParamVector zeros(const PovmCircuitSpec& spec);

  std::size_t size() const noexcept { return theta_.size(); }
  std::span<const double> values() const noexcept { return theta_; }
  double operator[](std::size_t i) const { return theta_[i]; }

  /// Block j in 1..block_count().
  std::span<const double> generator(std::size_t j) const;
  std::span<const double> angles(std::size_t j) const;

  std::size_t n_target() const noexcept { return n_target_; }
  std::size_t n_ancilla() const noexcept { return n_ancilla_; }

 private:
  std::size_t n_target_;
  std::size_t n_ancilla_;
  std::vector<double> theta_;
};

/// The 4^n - 1 non-identity n-qubit Pauli strings in generator order.
const std::vector<ComplexMatrix>& pauli_generators(std::size_t n_qubits);

/// exp(i sum_k c_k G_k); coefficient count must be 4^n - 1.
ComplexMatrix build_block_unitary(std::span<const double> generator_coeffs);

struct KrausSet {
  std::vector<ComplexMatrix> operators;  // one per outcome, 2^n_A total
};

struct PovmSet {
  std::vector<ComplexMatrix> elements;

  std::size_t size() const noexcept { return elements.size(); }
  std::size_t dim() const { return elements.empty() ? 0 : elements.front().rows(); }
  /// max |sum_m E_m - I|
  double completeness_error() const;
  /// min over elements of the smallest eigenvalue
  double min_eigenvalue() const;
};

/// U(Theta)(|psi> (x) |0>_A) by direct statevector simulation.
PureState apply_povm_circuit(const PureState& input, const PovmCircuitSpec& spec,
                             const ParamVector& theta);

/// p(m) for every simulated outcome, from the statevector.
std::vector<double> outcome_probabilities(const PureState& input,
                                          const PovmCircuitSpec& spec,
                                          const ParamVector& theta);

/// K_m = D_j(n_A) U_j(n_A) ... D_j(1) U_j(1), layer 1 applied first.
KrausSet kraus_operators(const PovmCircuitSpec& spec, const ParamVector& theta);

PovmSet povm_elements(const KrausSet& kraus);
PovmSet povm_elements(const PovmCircuitSpec& spec, const ParamVector& theta);

}  // namespace vqsd
