#pragma once

#include <cstddef>
#include <vector>

#include "vqsd/povm_circuit.hpp"
#include "vqsd/qmath.hpp"

namespace vqsd {

/// A-priori states rho_m with priors q_m.
struct LabeledEnsemble {
  std::vector<DensityMatrix> states;
  std::vector<double> priors;

  /// Validates l >= 2, equal dims, q_m >= 0, sum q_m = 1 within 1e-10.
  LabeledEnsemble(std::vector<DensityMatrix> states, std::vector<double> priors);
  static LabeledEnsemble equiprobable(std::vector<DensityMatrix> states);

  std::size_t size() const noexcept { return states.size(); }
  std::size_t dim() const { return states.front().dim(); }
};

/// 1 - sum_{m<l} q_m Tr[rho_m E_m]. POVM elements beyond l are never credited.
double error_probability(const LabeledEnsemble& ens, const PovmSet& povm);

struct HelstromResult {
  double bound = 0.0;
  ComplexMatrix e0;             // projector onto eigenvalues >= 0 of Lambda
  ComplexMatrix e1;             // complement
  std::vector<double> lambda;   // spectrum of q0 rho0 - q1 rho1, ascending
};

/// Optimal two-outcome measurement. Eigenvalues with |lambda| <= 1e-12 go to e0.
HelstromResult helstrom(const DensityMatrix& rho0, const DensityMatrix& rho1,
                        double q0, double q1);

/// Square-root measurement q_m S rho_m S with S = rho^{-1/2} (pseudo-inverse).
/// When the average state is rank deficient, I - P_support is appended as an
/// extra element with no label.
PovmSet pretty_good_measurement(const LabeledEnsemble& ens,
                                double kernel_tol = 1e-12);

struct CertificateReport {
  double pairwise_residual_max = 0.0;  // max_{m,n} |E_m (q_m rho_m - q_n rho_n) E_n|
  double dual_min_eigenvalue = 0.0;    // min_n lambda_min(Herm(sum q_m E_m rho_m) - q_n rho_n)
  bool pass = false;
};

/// Necessary and sufficient optimality conditions for minimum-error
/// discrimination. Unlabeled POVM elements are treated as outcomes of weight 0.
CertificateReport optimality_certificate(const LabeledEnsemble& ens,
                                         const PovmSet& povm, double tol);

/// Minimum error over single-qubit projective measurements {P(n), I - P(n)},
/// n on a grid_size x grid_size (polar x azimuthal) grid of the Bloch sphere,
/// together with the trivial measurements {I, 0} and {0, I}.
double brute_force_two_state(const DensityMatrix& rho0, const DensityMatrix& rho1,
                             double q0, double q1, std::size_t grid_size);

}  // namespace vqsd
