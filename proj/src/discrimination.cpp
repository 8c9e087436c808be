#include "vqsd/discrimination.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace vqsd {

LabeledEnsemble::LabeledEnsemble(std::vector<DensityMatrix> states_,
                                 std::vector<double> priors_)
    : states(std::move(states_)), priors(std::move(priors_)) {
  if (states.size() < 2)
    throw std::invalid_argument("LabeledEnsemble: need at least two states");
  if (states.size() != priors.size())
    throw std::invalid_argument("LabeledEnsemble: states/priors length mismatch");
  for (const auto& s : states)
    if (s.dim() != states.front().dim())
      throw std::invalid_argument("LabeledEnsemble: state dimensions differ");
  for (double q : priors)
    if (!(q >= 0.0) || !std::isfinite(q))
      throw std::invalid_argument("LabeledEnsemble: priors must be nonnegative");
  const double total = std::accumulate(priors.begin(), priors.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-10)
    throw std::invalid_argument("LabeledEnsemble: priors must sum to 1");
}

LabeledEnsemble LabeledEnsemble::equiprobable(std::vector<DensityMatrix> states) {
  const std::size_t l = states.size();
  return LabeledEnsemble(std::move(states),
                         std::vector<double>(l, l == 0 ? 0.0 : 1.0 / static_cast<double>(l)));
}

double error_probability(const LabeledEnsemble& ens, const PovmSet& povm) {
  if (povm.size() < ens.size())
    throw std::invalid_argument("error_probability: fewer POVM elements than states");
  if (povm.dim() != ens.dim())
    throw std::invalid_argument("error_probability: dimension mismatch");
  double success = 0.0;
  for (std::size_t m = 0; m < ens.size(); ++m)
    success += ens.priors[m] * real_trace_product(ens.states[m].matrix(), povm.elements[m]);
  return 1.0 - success;
}

HelstromResult helstrom(const DensityMatrix& rho0, const DensityMatrix& rho1,
                        double q0, double q1) {
  if (rho0.dim() != rho1.dim())
    throw std::invalid_argument("helstrom: dimension mismatch");
  if (q0 < 0.0 || q1 < 0.0 || std::abs(q0 + q1 - 1.0) > 1e-10)
    throw std::invalid_argument("helstrom: priors must be nonnegative and sum to 1");

  const ComplexMatrix lambda = rho0.matrix() * cplx{q0, 0.0} - rho1.matrix() * cplx{q1, 0.0};
  const auto eig = hermitian_eig(lambda);
  const std::size_t d = rho0.dim();

  HelstromResult out;
  out.lambda = eig.values;
  out.e0 = ComplexMatrix(d, d);
  double abs_sum = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    abs_sum += std::abs(eig.values[k]);
    if (eig.values[k] < -1e-12) continue;
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c)
        out.e0(r, c) += eig.vectors(r, k) * std::conj(eig.vectors(c, k));
  }
  out.e1 = ComplexMatrix::identity(d) - out.e0;
  out.bound = 0.5 - 0.5 * abs_sum;
  return out;
}

PovmSet pretty_good_measurement(const LabeledEnsemble& ens, double kernel_tol) {
  const std::size_t d = ens.dim();
  ComplexMatrix avg(d, d);
  for (std::size_t n = 0; n < ens.size(); ++n)
    avg += ens.states[n].matrix() * cplx{ens.priors[n], 0.0};

  const auto eig = hermitian_eig(avg);
  const ComplexMatrix s = psd_inv_sqrt(avg, kernel_tol);

  PovmSet out;
  for (std::size_t m = 0; m < ens.size(); ++m)
    out.elements.push_back(s * (ens.states[m].matrix() * cplx{ens.priors[m], 0.0}) * s);

  ComplexMatrix kernel_proj(d, d);
  bool deficient = false;
  for (std::size_t k = 0; k < d; ++k) {
    if (eig.values[k] > kernel_tol) continue;
    deficient = true;
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c)
        kernel_proj(r, c) += eig.vectors(r, k) * std::conj(eig.vectors(c, k));
  }
  if (deficient) out.elements.push_back(std::move(kernel_proj));
  return out;
}

CertificateReport optimality_certificate(const LabeledEnsemble& ens,
                                         const PovmSet& povm, double tol) {
  if (povm.dim() != ens.dim())
    throw std::invalid_argument("optimality_certificate: dimension mismatch");
  if (povm.size() < ens.size())
    throw std::invalid_argument("optimality_certificate: fewer POVM elements than states");
  const std::size_t d = ens.dim();
  const std::size_t total = povm.size();

  // Weighted states q_m rho_m, zero for unlabeled outcomes.
  std::vector<ComplexMatrix> weighted;
  weighted.reserve(total);
  for (std::size_t m = 0; m < total; ++m)
    weighted.push_back(m < ens.size()
                           ? ens.states[m].matrix() * cplx{ens.priors[m], 0.0}
                           : ComplexMatrix(d, d));

  CertificateReport rep;
  for (std::size_t m = 0; m < total; ++m)
    for (std::size_t n = 0; n < total; ++n) {
      if (m == n) continue;
      const ComplexMatrix r = povm.elements[m] * (weighted[m] - weighted[n]) * povm.elements[n];
      rep.pairwise_residual_max =
          std::max(rep.pairwise_residual_max, max_abs_diff(r, ComplexMatrix(d, d)));
    }

  ComplexMatrix gamma(d, d);
  for (std::size_t m = 0; m < ens.size(); ++m) gamma += povm.elements[m] * weighted[m];
  const ComplexMatrix y = (gamma + gamma.adjoint()) * cplx{0.5, 0.0};
  rep.dual_min_eigenvalue = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < ens.size(); ++n)
    rep.dual_min_eigenvalue = std::min(rep.dual_min_eigenvalue, min_eigenvalue(y - weighted[n]));

  rep.pass = rep.pairwise_residual_max <= tol && rep.dual_min_eigenvalue >= -tol;
  return rep;
}

double brute_force_two_state(const DensityMatrix& rho0, const DensityMatrix& rho1,
                             double q0, double q1, std::size_t grid_size) {
  if (rho0.dim() != 2 || rho1.dim() != 2)
    throw std::invalid_argument("brute_force_two_state: single-qubit states required");
  if (grid_size < 2) throw std::invalid_argument("brute_force_two_state: grid_size < 2");

  // Error of {P, I - P} with P = (I + n.sigma)/2, via Bloch vectors.
  auto bloch = [](const DensityMatrix& rho) {
    const auto& m = rho.matrix();
    return std::array<double, 3>{2.0 * m(0, 1).real(), -2.0 * m(0, 1).imag(),
                                 (m(0, 0) - m(1, 1)).real()};
  };
  const auto r0 = bloch(rho0), r1 = bloch(rho1);
  // Tr[rho P] = (1 + n.r)/2
  const double pi = std::numbers::pi;
  // {I, 0} and {0, I} are projective too; they win when Lambda is definite.
  double best = std::min(q0, q1);
  for (std::size_t i = 0; i < grid_size; ++i) {
    const double pol = pi * static_cast<double>(i) / static_cast<double>(grid_size - 1);
    for (std::size_t j = 0; j < grid_size; ++j) {
      const double az = 2.0 * pi * static_cast<double>(j) / static_cast<double>(grid_size);
      const std::array<double, 3> n{std::sin(pol) * std::cos(az), std::sin(pol) * std::sin(az),
                                    std::cos(pol)};
      const double nr0 = n[0] * r0[0] + n[1] * r0[1] + n[2] * r0[2];
      const double nr1 = n[0] * r1[0] + n[1] * r1[1] + n[2] * r1[2];
      const double success = q0 * 0.5 * (1.0 + nr0) + q1 * 0.5 * (1.0 - nr1);
      best = std::min(best, 1.0 - success);
    }
  }
  return best;
}

}  // namespace vqsd
