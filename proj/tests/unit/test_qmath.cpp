#include <cmath>
#include <numbers>

#include "doctest.h"
#include "test_util.hpp"
#include "vqsd/qmath.hpp"

using namespace vqsd;
using testutil::ket;
using testutil::proj;

namespace {

const double r2 = 1.0 / std::sqrt(2.0);

DensityMatrix bell_phi_plus() { return DensityMatrix(proj(ket({r2, 0, 0, r2}))); }

// Reduced state by explicit index bookkeeping on two qubits.
ComplexMatrix trace_out_qubit0(const ComplexMatrix& rho) {
  ComplexMatrix out(2, 2);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int k = 0; k < 2; ++k) out(a, b) += rho(2 * k + a, 2 * k + b);
  return out;
}

}  // namespace

TEST_SUITE("qmath") {
  TEST_CASE("kron examples") {
    CHECK(max_abs_diff(kron(pauli::I(), pauli::I()), ComplexMatrix::identity(4)) == 0.0);
    const double d[] = {1, 0};
    const double expect[] = {1, 1, 0, 0};
    CHECK(max_abs_diff(kron(ComplexMatrix::diagonal(std::span<const double>(d)), pauli::I()),
                       ComplexMatrix::diagonal(std::span<const double>(expect))) == 0.0);
    const ComplexMatrix k = kron(pauli::X(), pauli::Z());
    const ComplexMatrix x = pauli::X(), z = pauli::Z();
    for (std::size_t ia = 0; ia < 2; ++ia)
      for (std::size_t ja = 0; ja < 2; ++ja)
        for (std::size_t ib = 0; ib < 2; ++ib)
          for (std::size_t jb = 0; jb < 2; ++jb)
            CHECK(k(ia * 2 + ib, ja * 2 + jb) == x(ia, ja) * z(ib, jb));
    // hand expansion: X (x) Z = [[0, Z], [Z, 0]]
    const ComplexMatrix hand{{0, 0, 1, 0}, {0, 0, 0, -1}, {1, 0, 0, 0}, {0, -1, 0, 0}};
    CHECK(max_abs_diff(k, hand) == 0.0);
  }

  TEST_CASE("matrix products and adjoint_times") {
    Rng rng(3);
    const auto a = testutil::random_matrix(rng, 3, 4);
    const auto b = testutil::random_matrix(rng, 3, 5);
    CHECK(max_abs_diff(adjoint_times(a, b), a.adjoint() * b) < 1e-13);
    CHECK_THROWS_AS(a * a, std::invalid_argument);
  }

  TEST_CASE("ComplexMatrix rejects bad construction") {
    CHECK_THROWS_AS(ComplexMatrix(2, 2, std::vector<cplx>(3)), std::invalid_argument);
    CHECK_THROWS_AS((ComplexMatrix{{1, 2}, {3}}), std::invalid_argument);
    CHECK_THROWS_AS(ComplexMatrix(1, 1, {cplx{std::nan(""), 0.0}}), std::invalid_argument);
  }

  TEST_CASE("PureState validation") {
    CHECK_NOTHROW(PureState(1, {r2, r2}));
    CHECK_THROWS_AS(PureState(1, {1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(PureState(2, {1.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(PureState(1, {cplx{std::nan(""), 0.0}, 0.0}), std::invalid_argument);
    const PureState t = PureState(1, {0.0, 1.0}).tensor(PureState(1, {1.0, 0.0}));
    CHECK(t[2] == cplx{1.0, 0.0});  // |10>
  }

  TEST_CASE("DensityMatrix validation") {
    CHECK_NOTHROW(DensityMatrix::maximally_mixed(4));
    CHECK_THROWS_AS(DensityMatrix(ComplexMatrix{{1, 0}, {0, 1}}), std::invalid_argument);
    CHECK_THROWS_AS(DensityMatrix(ComplexMatrix{{0.5, 1}, {0, 0.5}}), std::invalid_argument);
    CHECK_THROWS_AS(DensityMatrix(ComplexMatrix{{1.5, 0}, {0, -0.5}}), std::invalid_argument);
    CHECK_THROWS_AS(DensityMatrix(ComplexMatrix::identity(3) * cplx{1.0 / 3, 0}),
                    std::invalid_argument);
  }

  TEST_CASE("hermitian_eig examples") {
    auto ez = hermitian_eig(pauli::Z());
    CHECK(ez.values[0] == doctest::Approx(-1.0));
    CHECK(ez.values[1] == doctest::Approx(1.0));

    auto ex = hermitian_eig(pauli::X());
    CHECK(ex.values[0] == doctest::Approx(-1.0));
    CHECK(ex.values[1] == doctest::Approx(1.0));
    // eigenvector of -1 is (|0> - |1>)/sqrt2 up to phase: |<v|minus>| = 1
    const cplx ov = std::conj(ex.vectors(0, 0)) * r2 - std::conj(ex.vectors(1, 0)) * r2;
    CHECK(std::abs(ov) == doctest::Approx(1.0).epsilon(1e-12));

    auto ei = hermitian_eig(ComplexMatrix::identity(4));
    for (double v : ei.values) CHECK(v == doctest::Approx(1.0));

    CHECK_THROWS_AS(hermitian_eig(ComplexMatrix{{0, 1}, {0, 0}}), std::invalid_argument);
  }

  TEST_CASE("hermitian_eig agrees with the 2x2 characteristic polynomial") {
    Rng rng(17);
    for (int rep = 0; rep < 50; ++rep) {
      const auto h = testutil::random_hermitian(rng, 2);
      const double a = h(0, 0).real(), d = h(1, 1).real();
      const double disc = std::sqrt((a - d) * (a - d) / 4.0 + std::norm(h(0, 1)));
      const auto e = hermitian_eig(h);
      CHECK(e.values[0] == doctest::Approx((a + d) / 2.0 - disc).epsilon(1e-12));
      CHECK(e.values[1] == doctest::Approx((a + d) / 2.0 + disc).epsilon(1e-12));
    }
  }

  TEST_CASE("trace_norm examples") {
    CHECK(trace_norm(pauli::Z()) == doctest::Approx(2.0));
    CHECK(trace_norm(ComplexMatrix(2, 2)) == doctest::Approx(0.0));
    const ComplexMatrix lam =
        (proj(ket({1, 0})) - proj(ket({r2, r2}))) * cplx{0.5, 0.0};
    // eigenvalues +-sqrt(2)/4
    CHECK(trace_norm(lam) == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-12));
  }

  TEST_CASE("psd_inv_sqrt examples") {
    CHECK(max_abs_diff(psd_inv_sqrt(ComplexMatrix::identity(2)), ComplexMatrix::identity(2)) <
          1e-12);
    const double d[] = {4.0, 0.0}, e[] = {0.5, 0.0};
    CHECK(max_abs_diff(psd_inv_sqrt(ComplexMatrix::diagonal(std::span<const double>(d))),
                       ComplexMatrix::diagonal(std::span<const double>(e))) < 1e-12);
    const double neg[] = {1.0, -0.1};
    CHECK_THROWS_AS(psd_inv_sqrt(ComplexMatrix::diagonal(std::span<const double>(neg))),
                    std::invalid_argument);

    Rng rng(23);
    for (int rep = 0; rep < 20; ++rep) {
      const auto rho = testutil::random_density(rng, 4, 1);
      const ComplexMatrix s = psd_inv_sqrt(rho.matrix(), 1e-9);
      const ComplexMatrix p = s * rho.matrix() * s;
      // projector onto the support of a rank-1 rho is rho / Tr(rho^2) = rho here
      CHECK(max_abs_diff(p * p, p) < 1e-8);
      CHECK(p.trace().real() == doctest::Approx(1.0).epsilon(1e-8));
      CHECK(max_abs_diff(p * rho.matrix(), rho.matrix()) < 1e-8);
    }
  }

  TEST_CASE("expi_hermitian matches the Pauli closed form") {
    const double t = 0.37;
    const ComplexMatrix expect =
        ComplexMatrix::identity(2) * cplx{std::cos(t), 0} + pauli::Y() * cplx{0, std::sin(t)};
    CHECK(max_abs_diff(expi_hermitian(pauli::Y() * cplx{t, 0}), expect) < 1e-12);
  }

  TEST_CASE("partial_trace examples") {
    const std::size_t dims[] = {2, 2};
    const std::size_t keep1[] = {1};
    const DensityMatrix zz(proj(ket({1, 0, 0, 0})));
    CHECK(max_abs_diff(partial_trace(zz, dims, keep1).matrix(), proj(ket({1, 0}))) < 1e-14);

    const auto half = partial_trace(bell_phi_plus(), dims, keep1);
    CHECK(max_abs_diff(half.matrix(), ComplexMatrix::identity(2) * cplx{0.5, 0}) < 1e-14);

    const std::size_t both[] = {0, 1};
    Rng rng(2);
    const auto rho = testutil::random_density(rng, 4, 3);
    CHECK(max_abs_diff(partial_trace(rho, dims, both).matrix(), rho.matrix()) < 1e-14);
    CHECK(max_abs_diff(partial_trace(rho, dims, keep1).matrix(),
                       trace_out_qubit0(rho.matrix())) < 1e-14);

    const std::size_t bad_dims[] = {2, 3};
    const std::size_t out_of_range[] = {2};
    CHECK_THROWS_AS(partial_trace(rho, bad_dims, keep1), std::invalid_argument);
    CHECK_THROWS_AS(partial_trace(rho, dims, std::span<const std::size_t>{}),
                    std::invalid_argument);
    CHECK_THROWS_AS(partial_trace(rho, dims, out_of_range), std::invalid_argument);
  }

  TEST_CASE("partial_trace accepts non-qubit subsystem dims") {
    Rng rng(8);
    const auto rho = testutil::random_density(rng, 4, 2);
    const std::size_t dims[] = {4};
    const std::size_t keep[] = {0};
    CHECK(max_abs_diff(partial_trace(rho, dims, keep).matrix(), rho.matrix()) < 1e-14);
  }

  TEST_CASE("reduced_matrix agrees with partial_trace") {
    Rng rng(4);
    const std::size_t dims[] = {2, 2, 2};
    for (int rep = 0; rep < 10; ++rep) {
      const auto psi = testutil::random_state(rng, 3);
      const auto rho = DensityMatrix::from_pure(psi);
      const std::size_t keep[] = {0, 2};
      CHECK(max_abs_diff(reduced_matrix(psi, keep), partial_trace(rho, dims, keep).matrix()) <
            1e-13);
      const std::size_t one[] = {1};
      CHECK(max_abs_diff(reduced_matrix(psi, one), partial_trace(rho, dims, one).matrix()) <
            1e-13);
    }
  }

  TEST_CASE("purify reproduces the state") {
    Rng rng(6);
    for (std::size_t rank : {1u, 2u, 3u, 4u}) {
      const auto rho = testutil::random_density(rng, 4, rank);
      const auto psi = purify(rho);
      std::vector<std::size_t> keep{0, 1};
      CHECK(max_abs_diff(reduced_matrix(psi, keep), rho.matrix()) < 1e-10);
    }
    const auto pure = purify(DensityMatrix(proj(ket({r2, r2}))));
    CHECK(pure.n_qubits() == 1);
  }
}
