#pragma once

#include <array>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "vqsd/qmath.hpp"

namespace vqsd {

// ---------------------------------------------------------------------------
// Mixed single-qubit states rho_zeta(phi) = cos^2(phi)|zeta+><zeta+| +
// sin^2(phi)|zeta-><zeta-|, realized as the second qubit of an entangled pair.

enum class Axis { X, Y, Z };

struct MixedStateSpec {
  Axis axis = Axis::Z;
  double angle = 0.0;
};

Axis parse_axis(const std::string& s);

/// (U (x) U)(cos phi |00> + sin phi |11>) with U|0> = |zeta+>, U|1> = |zeta->.
PureState prepare_rho_zeta(const MixedStateSpec& spec);

/// The analytic single-qubit density matrix.
DensityMatrix rho_zeta(const MixedStateSpec& spec);

// ---------------------------------------------------------------------------
// Iris feature map

enum class EncodingFunction { InvCosCos, Gaussian };

EncodingFunction parse_encoding(const std::string& s);
std::string to_string(EncodingFunction f);

/// phi_gamma (single-qubit terms) and phi_{gamma,gamma+1} (couplings, cyclic).
struct FeatureCoefficients {
  std::array<double, 4> single{};
  std::array<double, 4> coupling{};  // coupling[g] pairs attribute g with g+1 mod 4
};

/// phi_j = x_j, phi_ij = pi / (3 cos x_i cos x_j).
FeatureCoefficients encode_invcoscos(const std::array<double, 4>& x);
/// phi_j = x_j, phi_ij = exp(|x_i - x_j|^2 ln(pi) / 8).
FeatureCoefficients encode_gaussian(const std::array<double, 4>& x);
FeatureCoefficients encode(EncodingFunction f, const std::array<double, 4>& x);

/// Two-qubit feature state (V_Phi)^layers exp(i phi_1 P_1)|00>, with
/// P = (X(x)I, I(x)X, Z(x)I, I(x)Z) and
/// V_Phi = prod_g exp(i phi_{g,g+1} P_g P_{g+1}) exp(i phi_g P_g), g = 1 first.
PureState feature_map(const FeatureCoefficients& c, std::size_t layers);

// ---------------------------------------------------------------------------
// Iris data

struct IrisDataset {
  std::vector<std::array<double, 4>> points;
  std::vector<int> labels;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// CSV "sepal_length,sepal_width,petal_length,petal_width,species" with an
/// optional header row. Species: setosa, versicolor, virginica (an "Iris-"
/// prefix is accepted).
IrisDataset load_iris(const std::filesystem::path& path);
IrisDataset parse_iris(const std::string& text);

/// Per-attribute affine map of [min, max] onto [-pi/5, pi/5].
IrisDataset rescale(const IrisDataset& raw);

}  // namespace vqsd
