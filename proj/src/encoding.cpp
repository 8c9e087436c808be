#include "vqsd/encoding.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace vqsd {

namespace {

// Columns are |zeta+>, |zeta->.
ComplexMatrix basis_change(Axis axis) {
  const double r = 1.0 / std::sqrt(2.0);
  switch (axis) {
    case Axis::Z:
      return ComplexMatrix::identity(2);
    case Axis::X:
      return {{r, r}, {r, -r}};
    case Axis::Y:
      // S H: H first, then the phase gate.
      return {{r, r}, {cplx{0.0, r}, cplx{0.0, -r}}};
  }
  throw std::invalid_argument("basis_change: bad axis");
}

}  // namespace

Axis parse_axis(const std::string& s) {
  if (s == "x" || s == "X") return Axis::X;
  if (s == "y" || s == "Y") return Axis::Y;
  if (s == "z" || s == "Z") return Axis::Z;
  throw std::invalid_argument("unknown axis '" + s + "'");
}

PureState prepare_rho_zeta(const MixedStateSpec& spec) {
  if (!std::isfinite(spec.angle)) throw std::invalid_argument("prepare_rho_zeta: bad angle");
  const ComplexMatrix u = basis_change(spec.axis);
  const ComplexMatrix uu = kron(u, u);
  ComplexMatrix bell(4, 1);
  bell(0, 0) = std::cos(spec.angle);
  bell(3, 0) = std::sin(spec.angle);
  const ComplexMatrix out = uu * bell;
  return PureState(2, std::vector<cplx>(out.data().begin(), out.data().end()));
}

DensityMatrix rho_zeta(const MixedStateSpec& spec) {
  const ComplexMatrix u = basis_change(spec.axis);
  const double c2 = std::cos(spec.angle) * std::cos(spec.angle);
  const double s2 = std::sin(spec.angle) * std::sin(spec.angle);
  const std::array<double, 2> w{c2, s2};
  return DensityMatrix(u * ComplexMatrix::diagonal(std::span<const double>(w)) * u.adjoint());
}

EncodingFunction parse_encoding(const std::string& s) {
  if (s == "invcoscos") return EncodingFunction::InvCosCos;
  if (s == "gaussian") return EncodingFunction::Gaussian;
  throw std::invalid_argument("unknown encoding '" + s + "'");
}

std::string to_string(EncodingFunction f) {
  return f == EncodingFunction::InvCosCos ? "invcoscos" : "gaussian";
}

FeatureCoefficients encode_invcoscos(const std::array<double, 4>& x) {
  FeatureCoefficients c;
  for (std::size_t g = 0; g < 4; ++g) {
    c.single[g] = x[g];
    const double den = std::cos(x[g]) * std::cos(x[(g + 1) % 4]);
    if (std::abs(den) < 1e-9)
      throw std::invalid_argument("encode_invcoscos: cos(x_i) cos(x_j) vanishes");
    c.coupling[g] = std::numbers::pi / (3.0 * den);
  }
  return c;
}

FeatureCoefficients encode_gaussian(const std::array<double, 4>& x) {
  FeatureCoefficients c;
  const double k = std::log(std::numbers::pi) / 8.0;
  for (std::size_t g = 0; g < 4; ++g) {
    c.single[g] = x[g];
    const double d = x[g] - x[(g + 1) % 4];
    c.coupling[g] = std::exp(d * d * k);
  }
  return c;
}

FeatureCoefficients encode(EncodingFunction f, const std::array<double, 4>& x) {
  return f == EncodingFunction::InvCosCos ? encode_invcoscos(x) : encode_gaussian(x);
}

PureState feature_map(const FeatureCoefficients& c, std::size_t layers) {
  const ComplexMatrix id = pauli::I();
  static const std::array<ComplexMatrix, 4> p{
      kron(pauli::X(), id), kron(id, pauli::X()), kron(pauli::Z(), id), kron(id, pauli::Z())};
  static const std::array<ComplexMatrix, 4> pp{p[0] * p[1], p[1] * p[2], p[2] * p[3],
                                               p[3] * p[0]};
  // exp(i a P) = cos a I + i sin a P for a Pauli string P.
  auto rot = [](const ComplexMatrix& pauli_string, double a) {
    return ComplexMatrix::identity(4) * cplx{std::cos(a), 0.0} +
           pauli_string * cplx{0.0, std::sin(a)};
  };

  ComplexMatrix state(4, 1);
  state(0, 0) = 1.0;
  state = rot(p[0], c.single[0]) * state;
  for (std::size_t layer = 0; layer < layers; ++layer)
    for (std::size_t g = 0; g < 4; ++g) {
      state = rot(p[g], c.single[g]) * state;
      state = rot(pp[g], c.coupling[g]) * state;
    }
  return PureState(2, std::vector<cplx>(state.data().begin(), state.data().end()));
}

// ---------------------------------------------------------------------------

ParseError::ParseError(const std::string& what, std::size_t line)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

}  // namespace

IrisDataset parse_iris(const std::string& text) {
  IrisDataset ds;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ',')) fields.push_back(trim(f));
    if (!line.empty() && line.back() == ',') fields.emplace_back();

    double probe = 0.0;
    if (first_content && (fields.empty() || !parse_double(fields[0], probe))) {
      first_content = false;
      continue;  // header
    }
    first_content = false;
    if (fields.size() != 5)
      throw ParseError("expected 5 columns, found " + std::to_string(fields.size()), lineno);
    std::array<double, 4> x{};
    for (std::size_t k = 0; k < 4; ++k)
      if (!parse_double(fields[k], x[k]) || !std::isfinite(x[k]))
        throw ParseError("malformed number '" + fields[k] + "'", lineno);
    std::string species = fields[4];
    if (species.rfind("Iris-", 0) == 0) species = species.substr(5);
    int label;
    if (species == "setosa")
      label = 0;
    else if (species == "versicolor")
      label = 1;
    else if (species == "virginica")
      label = 2;
    else
      throw ParseError("unknown species '" + fields[4] + "'", lineno);
    ds.points.push_back(x);
    ds.labels.push_back(label);
  }
  if (ds.points.empty()) throw ParseError("no data rows", lineno);
  return ds;
}

IrisDataset load_iris(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open Iris data file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_iris(ss.str());
}

IrisDataset rescale(const IrisDataset& raw) {
  if (raw.points.empty()) throw std::invalid_argument("rescale: empty dataset");
  std::array<double, 4> lo = raw.points.front(), hi = raw.points.front();
  for (const auto& p : raw.points)
    for (std::size_t a = 0; a < 4; ++a) {
      lo[a] = std::min(lo[a], p[a]);
      hi[a] = std::max(hi[a], p[a]);
    }
  for (std::size_t a = 0; a < 4; ++a)
    if (!(hi[a] > lo[a]))
      throw std::invalid_argument("rescale: attribute " + std::to_string(a) + " is constant");
  IrisDataset out = raw;
  const double scale = std::numbers::pi / 5.0;
  for (auto& p : out.points)
    for (std::size_t a = 0; a < 4; ++a)
      p[a] = scale * (2.0 * p[a] - (lo[a] + hi[a])) / (hi[a] - lo[a]);
  return out;
}

}  // namespace vqsd
