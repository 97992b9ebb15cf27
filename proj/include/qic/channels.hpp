#pragma once

// Qubit channels: Pauli operators, Kraus maps, the depolarizing map and the
// covariant twirl that reduces an arbitrary qubit channel to it.

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qic/core.hpp"

namespace qic {

/// Two-bit Pauli label: (0,0)=I, (0,1)=sigma_1, (1,0)=sigma_2, (1,1)=sigma_3.
struct PauliIndex {
  std::uint8_t x0 = 0;
  std::uint8_t x1 = 0;

  constexpr PauliIndex() = default;
  constexpr PauliIndex(unsigned b0, unsigned b1) : x0(static_cast<std::uint8_t>(b0 & 1u)), x1(static_cast<std::uint8_t>(b1 & 1u)) {}

  static constexpr PauliIndex from_ordinal(unsigned v) { return {(v >> 1) & 1u, v & 1u}; }
  constexpr unsigned ordinal() const { return 2u * x0 + x1; }

  friend constexpr bool operator==(PauliIndex, PauliIndex) = default;
  friend constexpr PauliIndex operator^(PauliIndex a, PauliIndex b) {
    return {static_cast<unsigned>(a.x0 ^ b.x0), static_cast<unsigned>(a.x1 ^ b.x1)};
  }
};

inline constexpr std::array<PauliIndex, 4> kPauliIndices{PauliIndex{0, 0}, PauliIndex{0, 1}, PauliIndex{1, 0},
                                                         PauliIndex{1, 1}};

inline ComplexMatrix pauli(PauliIndex idx) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  switch (idx.ordinal()) {
    case 0: m(0, 0) = 1.0; m(1, 1) = 1.0; break;
    case 1: m(0, 1) = 1.0; m(1, 0) = 1.0; break;
    case 2: m(0, 1) = complex(0, -1); m(1, 0) = complex(0, 1); break;
    case 3: m(0, 0) = 1.0; m(1, 1) = -1.0; break;
  }
  return m;
}

/// Completely positive trace-preserving map given by Kraus operators, each
/// output_dim x input_dim.
class KrausChannel {
 public:
  static constexpr double kTolerance = 1e-9;

  KrausChannel(std::vector<ComplexMatrix> kraus, std::size_t input_dim, std::size_t output_dim)
      : kraus_(std::move(kraus)), in_(input_dim), out_(output_dim) {
    detail::require(!kraus_.empty(), "channel needs at least one Kraus operator");
    const auto di = static_cast<Eigen::Index>(in_);
    ComplexMatrix sum = ComplexMatrix::Zero(di, di);
    for (const auto& k : kraus_) {
      detail::require(k.rows() == static_cast<Eigen::Index>(out_) && k.cols() == di, "Kraus operator shape mismatch");
      sum += k.adjoint() * k;
    }
    detail::require((sum - ComplexMatrix::Identity(di, di)).cwiseAbs().maxCoeff() <= kTolerance,
                    "Kraus operators are not trace preserving");
  }

  static KrausChannel identity(std::size_t dim) {
    const auto d = static_cast<Eigen::Index>(dim);
    return {{ComplexMatrix::Identity(d, d)}, dim, dim};
  }

  static KrausChannel unitary(const ComplexMatrix& u) {
    return {{u}, static_cast<std::size_t>(u.cols()), static_cast<std::size_t>(u.rows())};
  }

  const std::vector<ComplexMatrix>& kraus() const { return kraus_; }
  std::size_t input_dim() const { return in_; }
  std::size_t output_dim() const { return out_; }

 private:
  std::vector<ComplexMatrix> kraus_;
  std::size_t in_;
  std::size_t out_;
};

/// Singlet weight of a depolarizing channel, restricted to [1/4, 1].
class DepolarizingParam {
 public:
  explicit DepolarizingParam(double lambda) : lambda_(lambda) {
    if (!(lambda >= 0.25 - 1e-12 && lambda <= 1.0 + 1e-12))
      throw std::out_of_range("depolarizing parameter must lie in [1/4, 1], got " + std::to_string(lambda));
    lambda_ = std::clamp(lambda, 0.25, 1.0);
  }
  double value() const { return lambda_; }

 private:
  double lambda_;
};

/// Kraus set {sqrt(l) I, sqrt((1-l)/3) sigma_i}. On one half of a singlet this
/// yields singlet_mixture(l).
inline KrausChannel depolarizing(DepolarizingParam lambda) {
  const double l = lambda.value();
  std::vector<ComplexMatrix> k;
  k.push_back(std::sqrt(l) * pauli({0, 0}));
  for (unsigned i = 1; i < 4; ++i) k.push_back(std::sqrt((1.0 - l) / 3.0) * pauli(PauliIndex::from_ordinal(i)));
  return {std::move(k), 2, 2};
}

/// sum_i K_i rho K_i^dagger with K_i acting on subsystem `target`.
inline DensityOperator apply_channel(const KrausChannel& ch, const DensityOperator& rho, std::size_t target) {
  if (target >= rho.subsystems()) throw std::out_of_range("channel target out of range");
  if (rho.dims()[target] != ch.input_dim()) throw std::invalid_argument("channel input dimension mismatch");
  const std::array<std::size_t, 1> t{target};
  ComplexMatrix acc;
  Dims out_dims;
  for (const auto& k : ch.kraus()) {
    auto [full, dims] = lift(k, rho.dims(), t);
    ComplexMatrix term = full * rho.matrix() * full.adjoint();
    if (acc.size() == 0) {
      acc = std::move(term);
      out_dims = std::move(dims);
    } else {
      acc += term;
    }
  }
  return DensityOperator::unchecked(std::move(acc), std::move(out_dims));
}

/// Random CPTP map: a Haar isometry into system (x) environment followed by
/// tracing out the environment. Requires output_dim * env_dim >= input_dim.
inline KrausChannel random_channel(std::size_t input_dim, std::size_t output_dim, std::size_t env_dim,
                                   RngStream& rng) {
  detail::require(output_dim * env_dim >= input_dim, "environment too small for an isometry");
  const ComplexMatrix u = haar_random_unitary(output_dim * env_dim, rng);
  std::vector<ComplexMatrix> kraus;
  for (std::size_t e = 0; e < env_dim; ++e) {
    ComplexMatrix k(static_cast<Eigen::Index>(output_dim), static_cast<Eigen::Index>(input_dim));
    for (std::size_t o = 0; o < output_dim; ++o)
      for (std::size_t i = 0; i < input_dim; ++i)
        k(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(i)) =
            u(static_cast<Eigen::Index>(o * env_dim + e), static_cast<Eigen::Index>(i));
    kraus.push_back(std::move(k));
  }
  return {std::move(kraus), input_dim, output_dim};
}

/// The 24 single-qubit Clifford unitaries modulo global phase: the rotation
/// group of the octahedron. A unitary 2-design (in fact a 3-design).
inline const std::vector<ComplexMatrix>& clifford_group() {
  static const std::vector<ComplexMatrix> group = [] {
    const ComplexMatrix I = pauli({0, 0}), X = pauli({0, 1}), Y = pauli({1, 0}), Z = pauli({1, 1});
    const std::array<ComplexMatrix, 3> s{X, Y, Z};
    const complex i(0, 1);
    const double r2 = 1.0 / std::sqrt(2.0);
    std::vector<ComplexMatrix> g;
    g.push_back(I);
    for (const auto& p : s) g.push_back(p);  // pi about the axes
    for (const auto& p : s) {                // pi/2 about the axes
      g.push_back(r2 * (I + i * p));
      g.push_back(r2 * (I - i * p));
    }
    for (std::size_t a = 0; a < 3; ++a)  // pi about the edge diagonals
      for (std::size_t b = a + 1; b < 3; ++b) {
        g.push_back(r2 * (s[a] + s[b]));
        g.push_back(r2 * (s[a] - s[b]));
      }
    for (int sx : {1, -1})  // 2pi/3 about the body diagonals
      for (int sy : {1, -1})
        for (int sz : {1, -1})
          g.push_back(0.5 * (I + i * (double(sx) * X + double(sy) * Y + double(sz) * Z)));
    return g;
  }();
  return group;
}

/// <Psi-| (I (x) ch)(Psi-) |Psi->.
inline double singlet_fidelity(const KrausChannel& ch) {
  detail::require(ch.input_dim() == 2 && ch.output_dim() == 2, "singlet fidelity needs a qubit channel");
  return pure_fidelity(apply_channel(ch, singlet().projector(), 1), singlet());
}

/// Clifford-averaged channel phi -> 1/24 sum_U U^dagger ch(U phi U^dagger) U,
/// which equals the Haar average over SU(2).
inline KrausChannel covariant_twirl(const KrausChannel& ch) {
  detail::require(ch.input_dim() == 2 && ch.output_dim() == 2, "twirl needs a qubit-to-qubit channel");
  const auto& group = clifford_group();
  const double w = 1.0 / std::sqrt(static_cast<double>(group.size()));
  std::vector<ComplexMatrix> kraus;
  kraus.reserve(group.size() * ch.kraus().size());
  for (const auto& u : group)
    for (const auto& k : ch.kraus()) kraus.push_back(w * u.adjoint() * k * u);
  return {std::move(kraus), 2, 2};
}

/// Singlet weight of the twirled channel before restriction to [1/4, 1].
/// Lies in [0, 1]; values below 1/4 belong to Bloch-inverting channels.
inline double covariant_parameter(const KrausChannel& ch) { return singlet_fidelity(covariant_twirl(ch)); }

/// Depolarizing parameter of the covariant reduction of `ch`. A channel whose
/// twirl has singlet weight below 1/4 is dominated by the constant channel
/// (weight exactly 1/4), so the result is restricted to [1/4, 1].
inline DepolarizingParam twirl(const KrausChannel& ch) {
  return DepolarizingParam(std::clamp(covariant_parameter(ch), 0.25, 1.0));
}

/// Six-point spherical design {+-x, +-y, +-z}; averages every polynomial of
/// degree <= 3 on the sphere exactly.
inline const std::array<BlochVector, 6>& octahedral_design() {
  static const std::array<BlochVector, 6> pts{BlochVector{1, 0, 0},  BlochVector{-1, 0, 0}, BlochVector{0, 1, 0},
                                              BlochVector{0, -1, 0}, BlochVector{0, 0, 1},  BlochVector{0, 0, -1}};
  return pts;
}

/// |Psi+_r> = (|up_r down_r> + |down_r up_r>)/sqrt(2).
inline PureState psi_plus_along(const BlochVector& r) {
  const auto up = bloch_to_state(r), down = bloch_to_state(-r);
  ComplexVector v = (Eigen::kroneckerProduct(up.amplitudes(), down.amplitudes()) +
                     Eigen::kroneckerProduct(down.amplitudes(), up.amplitudes()))
                        .eval() /
                    std::sqrt(2.0);
  return PureState::normalized(std::move(v), {2, 2});
}

/// Bloch-sphere average of |Psi+_r><Psi+_r|, exact via the octahedral design.
inline DensityOperator haar_average_psi_plus() {
  ComplexMatrix acc = ComplexMatrix::Zero(4, 4);
  for (const auto& r : octahedral_design()) acc += psi_plus_along(r).projector().matrix();
  acc /= static_cast<double>(octahedral_design().size());
  return DensityOperator::unchecked(std::move(acc), {2, 2});
}

}  // namespace qic
