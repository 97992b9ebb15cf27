#pragma once

// Bell measurement, single-qubit basis measurement, teleportation over a
// singlet and superdense coding over |Phi+>. Every sampling operation has a
// deterministic sibling that returns all branches.

#include <array>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qic/channels.hpp"
#include "qic/core.hpp"

namespace qic {

/// Branches with probability at or below this carry no post-measurement state.
inline constexpr double kNegligibleProbability = 1e-12;

struct MeasurementRecord {
  std::size_t outcome = 0;  // BellIndex ordinal, or 0 = |up_r>, 1 = |down_r>
  double probability = 0.0;
  DensityOperator post_state;

  BellIndex bell() const { return static_cast<BellIndex>(outcome); }
};

namespace detail {

inline void require_qubit(const DensityOperator& rho, std::size_t idx) {
  if (idx >= rho.subsystems()) throw std::out_of_range("subsystem index out of range");
  if (rho.dims()[idx] != 2) throw std::invalid_argument("measured subsystem is not a qubit");
}

inline std::size_t sample_index(std::span<const double> probs, RngStream& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    acc += probs[i];
    last = i;
    if (u < acc) return i;
  }
  return last;
}

/// P rho P / p for a projector on `targets`.
inline DensityOperator project(const DensityOperator& rho, const ComplexMatrix& proj,
                               std::span<const std::size_t> targets, double p) {
  auto [full, dims] = lift(proj, rho.dims(), targets);
  ComplexMatrix m = full * rho.matrix() * full.adjoint() / p;
  m = 0.5 * (m + m.adjoint()).eval();
  return DensityOperator::unchecked(std::move(m), std::move(dims));
}

}  // namespace detail

/// Reduced state of subsystems (a, b) in that order.
inline DensityOperator pair_state(const DensityOperator& rho, std::size_t a, std::size_t b) {
  const std::array<std::size_t, 2> keep{a, b};
  auto red = partial_trace(rho, keep);
  return a < b ? red : permute(red, {1, 0});
}

/// Born probabilities of the four Bell outcomes on qubits (a, b), indexed by
/// BellIndex ordinal.
inline std::array<double, 4> bell_probabilities(const DensityOperator& rho, std::size_t a, std::size_t b) {
  detail::require_qubit(rho, a);
  detail::require_qubit(rho, b);
  const auto pair = pair_state(rho, a, b);
  std::array<double, 4> p{};
  for (auto bi : kBellIndices) p[static_cast<std::size_t>(bi)] = pure_fidelity(pair, bell_state(bi));
  return p;
}

/// All Bell outcomes with non-negligible probability and their post-states.
inline std::vector<MeasurementRecord> bell_outcomes(const DensityOperator& rho, std::size_t a, std::size_t b) {
  const auto p = bell_probabilities(rho, a, b);
  const std::array<std::size_t, 2> targets{a, b};
  std::vector<MeasurementRecord> out;
  for (auto bi : kBellIndices) {
    const double pb = p[static_cast<std::size_t>(bi)];
    if (pb <= kNegligibleProbability) continue;
    const auto proj = bell_state(bi).projector().matrix();
    out.push_back({static_cast<std::size_t>(bi), pb, detail::project(rho, proj, targets, pb)});
  }
  return out;
}

inline MeasurementRecord bell_measure(const DensityOperator& rho, std::size_t a, std::size_t b, RngStream& rng) {
  const auto p = bell_probabilities(rho, a, b);
  const auto bi = detail::sample_index(p, rng);
  const std::array<std::size_t, 2> targets{a, b};
  const auto proj = bell_state(static_cast<BellIndex>(bi)).projector().matrix();
  return {bi, p[bi], detail::project(rho, proj, targets, p[bi])};
}

/// Probabilities of |up_r> (index 0) and |down_r> (index 1) on `target`.
inline std::array<double, 2> basis_probabilities(const DensityOperator& rho, std::size_t target,
                                                 const BlochVector& r) {
  detail::require_qubit(rho, target);
  const std::array<std::size_t, 1> keep{target};
  const auto red = partial_trace(rho, keep);
  const double up = pure_fidelity(red, bloch_to_state(r));
  return {up, std::max(0.0, 1.0 - up)};
}

inline std::vector<MeasurementRecord> basis_outcomes(const DensityOperator& rho, std::size_t target,
                                                     const BlochVector& r) {
  const auto p = basis_probabilities(rho, target, r);
  const std::array<PureState, 2> basis{bloch_to_state(r), bloch_to_state(-r)};
  const std::array<std::size_t, 1> targets{target};
  std::vector<MeasurementRecord> out;
  for (std::size_t i = 0; i < 2; ++i) {
    if (p[i] <= kNegligibleProbability) continue;
    out.push_back({i, p[i], detail::project(rho, basis[i].projector().matrix(), targets, p[i])});
  }
  return out;
}

inline MeasurementRecord basis_measure(const DensityOperator& rho, std::size_t target, const BlochVector& r,
                                       RngStream& rng) {
  const auto p = basis_probabilities(rho, target, r);
  const auto i = detail::sample_index(p, rng);
  const PureState v = i == 0 ? bloch_to_state(r) : bloch_to_state(-r);
  const std::array<std::size_t, 1> targets{target};
  return {i, p[i], detail::project(rho, v.projector().matrix(), targets, p[i])};
}

/// Pauli label x with bell_state(b) = (I (x) sigma_x)|Psi-> up to phase.
///
/// Teleporting over a singlet, Alice's Bell outcome b on (source, her half)
/// leaves Bob's qubit holding sigma_x |input> up to phase, so sigma_x is both
/// the Pauli error and its correction; the frame unitary for the singlet
/// resource is the identity. Table, confirmed by enumerating the outcomes:
///
///   Psi-  -> (0,0)   Phi-  -> (0,1)   Phi+  -> (1,0)   Psi+  -> (1,1)
inline constexpr PauliIndex pauli_for_bell(BellIndex b) {
  switch (b) {
    case BellIndex::PsiMinus: return {0, 0};
    case BellIndex::PhiMinus: return {0, 1};
    case BellIndex::PhiPlus: return {1, 0};
    case BellIndex::PsiPlus: return {1, 1};
  }
  return {};
}

inline constexpr BellIndex bell_for_pauli(PauliIndex x) {
  for (auto b : kBellIndices)
    if (pauli_for_bell(b) == x) return b;
  return BellIndex::PsiMinus;
}

inline DensityOperator apply_pauli(const DensityOperator& rho, std::size_t target, PauliIndex x) {
  if (x == PauliIndex{0, 0}) return rho;
  return apply_unitary(rho, pauli(x), {target});
}

struct TeleportBranch {
  PauliIndex correction;
  double probability = 0.0;
  DensityOperator state;  // global post-measurement state, before correction
};

namespace detail {

inline void require_singlet_pair(const DensityOperator& rho, std::size_t a, std::size_t b) {
  require_qubit(rho, a);
  require_qubit(rho, b);
  if (pure_fidelity(pair_state(rho, a, b), singlet()) < 1.0 - 1e-9)
    throw std::invalid_argument("teleportation resource is not a singlet");
}

}  // namespace detail

/// Every branch of Alice's Bell measurement on (source, shared.first), with
/// the singlet resource on `shared`.
inline std::vector<TeleportBranch> teleport_branches(const DensityOperator& state, std::size_t source,
                                                     std::pair<std::size_t, std::size_t> shared) {
  detail::require_singlet_pair(state, shared.first, shared.second);
  std::vector<TeleportBranch> out;
  for (auto& rec : bell_outcomes(state, source, shared.first))
    out.push_back({pauli_for_bell(rec.bell()), rec.probability, std::move(rec.post_state)});
  return out;
}

/// Samples Alice's Bell outcome. Applying pauli(x) to shared.second of the
/// returned state recovers the source state there.
inline std::pair<PauliIndex, DensityOperator> teleport(const DensityOperator& state, std::size_t source,
                                                       std::pair<std::size_t, std::size_t> shared, RngStream& rng) {
  detail::require_singlet_pair(state, shared.first, shared.second);
  auto rec = bell_measure(state, source, shared.first, rng);
  return {pauli_for_bell(rec.bell()), std::move(rec.post_state)};
}

/// Bell state produced by sigma_bits on the first half of |Phi+>:
/// (0,0) Phi+, (0,1) Psi+, (1,0) Psi-, (1,1) Phi-.
inline constexpr BellIndex superdense_codeword(PauliIndex bits) {
  constexpr std::array<BellIndex, 4> table{BellIndex::PhiPlus, BellIndex::PsiPlus, BellIndex::PsiMinus,
                                           BellIndex::PhiMinus};
  return table[bits.ordinal()];
}

inline DensityOperator superdense_encode(PauliIndex bits,
                                         const DensityOperator& shared_pair = bell_state(BellIndex::PhiPlus).projector()) {
  if (shared_pair.dims() != Dims{2, 2}) throw std::invalid_argument("superdense coding needs a qubit pair");
  if (pure_fidelity(shared_pair, bell_state(BellIndex::PhiPlus)) < 1.0 - 1e-9)
    throw std::invalid_argument("superdense coding resource is not |Phi+>");
  return apply_pauli(shared_pair, 0, bits);
}

/// Bell-measures the pair; empty when it is not (within 1e-9) a codeword.
inline std::optional<PauliIndex> superdense_decode(const DensityOperator& rho) {
  if (rho.dims() != Dims{2, 2}) throw std::invalid_argument("superdense decoding needs a qubit pair");
  const auto p = bell_probabilities(rho, 0, 1);
  for (auto bits : kPauliIndices)
    if (p[static_cast<std::size_t>(superdense_codeword(bits))] >= 1.0 - 1e-9) return bits;
  return std::nullopt;
}

}  // namespace qic
