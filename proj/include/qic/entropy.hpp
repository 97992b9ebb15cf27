#pragma once

// Von Neumann entropy, binary entropy and quantum mutual information, in bits.

#include <cmath>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qic/core.hpp"

namespace qic {

/// -sum_i l_i log2 l_i over a spectrum, with 0 log 0 = 0 and eigenvalues in
/// [-kPsdTolerance, 0) clamped to zero.
inline double entropy_of_spectrum(std::span<const double> eigenvalues) {
  double s = 0.0;
  for (double l : eigenvalues) {
    if (l < -kPsdTolerance) throw std::invalid_argument("spectrum has a negative eigenvalue");
    if (l > 0.0) s -= l * std::log2(l);
  }
  return std::max(s, 0.0);
}

inline double von_neumann_entropy(const DensityOperator& rho) {
  if (rho.dim() == 1) return 0.0;
  const auto ev = hermitian_eigenvalues(rho.matrix());
  return entropy_of_spectrum(ev);
}

inline double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("binary entropy argument outside [0, 1]");
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

/// Entropy of the Bell-diagonal state with singlet weight P and the other
/// three weights (1 - P)/3.
inline double omega_entropy(double P) {
  if (!(P >= 0.0 && P <= 1.0)) throw std::domain_error("singlet weight outside [0, 1]");
  return binary_entropy(P) + (1.0 - P) * std::log2(3.0);
}

/// S of the marginal on `subsystems`.
inline double marginal_entropy(const DensityOperator& rho, std::span<const std::size_t> subsystems) {
  return von_neumann_entropy(partial_trace(rho, subsystems));
}

inline double marginal_entropy(const DensityOperator& rho, std::initializer_list<std::size_t> subsystems) {
  return marginal_entropy(rho, std::span<const std::size_t>(subsystems.begin(), subsystems.size()));
}

/// I(left : right) = S(left) + S(right) - S(left right) for two disjoint,
/// non-empty groups of subsystems. Anything outside both groups is traced out.
inline double mutual_information(const DensityOperator& rho, std::span<const std::size_t> left,
                                 std::span<const std::size_t> right) {
  if (left.empty() || right.empty()) throw std::invalid_argument("mutual information needs two non-empty groups");
  std::vector<std::size_t> both(left.begin(), left.end());
  both.insert(both.end(), right.begin(), right.end());
  detail::check_subsystems(both, rho.subsystems());
  return marginal_entropy(rho, left) + marginal_entropy(rho, right) - marginal_entropy(rho, both);
}

inline double mutual_information(const DensityOperator& rho, std::initializer_list<std::size_t> left,
                                 std::initializer_list<std::size_t> right) {
  return mutual_information(rho, std::span<const std::size_t>(left.begin(), left.size()),
                            std::span<const std::size_t>(right.begin(), right.size()));
}

/// Mutual information across the contiguous cut [0, split) | [split, n).
inline double mutual_information(const DensityOperator& rho, std::size_t split) {
  const std::size_t n = rho.subsystems();
  if (split == 0 || split >= n) throw std::invalid_argument("cut must leave both sides non-empty");
  std::vector<std::size_t> left(split), right(n - split);
  std::iota(left.begin(), left.end(), std::size_t{0});
  std::iota(right.begin(), right.end(), split);
  return mutual_information(rho, left, right);
}

struct EntropyReport {
  std::string quantity;
  double value = 0.0;
  Dims inputs;
};

inline EntropyReport report_entropy(const DensityOperator& rho) {
  return {"S", von_neumann_entropy(rho), rho.dims()};
}

inline EntropyReport report_mutual_information(const DensityOperator& rho, std::size_t split) {
  return {"I", mutual_information(rho, split), rho.dims()};
}

}  // namespace qic
