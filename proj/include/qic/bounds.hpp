#pragma once

// Closed-form success probabilities and the entropic upper bound P' for the
// QIC game, plus Q' for nonlocal IC-2 strategies.

#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "qic/entropy.hpp"

namespace qic::bounds {

struct BoundQuery {
  std::size_t m = 0;
  std::size_t n = 1;

  void validate() const {
    if (n < 1) throw std::invalid_argument("n must be at least 1");
    if (m > n) throw std::invalid_argument("m must not exceed n");
  }
};

struct BoundResult {
  double p_naive = 0.0;
  double p_teleport = 0.0;
  double p_prime = 0.0;
  double q_prime = 0.0;
};

/// Naive strategy: forward m of the n qubits untouched.
inline double naive_p(std::size_t m, std::size_t n) {
  BoundQuery{m, n}.validate();
  return (1.0 + 3.0 * static_cast<double>(m) / static_cast<double>(n)) / 4.0;
}

/// Teleportation strategy with paired entanglement-assisted random access codes.
inline double teleport_p(std::size_t n) {
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  const double q = (1.0 + 1.0 / std::sqrt(static_cast<double>(n))) / 2.0;
  return q * q;
}

inline double q_prime(std::size_t n) {
  if (n < 1) throw std::invalid_argument("n must be at least 1");
  return (1.0 + 3.0 / std::sqrt(static_cast<double>(n))) / 4.0;
}

/// p = (1 + 2P)/3, the version-II success probability of a strategy with
/// version-I success probability P.
inline double version_convert(double P) {
  if (!(P >= 0.0 && P <= 1.0)) throw std::domain_error("P outside [0, 1]");
  return (1.0 + 2.0 * P) / 3.0;
}

struct SolverOptions {
  double tolerance = 1e-12;
  int max_iterations = 200;
};

/// Largest P in [1/4, 1] with omega_entropy(P) = rhs. The left side falls
/// strictly from 2 to 0 on that interval, so bisection applies; rhs outside
/// [0, 2] saturates at the interval ends.
inline double solve_omega_entropy(double rhs, SolverOptions opt = {}) {
  if (rhs >= 2.0) return 0.25;
  if (rhs <= 0.0) return 1.0;
  double lo = 0.25, hi = 1.0;
  for (int it = 0; it < opt.max_iterations && hi - lo > opt.tolerance; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (omega_entropy(mid) > rhs)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

/// Right side 2(1 - m/n) with m/n reduced first, so (1,4) and (25,100) agree
/// to the bit.
inline double p_prime_rhs(std::size_t m, std::size_t n) {
  BoundQuery{m, n}.validate();
  const std::size_t g = std::gcd(m, n);
  const std::size_t mr = m / (g == 0 ? 1 : g), nr = n / (g == 0 ? 1 : g);
  return 2.0 * static_cast<double>(nr - mr) / static_cast<double>(nr);
}

/// Upper bound P' on the QIC success probability for an m-qubit message.
inline double solve_p_prime(std::size_t m, std::size_t n, SolverOptions opt = {}) {
  return solve_omega_entropy(p_prime_rhs(m, n), opt);
}

inline BoundResult evaluate(std::size_t m, std::size_t n) {
  return {naive_p(m, n), teleport_p(n), solve_p_prime(m, n), q_prime(n)};
}

struct ComparisonRow {
  std::size_t n = 0;
  double p_prime = 0.0;
  double q_prime = 0.0;
  bool p_below_q = false;
};

/// P'(m, n) against Q'(n) for each n. Requires ascending n.
inline std::vector<ComparisonRow> pprime_vs_qprime_scan(std::size_t m, const std::vector<std::size_t>& n_range) {
  std::vector<ComparisonRow> rows;
  rows.reserve(n_range.size());
  for (std::size_t i = 0; i < n_range.size(); ++i) {
    if (i > 0 && n_range[i] <= n_range[i - 1]) throw std::invalid_argument("n range must be ascending");
    const std::size_t n = n_range[i];
    const double pp = solve_p_prime(m, n), qp = q_prime(n);
    rows.push_back({n, pp, qp, pp < qp});
  }
  return rows;
}

}  // namespace qic::bounds
