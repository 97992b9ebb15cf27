#pragma once

// Reference computations for the tests. Each one takes a different route from
// the library: hand-written matrices, explicit index loops, closed forms or
// plain Monte-Carlo sampling. None calls into qic beyond RngStream.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "qic/rng.hpp"

namespace oracle {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline Mat sx() { Mat m(2, 2); m << 0, 1, 1, 0; return m; }
inline Mat sy() { Mat m(2, 2); m << 0, cd(0, -1), cd(0, 1), 0; return m; }
inline Mat sz() { Mat m(2, 2); m << 1, 0, 0, -1; return m; }
inline Mat id2() { return Mat::Identity(2, 2); }

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Vec singlet_vec() {
  Vec v = Vec::Zero(4);
  v(1) = 1.0 / std::sqrt(2.0);
  v(2) = -1.0 / std::sqrt(2.0);
  return v;
}

/// Projector (I + s r.sigma)/2 for s = +1 or -1.
inline Mat spin_projector(const std::array<double, 3>& r, int s) {
  return 0.5 * (id2() + double(s) * (r[0] * sx() + r[1] * sy() + r[2] * sz()));
}

/// Trace over subsystem 1 of a two-part matrix with dims (da, db), written as
/// a sum over block diagonals.
inline Mat trace_second(const Mat& m, Eigen::Index da, Eigen::Index db) {
  Mat out = Mat::Zero(da, da);
  for (Eigen::Index i = 0; i < da; ++i)
    for (Eigen::Index j = 0; j < da; ++j) out(i, j) = m.block(i * db, j * db, db, db).trace();
  return out;
}

inline Mat trace_first(const Mat& m, Eigen::Index da, Eigen::Index db) {
  Mat out = Mat::Zero(db, db);
  for (Eigen::Index k = 0; k < da; ++k) out += m.block(k * db, k * db, db, db);
  return out;
}

inline double entropy_bits(const Mat& rho) {
  Eigen::SelfAdjointEigenSolver<Mat> es(rho);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double l = es.eigenvalues()(i);
    if (l > 1e-15) s -= l * std::log(l) / std::log(2.0);
  }
  return s;
}

/// Per-bit success of the singlet EARAC from the closed form for outcome
/// statistics on a singlet, P(a = b) = (1 - u.v)/2, and decoding y = a^b^1.
inline double earac_q_closed_form(int n) {
  double acc = 0.0;
  const int inputs = 1 << n;
  for (int x = 0; x < inputs; ++x)
    for (int k = 0; k < n; ++k) {
      double dot = ((x >> k) & 1) ? -1.0 : 1.0;
      dot /= std::sqrt(double(n));
      const double p_equal = 0.5 * (1.0 - dot);
      // y = a ^ b ^ 1 equals x_k when a == b iff x_k == 1
      acc += ((x >> k) & 1) ? p_equal : 1.0 - p_equal;
    }
  return acc / double(inputs * n);
}

/// Same quantity by sampling outcomes with explicit projectors on |Psi->.
inline double earac_q_sampled(int n, std::size_t trials, std::uint64_t seed) {
  qic::RngStream rng(seed);
  const std::array<std::array<double, 3>, 3> e{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  const Vec psi = singlet_vec();
  std::size_t wins = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const int x = static_cast<int>(rng.below(std::size_t{1} << n));
    const int k = static_cast<int>(rng.below(static_cast<std::size_t>(n)));
    std::array<double, 3> a{0, 0, 0};
    for (int i = 0; i < n; ++i)
      for (int c = 0; c < 3; ++c) a[c] += (((x >> i) & 1) ? -1.0 : 1.0) * e[i][c] / std::sqrt(double(n));
    double u = rng.uniform(), acc = 0.0;
    int oa = 1, ob = 1;
    for (int sa = 0; sa < 2 && u >= acc; ++sa)
      for (int sb = 0; sb < 2; ++sb) {
        const Mat p = kron(spin_projector(a, sa ? -1 : 1), spin_projector(e[k], sb ? -1 : 1));
        acc += std::real(psi.dot(p * psi));
        if (u < acc) {
          oa = sa;
          ob = sb;
          break;
        }
      }
    if (((oa ^ ob ^ 1) & 1) == ((x >> k) & 1)) ++wins;
  }
  return double(wins) / double(trials);
}

/// Haar-random 2x2 unitary from a random unit quaternion.
inline Mat haar_su2(qic::RngStream& rng) {
  double q[4];
  double nrm = 0.0;
  for (double& v : q) {
    v = rng.normal();
    nrm += v * v;
  }
  nrm = std::sqrt(nrm);
  for (double& v : q) v /= nrm;
  return q[0] * id2() + cd(0, 1) * (q[1] * sx() + q[2] * sy() + q[3] * sz());
}

/// Monte-Carlo twirl: average over Haar U of (I (x) U^dag K U) applied to
/// the singlet, returned as the 4x4 output state.
inline Mat twirl_singlet_output_mc(const std::vector<Mat>& kraus, std::size_t samples, std::uint64_t seed) {
  qic::RngStream rng(seed);
  const Vec psi = singlet_vec();
  const Mat in = psi * psi.adjoint();
  Mat acc = Mat::Zero(4, 4);
  for (std::size_t s = 0; s < samples; ++s) {
    const Mat u = haar_su2(rng);
    for (const auto& k : kraus) {
      const Mat big = kron(id2(), u.adjoint() * k * u);
      acc += big * in * big.adjoint();
    }
  }
  return acc / double(samples);
}

/// Monte-Carlo average of |Psi+_r><Psi+_r| over uniform Bloch vectors r.
inline Mat psi_plus_average_mc(std::size_t samples, std::uint64_t seed) {
  qic::RngStream rng(seed);
  Mat acc = Mat::Zero(4, 4);
  for (std::size_t s = 0; s < samples; ++s) {
    const Mat u = haar_su2(rng);
    // |up_r> = U|0>, |down_r> = U|1> for a Haar U gives uniform r
    const Vec up = u.col(0), down = u.col(1);
    Vec v = (kron(up, down) + kron(down, up)) / std::sqrt(2.0);
    acc += v * v.adjoint();
  }
  return acc / double(samples);
}

/// Largest root of h(P) + (1-P) log2 3 = rhs on [1/4, 1] by Newton's method
/// from the upper end, with the derivative log2((1-P)/(3P)).
inline double p_prime_newton(double rhs) {
  if (rhs <= 0.0) return 1.0;
  if (rhs >= 2.0) return 0.25;
  auto f = [rhs](double P) {
    const double h = -P * std::log2(P) - (1 - P) * std::log2(1 - P);
    return h + (1 - P) * std::log2(3.0) - rhs;
  };
  double P = 0.999999;
  for (int it = 0; it < 200; ++it) {
    const double d = std::log2((1 - P) / (3 * P));
    double next = P - f(P) / d;
    next = std::min(std::max(next, 0.25), 1.0 - 1e-15);
    if (std::abs(next - P) < 1e-15) break;
    P = next;
  }
  return P;
}

}  // namespace oracle
