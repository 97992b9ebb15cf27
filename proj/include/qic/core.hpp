#pragma once

// Dense linear algebra for few-qubit systems: pure states, density operators,
// tensor products, partial traces, Hermitian spectra and Haar sampling.
//
// Subsystem 0 is the leftmost tensor factor, so it carries the most
// significant digit of a flat basis index.

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qic/rng.hpp"

namespace qic {

using complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Dims = std::vector<std::size_t>;

inline constexpr double kStateTolerance = 1e-10;
/// Eigenvalues in [-kPsdTolerance, 0) are treated as numerical noise and clamped.
inline constexpr double kPsdTolerance = 1e-9;

namespace detail {

inline std::size_t product(std::span<const std::size_t> dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>{});
}

inline void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

inline std::vector<std::size_t> strides(std::span<const std::size_t> dims) {
  std::vector<std::size_t> s(dims.size(), 1);
  for (std::size_t i = dims.size(); i-- > 1;) s[i - 1] = s[i] * dims[i];
  return s;
}

/// For every joint index over `subsystems` (row-major in the listed order),
/// its contribution to the flat index over `dims`.
inline std::vector<std::size_t> offsets(std::span<const std::size_t> dims,
                                        std::span<const std::size_t> subsystems) {
  const auto st = strides(dims);
  std::size_t count = 1;
  for (auto s : subsystems) count *= dims[s];
  std::vector<std::size_t> out(count, 0);
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t rest = i, off = 0;
    for (std::size_t j = subsystems.size(); j-- > 0;) {
      const auto s = subsystems[j];
      off += (rest % dims[s]) * st[s];
      rest /= dims[s];
    }
    out[i] = off;
  }
  return out;
}

inline std::vector<std::size_t> complement(std::size_t n, std::span<const std::size_t> picked) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n; ++i)
    if (std::find(picked.begin(), picked.end(), i) == picked.end()) out.push_back(i);
  return out;
}

inline void check_subsystems(std::span<const std::size_t> idx, std::size_t n) {
  for (std::size_t a = 0; a < idx.size(); ++a) {
    if (idx[a] >= n) throw std::out_of_range("subsystem index " + std::to_string(idx[a]) + " out of range");
    for (std::size_t b = a + 1; b < idx.size(); ++b)
      require(idx[a] != idx[b], "duplicate subsystem index");
  }
}

inline bool is_hermitian(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace detail

class DensityOperator;

/// Normalized state vector over a list of subsystem dimensions.
class PureState {
 public:
  PureState(ComplexVector amplitudes, Dims dims) : amps_(std::move(amplitudes)), dims_(std::move(dims)) {
    detail::require(!dims_.empty(), "pure state needs at least one subsystem");
    detail::require(detail::product(dims_) == static_cast<std::size_t>(amps_.size()),
                    "product of dims must equal the amplitude count");
    detail::require(amps_.allFinite(), "non-finite amplitude");
    detail::require(std::abs(amps_.norm() - 1.0) <= kStateTolerance, "pure state is not normalized");
  }

  /// Computational basis vector |index> over `dims`.
  static PureState basis(Dims dims, std::size_t index) {
    ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(detail::product(dims)));
    if (index >= static_cast<std::size_t>(v.size())) throw std::out_of_range("basis index out of range");
    v(static_cast<Eigen::Index>(index)) = 1.0;
    return {std::move(v), std::move(dims)};
  }

  /// Rescales `v` to unit norm; throws on a zero vector.
  static PureState normalized(ComplexVector v, Dims dims) {
    const double nrm = v.norm();
    detail::require(nrm > 0.0, "cannot normalize the zero vector");
    v /= nrm;
    return {std::move(v), std::move(dims)};
  }

  const ComplexVector& amplitudes() const { return amps_; }
  const Dims& dims() const { return dims_; }
  std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
  std::size_t subsystems() const { return dims_.size(); }

  DensityOperator projector() const;

 private:
  ComplexVector amps_;
  Dims dims_;
};

/// Hermitian, unit-trace, positive semidefinite matrix with subsystem dims.
class DensityOperator {
 public:
  /// Validates every invariant, including positivity through a full spectrum.
  DensityOperator(ComplexMatrix matrix, Dims dims) : m_(std::move(matrix)), dims_(std::move(dims)) {
    check_shape();
    detail::require(detail::is_hermitian(m_, kStateTolerance), "density operator is not Hermitian");
    detail::require(std::abs(m_.trace().real() - 1.0) <= kStateTolerance, "density operator trace is not 1");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m_, Eigen::EigenvaluesOnly);
    detail::require(es.eigenvalues().minCoeff() >= -kPsdTolerance, "density operator has a negative eigenvalue");
  }

  /// Skips the spectral check. For results of operations that preserve the
  /// invariants (tensor, partial trace, CPTP maps, normalized projections).
  static DensityOperator unchecked(ComplexMatrix matrix, Dims dims) {
    return DensityOperator(std::move(matrix), std::move(dims), Unchecked{});
  }

  static DensityOperator maximally_mixed(Dims dims) {
    const auto d = static_cast<Eigen::Index>(detail::product(dims));
    return unchecked(ComplexMatrix::Identity(d, d) / static_cast<double>(d), std::move(dims));
  }

  const ComplexMatrix& matrix() const { return m_; }
  const Dims& dims() const { return dims_; }
  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  std::size_t subsystems() const { return dims_.size(); }

  /// Same matrix with a coarser or finer factorization of the same space.
  DensityOperator with_dims(Dims dims) const {
    detail::require(detail::product(dims) == dim(), "regrouped dims must keep the total dimension");
    return unchecked(m_, std::move(dims));
  }

 private:
  struct Unchecked {};
  DensityOperator(ComplexMatrix matrix, Dims dims, Unchecked) : m_(std::move(matrix)), dims_(std::move(dims)) {
    check_shape();
  }

  void check_shape() const {
    detail::require(!dims_.empty(), "density operator needs at least one subsystem");
    detail::require(m_.rows() == m_.cols(), "density operator must be square");
    detail::require(detail::product(dims_) == static_cast<std::size_t>(m_.rows()),
                    "product of dims must equal the matrix size");
    detail::require(m_.allFinite(), "non-finite matrix entry");
  }

  ComplexMatrix m_;
  Dims dims_;
};

inline DensityOperator PureState::projector() const {
  return DensityOperator::unchecked(amps_ * amps_.adjoint(), dims_);
}

/// Unit vector on the Bloch sphere.
class BlochVector {
 public:
  BlochVector(double x, double y, double z) : x_(x), y_(y), z_(z) {
    detail::require(std::abs(std::sqrt(x * x + y * y + z * z) - 1.0) <= kStateTolerance,
                    "Bloch vector must have unit norm");
  }

  static BlochVector random(RngStream& rng) {
    for (;;) {
      const double x = rng.normal(), y = rng.normal(), z = rng.normal();
      const double r = std::sqrt(x * x + y * y + z * z);
      if (r > 1e-12) return {x / r, y / r, z / r};
    }
  }

  double x() const { return x_; }
  double y() const { return y_; }
  double z() const { return z_; }
  BlochVector operator-() const { return {-x_, -y_, -z_}; }

 private:
  double x_, y_, z_;
};

/// Bell basis with fixed ordinals.
enum class BellIndex : std::uint8_t { PsiMinus = 0, PsiPlus = 1, PhiPlus = 2, PhiMinus = 3 };

inline constexpr std::array<BellIndex, 4> kBellIndices{BellIndex::PsiMinus, BellIndex::PsiPlus,
                                                       BellIndex::PhiPlus, BellIndex::PhiMinus};

inline const char* to_string(BellIndex b) {
  switch (b) {
    case BellIndex::PsiMinus: return "PsiMinus";
    case BellIndex::PsiPlus: return "PsiPlus";
    case BellIndex::PhiPlus: return "PhiPlus";
    case BellIndex::PhiMinus: return "PhiMinus";
  }
  return "?";
}

inline PureState bell_state(BellIndex b) {
  const double s = 1.0 / std::sqrt(2.0);
  ComplexVector v = ComplexVector::Zero(4);
  switch (b) {
    case BellIndex::PsiMinus: v(1) = s; v(2) = -s; break;
    case BellIndex::PsiPlus: v(1) = s; v(2) = s; break;
    case BellIndex::PhiPlus: v(0) = s; v(3) = s; break;
    case BellIndex::PhiMinus: v(0) = s; v(3) = -s; break;
  }
  return {std::move(v), {2, 2}};
}

inline PureState singlet() { return bell_state(BellIndex::PsiMinus); }

/// lambda |Psi-><Psi-| + (1 - lambda)/3 (Psi+ + Phi+ + Phi-). Bell diagonal.
inline DensityOperator singlet_mixture(double lambda) {
  detail::require(lambda >= 0.0 && lambda <= 1.0, "singlet weight must lie in [0, 1]");
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  for (auto b : kBellIndices) {
    const ComplexVector v = bell_state(b).amplitudes();
    const double w = b == BellIndex::PsiMinus ? lambda : (1.0 - lambda) / 3.0;
    m += w * v * v.adjoint();
  }
  return DensityOperator::unchecked(std::move(m), {2, 2});
}

inline PureState tensor(const PureState& a, const PureState& b) {
  Dims d = a.dims();
  d.insert(d.end(), b.dims().begin(), b.dims().end());
  ComplexVector v = Eigen::kroneckerProduct(a.amplitudes(), b.amplitudes()).eval();
  return PureState::normalized(std::move(v), std::move(d));
}

inline DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
  Dims d = a.dims();
  d.insert(d.end(), b.dims().begin(), b.dims().end());
  ComplexMatrix m = Eigen::kroneckerProduct(a.matrix(), b.matrix()).eval();
  return DensityOperator::unchecked(std::move(m), std::move(d));
}

/// Reduced state on `keep`; the result lists the kept subsystems in their
/// original order. An empty `keep` yields the 1x1 matrix [trace].
inline DensityOperator partial_trace(const DensityOperator& rho, std::span<const std::size_t> keep) {
  detail::check_subsystems(keep, rho.subsystems());
  std::vector<std::size_t> kept(keep.begin(), keep.end());
  std::sort(kept.begin(), kept.end());
  const auto traced = detail::complement(rho.subsystems(), kept);
  const auto ko = detail::offsets(rho.dims(), kept);
  const auto to = detail::offsets(rho.dims(), traced);
  const auto& m = rho.matrix();
  const auto dk = static_cast<Eigen::Index>(ko.size());
  ComplexMatrix out = ComplexMatrix::Zero(dk, dk);
  for (Eigen::Index a = 0; a < dk; ++a)
    for (Eigen::Index b = 0; b < dk; ++b) {
      complex acc = 0.0;
      for (auto t : to)
        acc += m(static_cast<Eigen::Index>(ko[static_cast<std::size_t>(a)] + t),
                 static_cast<Eigen::Index>(ko[static_cast<std::size_t>(b)] + t));
      out(a, b) = acc;
    }
  Dims dims;
  for (auto k : kept) dims.push_back(rho.dims()[k]);
  if (dims.empty()) dims.push_back(1);
  return DensityOperator::unchecked(std::move(out), std::move(dims));
}

inline DensityOperator partial_trace(const DensityOperator& rho, std::initializer_list<std::size_t> keep) {
  return partial_trace(rho, std::span<const std::size_t>(keep.begin(), keep.size()));
}

/// Reorders subsystems: new subsystem i is old subsystem `order[i]`.
inline DensityOperator permute(const DensityOperator& rho, std::span<const std::size_t> order) {
  detail::require(order.size() == rho.subsystems(), "permutation must list every subsystem");
  detail::check_subsystems(order, rho.subsystems());
  Dims nd;
  for (auto o : order) nd.push_back(rho.dims()[o]);
  // old flat index of each new flat index
  const auto map = detail::offsets(rho.dims(), order);
  const auto d = static_cast<Eigen::Index>(map.size());
  ComplexMatrix out(d, d);
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index b = 0; b < d; ++b)
      out(a, b) = rho.matrix()(static_cast<Eigen::Index>(map[static_cast<std::size_t>(a)]),
                               static_cast<Eigen::Index>(map[static_cast<std::size_t>(b)]));
  return DensityOperator::unchecked(std::move(out), std::move(nd));
}

inline DensityOperator permute(const DensityOperator& rho, std::initializer_list<std::size_t> order) {
  return permute(rho, std::span<const std::size_t>(order.begin(), order.size()));
}

/// Full-space matrix of `op` acting on `targets` (in that order) with identity
/// elsewhere. `op` may be rectangular when there is a single target, mapping
/// that subsystem to dimension op.rows(). Returns the lifted operator and the
/// output dims.
inline std::pair<ComplexMatrix, Dims> lift(const ComplexMatrix& op, const Dims& dims,
                                           std::span<const std::size_t> targets) {
  detail::check_subsystems(targets, dims.size());
  detail::require(!targets.empty(), "operator needs at least one target");
  std::size_t in_dim = 1;
  for (auto t : targets) in_dim *= dims[t];
  detail::require(static_cast<std::size_t>(op.cols()) == in_dim, "operator input dimension mismatch");
  Dims out_dims = dims;
  if (static_cast<std::size_t>(op.rows()) != in_dim) {
    detail::require(targets.size() == 1, "dimension-changing operators must act on a single subsystem");
    out_dims[targets[0]] = static_cast<std::size_t>(op.rows());
  }
  const auto rest = detail::complement(dims.size(), targets);
  const auto in_t = detail::offsets(dims, targets), in_r = detail::offsets(dims, rest);
  const auto out_t = detail::offsets(out_dims, targets), out_r = detail::offsets(out_dims, rest);
  ComplexMatrix full = ComplexMatrix::Zero(static_cast<Eigen::Index>(detail::product(out_dims)),
                                           static_cast<Eigen::Index>(detail::product(dims)));
  for (std::size_t r = 0; r < in_r.size(); ++r)
    for (Eigen::Index a = 0; a < op.rows(); ++a)
      for (Eigen::Index b = 0; b < op.cols(); ++b) {
        const complex v = op(a, b);
        if (v != 0.0)
          full(static_cast<Eigen::Index>(out_t[static_cast<std::size_t>(a)] + out_r[r]),
               static_cast<Eigen::Index>(in_t[static_cast<std::size_t>(b)] + in_r[r])) = v;
      }
  return {std::move(full), std::move(out_dims)};
}

/// U rho U^dagger for a unitary acting on `targets`.
inline DensityOperator apply_unitary(const DensityOperator& rho, const ComplexMatrix& u,
                                     std::span<const std::size_t> targets) {
  auto [full, dims] = lift(u, rho.dims(), targets);
  return DensityOperator::unchecked(full * rho.matrix() * full.adjoint(), std::move(dims));
}

inline DensityOperator apply_unitary(const DensityOperator& rho, const ComplexMatrix& u,
                                     std::initializer_list<std::size_t> targets) {
  return apply_unitary(rho, u, std::span<const std::size_t>(targets.begin(), targets.size()));
}

/// Real spectrum of a Hermitian matrix in descending order.
inline std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m) {
  detail::require(detail::is_hermitian(m, kStateTolerance), "matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m, Eigen::EigenvaluesOnly);
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(ev.begin(), ev.end(), std::greater<>{});
  return ev;
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases of
/// R's diagonal folded back into Q.
inline ComplexMatrix haar_random_unitary(std::size_t dim, RngStream& rng) {
  detail::require(dim >= 1, "unitary dimension must be at least 1");
  const auto d = static_cast<Eigen::Index>(dim);
  ComplexMatrix g(d, d);
  const double s = 1.0 / std::sqrt(2.0);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) g(i, j) = complex(rng.normal() * s, rng.normal() * s);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < d; ++j) {
    const complex rjj = r(j, j);
    const double a = std::abs(rjj);
    q.col(j) *= a > 0.0 ? rjj / a : complex(1.0);
  }
  return q;
}

/// Haar-random pure state on `dims`.
inline PureState random_pure_state(const Dims& dims, RngStream& rng) {
  const auto d = static_cast<Eigen::Index>(detail::product(dims));
  ComplexVector v(d);
  for (Eigen::Index i = 0; i < d; ++i) v(i) = complex(rng.normal(), rng.normal());
  return PureState::normalized(std::move(v), dims);
}

/// Random mixed state: the marginal of a Haar-random pure state on the system
/// doubled with an equally large environment.
inline DensityOperator random_mixed_state(const Dims& dims, RngStream& rng) {
  const auto d = static_cast<Eigen::Index>(detail::product(dims));
  ComplexMatrix g(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) g(i, j) = complex(rng.normal(), rng.normal());
  ComplexMatrix m = g * g.adjoint();
  m /= m.trace().real();
  m = 0.5 * (m + m.adjoint()).eval();
  return DensityOperator::unchecked(std::move(m), dims);
}

/// |up_r>, the +1 eigenvector of r . sigma, with |0> at +z and a real,
/// non-negative first amplitude.
inline PureState bloch_to_state(const BlochVector& r) {
  const double theta = std::acos(std::clamp(r.z(), -1.0, 1.0));
  const double phi = (std::abs(r.x()) + std::abs(r.y()) > 0.0) ? std::atan2(r.y(), r.x()) : 0.0;
  ComplexVector v(2);
  v(0) = std::cos(theta / 2.0);
  v(1) = std::polar(std::sin(theta / 2.0), phi);
  return PureState::normalized(std::move(v), {2});
}

/// <psi|rho|psi>.
inline double pure_fidelity(const DensityOperator& rho, const PureState& psi) {
  if (rho.dim() != psi.dim()) throw std::invalid_argument("fidelity dimension mismatch");
  const complex f = psi.amplitudes().dot(rho.matrix() * psi.amplitudes());
  return std::clamp(f.real(), 0.0, 1.0);
}

}  // namespace qic
