#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "oracles.hpp"
#include "qic/core.hpp"

using namespace qic;

namespace {

constexpr double kTol = 1e-12;

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(PureState, RejectsBadInput) {
  ComplexVector v = ComplexVector::Zero(4);
  v(0) = 1.0;
  EXPECT_THROW(PureState(v, {2, 3}), std::invalid_argument);
  v(1) = 1.0;
  EXPECT_THROW(PureState(v, {2, 2}), std::invalid_argument);
  EXPECT_THROW(PureState::normalized(ComplexVector::Zero(2), {2}), std::invalid_argument);
  EXPECT_THROW(PureState::basis({2}, 2), std::out_of_range);
  EXPECT_NO_THROW(PureState::normalized(v, {2, 2}));
}

TEST(DensityOperator, ValidatesInvariants) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = 1.5;
  m(1, 1) = -0.5;
  EXPECT_THROW(DensityOperator(m, {2}), std::invalid_argument);  // negative eigenvalue
  m(0, 0) = 0.5;
  m(1, 1) = 0.6;
  EXPECT_THROW(DensityOperator(m, {2}), std::invalid_argument);  // trace
  m(1, 1) = 0.5;
  m(0, 1) = 0.1;
  EXPECT_THROW(DensityOperator(m, {2}), std::invalid_argument);  // not Hermitian
  m(1, 0) = 0.1;
  EXPECT_NO_THROW(DensityOperator(m, {2}));
  EXPECT_THROW(DensityOperator(m, {3}), std::invalid_argument);
}

TEST(Bell, StatesAreOrthonormal) {
  for (auto a : kBellIndices)
    for (auto b : kBellIndices) {
      const complex ip = bell_state(a).amplitudes().dot(bell_state(b).amplitudes());
      EXPECT_NEAR(std::abs(ip), a == b ? 1.0 : 0.0, kTol);
    }
  EXPECT_LT(max_abs(singlet().amplitudes() - oracle::singlet_vec()), kTol);
}

TEST(PartialTrace, MatchesBlockOracle) {
  RngStream rng(11);
  for (int t = 0; t < 20; ++t) {
    const auto rho = random_mixed_state({3, 4}, rng);
    EXPECT_LT(max_abs(partial_trace(rho, {0}).matrix() - oracle::trace_second(rho.matrix(), 3, 4)), kTol);
    EXPECT_LT(max_abs(partial_trace(rho, {1}).matrix() - oracle::trace_first(rho.matrix(), 3, 4)), kTol);
  }
}

TEST(PartialTrace, SingletMarginalsAreMaximallyMixed) {
  const auto rho = singlet().projector();
  EXPECT_LT(max_abs(partial_trace(rho, {0}).matrix() - 0.5 * ComplexMatrix::Identity(2, 2)), kTol);
  EXPECT_LT(max_abs(partial_trace(rho, {1}).matrix() - 0.5 * ComplexMatrix::Identity(2, 2)), kTol);
}

TEST(PartialTrace, KeepOrderIsSortedAndEmptyKeepGivesTrace) {
  RngStream rng(3);
  const auto rho = random_mixed_state({2, 3, 2}, rng);
  const auto a = partial_trace(rho, {2, 0});
  EXPECT_EQ(a.dims(), (Dims{2, 2}));
  EXPECT_LT(max_abs(a.matrix() - partial_trace(rho, {0, 2}).matrix()), kTol);
  const auto none = partial_trace(rho, std::span<const std::size_t>{});
  EXPECT_NEAR(none.matrix()(0, 0).real(), 1.0, kTol);
  EXPECT_THROW(partial_trace(rho, {3}), std::out_of_range);
  EXPECT_THROW(partial_trace(rho, {1, 1}), std::invalid_argument);
}

TEST(Tensor, ProductStateMarginals) {
  RngStream rng(5);
  const auto a = random_mixed_state({2}, rng), b = random_mixed_state({3}, rng);
  const auto ab = tensor(a, b);
  EXPECT_EQ(ab.dims(), (Dims{2, 3}));
  EXPECT_LT(max_abs(partial_trace(ab, {0}).matrix() - a.matrix()), kTol);
  EXPECT_LT(max_abs(partial_trace(ab, {1}).matrix() - b.matrix()), kTol);
  EXPECT_LT(max_abs(ab.matrix() - oracle::kron(a.matrix(), b.matrix())), kTol);
}

TEST(Permute, SwapsSubsystems) {
  RngStream rng(6);
  const auto a = random_mixed_state({2}, rng), b = random_mixed_state({3}, rng);
  const auto ba = permute(tensor(a, b), {1, 0});
  EXPECT_EQ(ba.dims(), (Dims{3, 2}));
  EXPECT_LT(max_abs(ba.matrix() - tensor(b, a).matrix()), kTol);
}

TEST(Lift, ActsOnTheNamedSubsystem) {
  const ComplexMatrix x = oracle::sx();
  const auto [full, dims] = lift(x, {2, 2, 2}, std::array<std::size_t, 1>{1});
  EXPECT_EQ(dims, (Dims{2, 2, 2}));
  EXPECT_LT(max_abs(full - oracle::kron(oracle::kron(oracle::id2(), x), oracle::id2())), kTol);
}

TEST(Lift, RectangularOperatorChangesDimension) {
  ComplexMatrix k = ComplexMatrix::Zero(3, 2);
  k(0, 0) = 1.0;
  k(2, 1) = 1.0;
  const auto [full, dims] = lift(k, {2, 2}, std::array<std::size_t, 1>{0});
  EXPECT_EQ(dims, (Dims{3, 2}));
  EXPECT_EQ(full.rows(), 6);
  EXPECT_EQ(full.cols(), 4);
}

TEST(Spectrum, DescendingAndRejectsNonHermitian) {
  RngStream rng(8);
  const auto rho = random_mixed_state({4}, rng);
  const auto ev = hermitian_eigenvalues(rho.matrix());
  for (std::size_t i = 1; i < ev.size(); ++i) EXPECT_GE(ev[i - 1], ev[i]);
  double sum = 0.0;
  for (double v : ev) sum += v;
  EXPECT_NEAR(sum, 1.0, 1e-12);
  ComplexMatrix bad = ComplexMatrix::Zero(2, 2);
  bad(0, 1) = 1.0;
  EXPECT_THROW(hermitian_eigenvalues(bad), std::invalid_argument);
}

TEST(Haar, UnitariesAreUnitaryAndSeedDeterministic) {
  RngStream a(42, 1), b(42, 1);
  for (std::size_t d : {1u, 2u, 4u, 7u}) {
    const auto u = haar_random_unitary(d, a);
    EXPECT_LT(max_abs(u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols())), 1e-12);
    EXPECT_LT(max_abs(u - haar_random_unitary(d, b)), 0.0 + 1e-300);
  }
}

TEST(Haar, RandomStatesAreValid) {
  RngStream rng(9);
  for (int t = 0; t < 50; ++t) {
    const auto m = random_mixed_state({2, 3}, rng);
    EXPECT_NO_THROW(DensityOperator(m.matrix(), m.dims()));
    const auto p = random_pure_state({3, 2}, rng);
    EXPECT_NEAR(p.amplitudes().norm(), 1.0, 1e-12);
  }
}

TEST(Bloch, StateIsPlusOneEigenvector) {
  RngStream rng(10);
  for (int t = 0; t < 100; ++t) {
    const auto r = BlochVector::random(rng);
    const auto psi = bloch_to_state(r);
    const ComplexMatrix rs = r.x() * oracle::sx() + r.y() * oracle::sy() + r.z() * oracle::sz();
    EXPECT_LT((rs * psi.amplitudes() - psi.amplitudes()).norm(), 1e-12);
    EXPECT_NEAR(pure_fidelity(bloch_to_state(-r).projector(), psi), 0.0, 1e-12);
  }
  EXPECT_NEAR(std::abs(bloch_to_state({0, 0, 1}).amplitudes()(0)), 1.0, kTol);
  EXPECT_NEAR(std::abs(bloch_to_state({0, 0, -1}).amplitudes()(1)), 1.0, kTol);
  EXPECT_THROW(BlochVector(1, 1, 0), std::invalid_argument);
}

TEST(Fidelity, DimensionMismatchThrows) {
  EXPECT_THROW(pure_fidelity(singlet().projector(), bloch_to_state({0, 0, 1})), std::invalid_argument);
}

TEST(SingletMixture, IsBellDiagonal) {
  const auto rho = singlet_mixture(0.7);
  EXPECT_NEAR(pure_fidelity(rho, singlet()), 0.7, kTol);
  for (auto b : {BellIndex::PsiPlus, BellIndex::PhiPlus, BellIndex::PhiMinus})
    EXPECT_NEAR(pure_fidelity(rho, bell_state(b)), 0.1, kTol);
}

TEST(Rng, StreamsAreReproducibleAndDistinct) {
  RngStream a(7, 3), b(7, 3), c(7, 4);
  bool differs = false;
  for (int i = 0; i < 16; ++i) {
    const double x = a.uniform();
    EXPECT_EQ(x, b.uniform());
    if (x != c.uniform()) differs = true;
  }
  EXPECT_TRUE(differs);
}
