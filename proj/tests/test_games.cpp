#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "qic/bounds.hpp"
#include "qic/games.hpp"

using namespace qic;
using namespace qic::games;

namespace {

GameConfig exact_cfg(std::size_t n, std::size_t m) {
  GameConfig c;
  c.n = n;
  c.m = m;
  return c;
}

GameConfig mc_cfg(std::size_t n, std::size_t m, GameVersion v, std::size_t trials = 100000) {
  GameConfig c = exact_cfg(n, m);
  c.mode = EvalMode::monte_carlo;
  c.version = v;
  c.trials = trials;
  c.seed = 2024;
  return c;
}

double q_formula(std::size_t n) { return (1.0 + 1.0 / std::sqrt(double(n))) / 2.0; }

}  // namespace

TEST(GameConfig, Validation) {
  EXPECT_THROW(exact_cfg(0, 0).validate(), std::invalid_argument);
  EXPECT_THROW(exact_cfg(2, 3).validate(), std::invalid_argument);
  EXPECT_TRUE(exact_cfg(2, 2).reference_run());
  EXPECT_FALSE(exact_cfg(3, 2).reference_run());
}

TEST(Earac, SuccessMatchesClosedFormOracle) {
  EXPECT_NEAR(ic1_earac_success(2), oracle::earac_q_closed_form(2), 1e-12);
  EXPECT_NEAR(ic1_earac_success(3), oracle::earac_q_closed_form(3), 1e-12);
  EXPECT_NEAR(ic1_earac_success(2), 0.8535533906, 1e-9);
  EXPECT_NEAR(ic1_earac_success(3), 0.7886751346, 1e-9);
}

TEST(Earac, SampledOracleAgrees) {
  const double q = oracle::earac_q_sampled(3, 20000, 8);
  EXPECT_NEAR(q, ic1_earac_success(3), 4 * std::sqrt(q * (1 - q) / 20000));
}

TEST(Earac, ConcatenationGivesThreeQuarters) {
  // inner and outer 2-codes: correct when both succeed or both fail
  const double q2 = oracle::earac_q_closed_form(2);
  EXPECT_NEAR(q2 * q2 + (1 - q2) * (1 - q2), 0.75, 1e-12);
  EXPECT_NEAR(ic1_earac_success(4), 0.75, 1e-9);
}

TEST(Earac, UnsupportedSizes) {
  EXPECT_THROW(ic1_earac_success(1), UnsupportedParameter);
  EXPECT_THROW(ic1_earac_success(5), UnsupportedParameter);
  EXPECT_THROW(paired_earac(6), UnsupportedParameter);
}

TEST(Earac, SampledBranchesMatchExact) {
  const IC1Protocol p = EaracIC1{4};
  RngStream rng(77);
  const int trials = 40000;
  int wins = 0;
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t x = rng.below(16);
    const std::size_t k = rng.below(4);
    const auto b = ic1_sample(p, x, k, rng);
    wins += (b.message ^ b.key) == ((x >> k) & 1u);
  }
  EXPECT_NEAR(wins / double(trials), 0.75, 4 * std::sqrt(0.75 * 0.25 / trials));
}

TEST(IC2, PairedEaracIsQSquared) {
  for (std::size_t n : {2u, 3u, 4u}) {
    const auto r = run_ic2(paired_earac(n), exact_cfg(n, 1));
    EXPECT_NEAR(r.p_hat, ic1_earac_success(n) * ic1_earac_success(n), 1e-9);
    EXPECT_DOUBLE_EQ(r.std_err, 0.0);
  }
  EXPECT_NEAR(run_ic2(paired_earac(2), exact_cfg(2, 1)).p_hat, 0.7285533906, 1e-9);
}

TEST(IC2, GuessingGivesQuarter) {
  EXPECT_NEAR(run_ic2(paired_guess(), exact_cfg(3, 1)).p_hat, 0.25, 1e-12);
}

TEST(IC2, MonteCarloAgreesWithExact) {
  const auto ex = run_ic2(paired_earac(3), exact_cfg(3, 1));
  auto cfg = mc_cfg(3, 1, GameVersion::I, 50000);
  const auto mc = run_ic2(paired_earac(3), cfg);
  EXPECT_NEAR(mc.p_hat, ex.p_hat, 4 * mc.std_err);
}

TEST(Nonlocal, DeterministicNEqualsOne) {
  // |00>, Alice measures in a relabelled computational basis so that her
  // outcome is x, Bob measures computationally and always gets 0
  NonlocalForm s{PureState::basis({4, 4}, 0), {}, {}, {ComplexMatrix::Identity(4, 4)}};
  for (unsigned x = 0; x < 4; ++x) {
    ComplexMatrix u = ComplexMatrix::Zero(4, 4);
    for (unsigned c = 0; c < 4; ++c) u(c ^ x, c) = 1.0;  // column x holds |0>
    s.alice_bases.push_back(u);
    s.alice_choice.push_back(x);
  }
  const auto r = evaluate_nonlocal_ic2(s);
  EXPECT_NEAR(r.Q, 1.0, 1e-12);
  EXPECT_NEAR(r.Q, bounds::q_prime(1), 1e-12);
  EXPECT_NEAR(run_ic2(s, exact_cfg(1, 1)).p_hat, 1.0, 1e-12);
}

TEST(Nonlocal, ProductStateUncorrelatedOutcomes) {
  // uniform superposition on both sides, measured in the computational basis
  ComplexVector v = ComplexVector::Constant(16, 0.25);
  NonlocalForm s{PureState(v, {4, 4}), {ComplexMatrix::Identity(4, 4)}, {}, {}};
  const std::size_t n = 2;
  s.alice_choice.assign(std::size_t{1} << (2 * n), 0);
  for (std::size_t k = 0; k < n; ++k) s.bob_bases.push_back(ComplexMatrix::Identity(4, 4));
  EXPECT_NEAR(evaluate_nonlocal_ic2(s).Q, 0.25, 1e-12);
}

TEST(Nonlocal, EaracEmbeddingReproducesPairedCode) {
  for (std::size_t n : {2u, 3u}) {
    const auto s = earac_nonlocal_form(n);
    const auto r = evaluate_nonlocal_ic2(s);
    const double q = ic1_earac_success(n);
    EXPECT_NEAR(r.Q, q * q, 1e-10);
    // both bit combinations are saturated by the EARAC
    EXPECT_NEAR(r.first_bit_combination, q, 1e-10);
    EXPECT_NEAR(r.second_bit_combination, q, 1e-10);
  }
}

TEST(Nonlocal, CorrelatorsMatchProbabilities) {
  RngStream rng(31);
  for (std::size_t n : {1u, 2u, 3u}) {
    const auto s = random_nonlocal_form(n, rng);
    const auto r = evaluate_nonlocal_ic2(s);
    EXPECT_NEAR(r.parity_combination, r.parity_from_correlators, 1e-12);
    EXPECT_NEAR(r.first_bit_combination, r.first_bit_from_correlators, 1e-12);
    EXPECT_NEAR(r.second_bit_combination, r.second_bit_from_correlators, 1e-12);
    EXPECT_LE(r.Q, bounds::q_prime(n) + 1e-9);
    EXPECT_EQ(r.E.size(), (std::size_t{1} << (2 * n)) * n);
  }
}

TEST(Nonlocal, RejectsBadBases) {
  RngStream rng(32);
  auto s = random_nonlocal_form(1, rng);
  s.bob_bases[0](0, 0) += 0.1;
  EXPECT_THROW(s.validate(), std::invalid_argument);
}

TEST(QicV1, NaiveMatchesFormula) {
  EXPECT_NEAR(run_qic_v1(naive_strategy(4, 1), exact_cfg(4, 1)).p_hat, 0.4375, 1e-12);
  EXPECT_NEAR(run_qic_v1(naive_strategy(5, 5), exact_cfg(5, 5)).p_hat, 1.0, 1e-12);
  EXPECT_TRUE(run_qic_v1(naive_strategy(5, 5), exact_cfg(5, 5)).reference_run);
}

TEST(QicV1, ChannelFormAverage) {
  EXPECT_NEAR(run_qic_v1(channel_strategy({0.25, 0.25, 0.25}), exact_cfg(3, 1)).p_hat, 0.25, 1e-12);
  EXPECT_NEAR(run_qic_v1(channel_strategy({0.25, 0.7, 1.0}), exact_cfg(3, 1)).p_hat, 0.65, 1e-12);
  EXPECT_THROW(run_qic_v1(channel_strategy({0.5}), exact_cfg(3, 1)), std::invalid_argument);
}

TEST(QicV1, TeleportationMatchesFormulaAndIC2) {
  for (std::size_t n : {2u, 3u, 4u}) {
    const auto ic2 = paired_earac(n);
    const auto P = run_qic_v1(teleportation_strategy(ic2), exact_cfg(n, 1)).p_hat;
    EXPECT_NEAR(P, bounds::teleport_p(n), 1e-9);
    EXPECT_NEAR(P, run_ic2(ic2, exact_cfg(n, 1)).p_hat, 1e-9);
  }
}

TEST(QicV1, TeleportationFailuresAreOrthogonalToSinglet) {
  const auto branches = teleport_omega_branches(paired_earac(2), 2, 0);
  double win = 0.0;
  for (const auto& b : branches) {
    const double f = pure_fidelity(b.state, singlet());
    if (b.x == b.y) {
      EXPECT_NEAR(f, 1.0, 1e-10);
      win += b.probability;
    } else {
      EXPECT_NEAR(f, 0.0, 1e-10);
    }
  }
  EXPECT_NEAR(win, 0.7285533906, 1e-9);
}

TEST(QicV1, TeleportationNeedsAMessageQubit) {
  EXPECT_THROW(run_qic_v1(teleportation_strategy(paired_earac(2)), exact_cfg(2, 0)), UnsupportedParameter);
}

TEST(QicV1, NonlocalTeleportationMatchesIC2) {
  RngStream rng(41);
  const auto s = random_nonlocal_form(2, rng);
  const double Q = evaluate_nonlocal_ic2(s).Q;
  EXPECT_NEAR(run_qic_v1(teleportation_strategy(s), exact_cfg(2, 1)).p_hat, Q, 1e-9);
}

TEST(QicV1, ExactBelowPPrime) {
  for (std::size_t n : {2u, 3u, 4u})
    EXPECT_LE(run_qic_v1(teleportation_strategy(paired_earac(n)), exact_cfg(n, 1)).p_hat,
              bounds::solve_p_prime(1, n) + 1e-9);
  for (std::size_t n = 2; n <= 6; ++n)
    for (std::size_t m = 0; m < n; ++m)
      EXPECT_LE(run_qic_v1(naive_strategy(n, m), exact_cfg(n, m)).p_hat, bounds::solve_p_prime(m, n) + 1e-9);
}

TEST(QicV1, MonteCarloAgreesWithExact) {
  const std::vector<std::pair<Strategy, GameConfig>> cases{
      {naive_strategy(4, 1), exact_cfg(4, 1)},
      {teleportation_strategy(paired_earac(3)), exact_cfg(3, 1)},
      {channel_strategy({0.3, 0.9}), exact_cfg(2, 1)},
  };
  for (const auto& [s, c] : cases) {
    const double P = run_qic_v1(s, c).p_hat;
    auto mc = c;
    mc.mode = EvalMode::monte_carlo;
    mc.trials = 40000;
    mc.seed = 5;
    const auto r = run_qic_v1(s, mc);
    EXPECT_NEAR(r.p_hat, P, 4 * r.std_err);
  }
}

TEST(QicV2, ExactFollowsVersionRelation) {
  const std::vector<std::pair<Strategy, GameConfig>> cases{
      {naive_strategy(4, 1), exact_cfg(4, 1)},
      {teleportation_strategy(paired_earac(2)), exact_cfg(2, 1)},
      {channel_strategy({0.25, 0.6}), exact_cfg(2, 1)},
  };
  for (auto [s, c] : cases) {
    const double P = run_qic_v1(s, c).p_hat;
    c.version = GameVersion::II;
    EXPECT_NEAR(run_qic(s, c).p_hat, bounds::version_convert(P), 1e-10);
  }
}

TEST(QicV2, PerfectStrategyAlwaysWins) {
  auto c = mc_cfg(3, 3, GameVersion::II, 2000);
  EXPECT_DOUBLE_EQ(run_qic_v2(naive_strategy(3, 3), c).p_hat, 1.0);
}

TEST(QicV2, VersionRelationCheck) {
  const auto rep = version_relation_check(naive_strategy(3, 1), mc_cfg(3, 1, GameVersion::II, 40000));
  EXPECT_NEAR(rep.P_exact, 0.5, 1e-12);
  EXPECT_NEAR(rep.predicted, 2.0 / 3.0, 1e-12);
  EXPECT_TRUE(rep.consistent) << rep.deviation << " vs " << rep.std_err;
  const auto quarter = version_relation_check(channel_strategy({0.25, 0.25}), mc_cfg(2, 1, GameVersion::II, 40000));
  EXPECT_TRUE(quarter.consistent);
  EXPECT_NEAR(quarter.predicted, 0.5, 1e-12);
}

TEST(MonteCarlo, WorkerCountDoesNotChangeResult) {
  auto c = mc_cfg(3, 1, GameVersion::I, 3000);
  c.workers = 1;
  const auto a = run_qic_v1(teleportation_strategy(paired_earac(3)), c);
  c.workers = 3;
  const auto b = run_qic_v1(teleportation_strategy(paired_earac(3)), c);
  EXPECT_EQ(a.p_hat, b.p_hat);
}
