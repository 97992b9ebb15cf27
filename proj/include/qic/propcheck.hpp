#pragma once

// Seeded property checks for the entropic inequalities behind the QIC bound.
//
// Each suite evaluates a list of links (left <= right) per trial. Trial t
// draws everything from RngStream(seed, t), so any reported violation can be
// rebuilt from its (seed, trial) fingerprint with the matching replay call.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qic/channels.hpp"
#include "qic/core.hpp"
#include "qic/entropy.hpp"
#include "qic/games.hpp"
#include "qic/parallel.hpp"

namespace qic::propcheck {

using EntropyFn = std::function<double(const DensityOperator&)>;

struct FuzzConfig {
  std::size_t trials = 1000;
  std::uint64_t seed = 0;
  std::size_t max_subsystem_dim = 2;  // subsystem dims drawn from [2, max]
  double tolerance = 1e-8;
  unsigned workers = 0;
  /// Entropy used by every check. Replaceable so the harness can be tested
  /// against a deliberately broken implementation.
  EntropyFn entropy = [](const DensityOperator& r) { return von_neumann_entropy(r); };

  void validate() const {
    if (trials < 1) throw std::invalid_argument("trials must be at least 1");
    if (max_subsystem_dim < 2 || max_subsystem_dim > 4)
      throw std::invalid_argument("max subsystem dimension must lie in [2, 4]");
  }
};

/// One evaluated inequality: left <= right is expected.
struct Link {
  std::string label;
  double left = 0.0;
  double right = 0.0;
};

struct ViolationReport {
  std::string suite;
  std::size_t trial = 0;
  std::string label;
  double left = 0.0;
  double right = 0.0;
  std::uint64_t seed = 0;
};

struct FuzzSummary {
  std::string suite;
  std::size_t trials = 0;
  std::size_t checks = 0;
  double max_excess = -INFINITY;  // largest left - right seen
  std::vector<ViolationReport> violations;
};

namespace detail {

inline double S(const FuzzConfig& cfg, const DensityOperator& rho, std::initializer_list<std::size_t> keep) {
  return cfg.entropy(partial_trace(rho, keep));
}

inline double mutual(const FuzzConfig& cfg, const DensityOperator& rho, std::initializer_list<std::size_t> left,
                     std::initializer_list<std::size_t> right) {
  std::vector<std::size_t> both(left);
  both.insert(both.end(), right.begin(), right.end());
  const auto sl = cfg.entropy(partial_trace(rho, left));
  const auto sr = cfg.entropy(partial_trace(rho, right));
  return sl + sr - cfg.entropy(partial_trace(rho, std::span<const std::size_t>(both)));
}

inline std::size_t draw_dim(const FuzzConfig& cfg, RngStream& rng) { return 2 + rng.below(cfg.max_subsystem_dim - 1); }

/// Same matrix under a coarser or finer subsystem split.
inline DensityOperator regroup(const DensityOperator& rho, Dims dims) {
  return DensityOperator::unchecked(rho.matrix(), std::move(dims));
}

/// Random channel on the joint system of subsystems 1 and 2 of a three-part
/// state, returning a two-part state (0, out).
inline DensityOperator process_tail(const DensityOperator& rho, std::size_t out_dim, RngStream& rng) {
  const auto& d = rho.dims();
  const std::size_t in = d[1] * d[2];
  const std::size_t env = std::max<std::size_t>(4, (in + out_dim - 1) / out_dim);
  const auto ch = random_channel(in, out_dim, env, rng);
  return apply_channel(ch, regroup(rho, {d[0], in}), 1);
}

template <class TrialFn>
FuzzSummary run_suite(const std::string& suite, const FuzzConfig& cfg, TrialFn&& trial) {
  cfg.validate();
  const auto links = parallel_map<std::vector<Link>>(cfg.trials, cfg.workers, trial);
  FuzzSummary out;
  out.suite = suite;
  out.trials = cfg.trials;
  for (std::size_t t = 0; t < links.size(); ++t)
    for (const auto& l : links[t]) {
      ++out.checks;
      out.max_excess = std::max(out.max_excess, l.left - l.right);
      if (!(l.left <= l.right + cfg.tolerance)) out.violations.push_back({suite, t, l.label, l.left, l.right, cfg.seed});
    }
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// QIC chain: random state on C B T, random channel B T -> B'.

inline std::vector<Link> qic_chain_trial(const FuzzConfig& cfg, std::size_t trial) {
  RngStream rng(cfg.seed, trial);
  const std::size_t dc = detail::draw_dim(cfg, rng), db = detail::draw_dim(cfg, rng), dt = detail::draw_dim(cfg, rng);
  const std::size_t dout = detail::draw_dim(cfg, rng);
  const auto rho = random_mixed_state({dc, db, dt}, rng);
  const auto after = detail::process_tail(rho, dout, rng);

  const double sB = detail::S(cfg, rho, {1}), sT = detail::S(cfg, rho, {2}), sBT = detail::S(cfg, rho, {1, 2});
  const double sCB = detail::S(cfg, rho, {0, 1}), sCBT = cfg.entropy(rho);
  const double iCB = detail::mutual(cfg, rho, {0}, {1});
  const double iCBT = detail::mutual(cfg, rho, {0}, {1, 2});
  const double iCBp = detail::mutual(cfg, after, {0}, {1});
  const double dI = iCBp - iCB;
  return {
      {"subadditivity S(BT) <= S(B)+S(T)", sBT, sB + sT},
      {"araki-lieb -S(CBT) <= S(T)-S(CB)", -sCBT, sT - sCB},
      {"data-processing I(C:B') <= I(C:BT)", iCBp, iCBT},
      {"chain I(C:BT) <= 2S(T)+I(C:B)", iCBT, 2.0 * sT + iCB},
      {"dimension dI(C:B) <= 2 log2 dT", dI, 2.0 * std::log2(static_cast<double>(dt))},
  };
}

inline FuzzSummary check_qic_chain(const FuzzConfig& cfg) {
  return detail::run_suite("qicchain", cfg, [&cfg](std::size_t t) { return qic_chain_trial(cfg, t); });
}

// ---------------------------------------------------------------------------
// Classical message: T is a register of m bits, the state is
// sum_x p_x rho_x^{CB} (x) |x><x|.

inline std::vector<Link> classical_trial(const FuzzConfig& cfg, std::size_t trial) {
  RngStream rng(cfg.seed, trial);
  const std::size_t max_bits = cfg.max_subsystem_dim >= 4 ? 2 : 1;
  const std::size_t m = 1 + rng.below(max_bits);
  const std::size_t dt = std::size_t{1} << m;
  const std::size_t dc = detail::draw_dim(cfg, rng), db = detail::draw_dim(cfg, rng);
  const std::size_t dout = detail::draw_dim(cfg, rng);
  std::vector<double> p(dt);
  for (auto& v : p) v = -std::log(1.0 - rng.uniform());  // flat Dirichlet
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  const auto dcb = static_cast<Eigen::Index>(dc * db);
  ComplexMatrix m_cbt = ComplexMatrix::Zero(dcb * static_cast<Eigen::Index>(dt), dcb * static_cast<Eigen::Index>(dt));
  for (std::size_t x = 0; x < dt; ++x) {
    const auto block = random_mixed_state({dc, db}, rng);
    ComplexMatrix proj = ComplexMatrix::Zero(static_cast<Eigen::Index>(dt), static_cast<Eigen::Index>(dt));
    proj(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(x)) = p[x] / total;
    m_cbt += Eigen::kroneckerProduct(block.matrix(), proj).eval();
  }
  const auto rho = DensityOperator::unchecked(std::move(m_cbt), {dc, db, dt});
  const auto after = detail::process_tail(rho, dout, rng);

  const double iCB = detail::mutual(cfg, rho, {0}, {1});
  const double iCBT = detail::mutual(cfg, rho, {0}, {1, 2});
  const double iCBp = detail::mutual(cfg, after, {0}, {1});
  const double mb = static_cast<double>(m);
  return {
      {"cq S(CB) <= S(CBT)", detail::S(cfg, rho, {0, 1}), cfg.entropy(rho)},
      {"classical I(C:BT) - I(C:B) <= m", iCBT - iCB, mb},
      {"classical dI(C:B) <= m", iCBp - iCB, mb},
  };
}

inline FuzzSummary check_classical_bound(const FuzzConfig& cfg) {
  return detail::run_suite("classical", cfg, [&cfg](std::size_t t) { return classical_trial(cfg, t); });
}

// ---------------------------------------------------------------------------
// Sum bound on an explicit QIC round with n = 2 and m = 1: singlets C_k A_k,
// a random pure state on A' B, Alice's random channel A A' -> T (one qubit)
// and Bob's random channel B T -> B_0 B_1.

inline std::vector<Link> sum_bound_trial(const FuzzConfig& cfg, std::size_t trial) {
  RngStream rng(cfg.seed, trial);
  const std::size_t da = detail::draw_dim(cfg, rng);  // A'
  const std::size_t db = detail::draw_dim(cfg, rng);  // B
  const auto pair = singlet().projector();
  const auto shared = random_pure_state({da, db}, rng).projector();
  // C0 A0 C1 A1 A' B -> C0 C1 A0 A1 A' B
  const auto start = permute(tensor(tensor(pair, pair), shared), {0, 2, 1, 3, 4, 5});
  const auto grouped = detail::regroup(start, {4, 4 * da, db});  // C, A A', B
  const std::size_t alice_env = std::max<std::size_t>(4, (4 * da + 1) / 2);
  const auto sent = apply_channel(random_channel(4 * da, 2, alice_env, rng), grouped, 1);  // C, T, B
  const auto bob = detail::process_tail(sent, 4, rng);                                     // C, B'
  const auto fin = detail::regroup(bob, {2, 2, 2, 2});                                     // C0 C1 B0 B1

  const double i0 = detail::mutual(cfg, fin, {0}, {2});
  const double i1 = detail::mutual(cfg, fin, {1}, {3});
  const double iCBp = detail::mutual(cfg, bob, {0}, {1});
  const double iCB = detail::mutual(cfg, detail::regroup(grouped, {4, 4 * da, db}), {0}, {2});
  return {
      {"sum I(C_k:B_k) <= I(C:B')", i0 + i1, iCBp},
      {"qic dI(C:B) <= 2m", iCBp - iCB, 2.0},
      {"sum I(C_k:B_k) <= 2m", i0 + i1, 2.0},
  };
}

inline FuzzSummary check_sum_bound_fuzz(const FuzzConfig& cfg) {
  return detail::run_suite("sumbound", cfg, [&cfg](std::size_t t) { return sum_bound_trial(cfg, t); });
}

struct SumBoundReport {
  std::vector<double> per_k;  // I(C_k:B_k) = 2 - S(omega_k)
  double total = 0.0;
  double bound = 0.0;  // 2m
  bool holds = false;
};

/// Sum bound for a covariant strategy, where each omega_k is Bell diagonal
/// with singlet weight lambda_k.
inline SumBoundReport check_sum_bound(const games::ChannelForm& strategy, std::size_t n, std::size_t m,
                                      double tolerance = 1e-8) {
  if (strategy.lambdas.size() != n) throw std::invalid_argument("channel form needs one parameter per index");
  if (m > n) throw std::invalid_argument("m must not exceed n");
  SumBoundReport r;
  for (const auto& l : strategy.lambdas) {
    const double v = l.value(), w = (1.0 - v) / 3.0;
    const std::array<double, 4> spectrum{v, w, w, w};
    r.per_k.push_back(2.0 - entropy_of_spectrum(spectrum));
    r.total += r.per_k.back();
  }
  r.bound = 2.0 * static_cast<double>(m);
  r.holds = r.total <= r.bound + tolerance;
  return r;
}

// ---------------------------------------------------------------------------
// Achievability of equality in the QIC bound.

/// Non-negative gaps of the three inequalities that must be tight for
/// dI(C:B) = 2 log2 dT; all vanish exactly when equality is reachable.
struct AchievabilityReport {
  double subadditivity_gap = 0.0;  // S(B) + S(T) - S(BT)
  double araki_lieb_gap = 0.0;     // S(CBT) + S(T) - S(CB)
  double dimension_gap = 0.0;      // log2 dT - S(T)
  double delta_i = 0.0;            // I(C:BT) - I(C:B)
  bool equality_achievable = false;
};

inline AchievabilityReport check_achievability(const DensityOperator& rho_cbt, double tolerance = 1e-8,
                                               const EntropyFn& entropy = von_neumann_entropy) {
  if (rho_cbt.subsystems() != 3) throw std::invalid_argument("achievability needs a state on C B T");
  auto S = [&](std::initializer_list<std::size_t> keep) { return entropy(partial_trace(rho_cbt, keep)); };
  const double sB = S({1}), sT = S({2}), sC = S({0}), sBT = S({1, 2}), sCB = S({0, 1}), sCBT = entropy(rho_cbt);
  AchievabilityReport r;
  r.subadditivity_gap = sB + sT - sBT;
  r.araki_lieb_gap = sCBT + sT - sCB;
  r.dimension_gap = std::log2(static_cast<double>(rho_cbt.dims()[2])) - sT;
  r.delta_i = (sC + sBT - sCBT) - (sC + sB - sCB);
  r.equality_achievable =
      r.subadditivity_gap <= tolerance && r.araki_lieb_gap <= tolerance && r.dimension_gap <= tolerance;
  return r;
}

/// Naive-strategy state on C B T: m singlets shared between C and T, B a qubit
/// in |0>. Dims [2^m, 2, 2^m].
inline DensityOperator naive_state(std::size_t m) {
  if (m < 1 || m > 4) throw std::invalid_argument("naive state supports 1 <= m <= 4");
  auto acc = singlet().projector();
  for (std::size_t i = 1; i < m; ++i) acc = tensor(acc, singlet().projector());
  // (C_0 T_0 C_1 T_1 ...) -> (C_0 C_1 ... T_0 T_1 ...)
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < m; ++i) order.push_back(2 * i);
  for (std::size_t i = 0; i < m; ++i) order.push_back(2 * i + 1);
  const auto ct = permute(acc, order);
  const std::size_t d = std::size_t{1} << m;
  const auto grouped = detail::regroup(ct, {d, d});
  const auto full = tensor(grouped, PureState::basis({2}, 0).projector());  // C T B
  return permute(full, {0, 2, 1});
}

inline std::vector<Link> achievability_trial(const FuzzConfig& cfg, std::size_t trial) {
  RngStream rng(cfg.seed, trial);
  const std::size_t dc = detail::draw_dim(cfg, rng), db = detail::draw_dim(cfg, rng), dt = detail::draw_dim(cfg, rng);
  const auto rho = random_mixed_state({dc, db, dt}, rng);
  const auto r = check_achievability(rho, cfg.tolerance, cfg.entropy);
  return {
      {"gap S(B)+S(T)-S(BT) >= 0", -r.subadditivity_gap, 0.0},
      {"gap S(CBT)+S(T)-S(CB) >= 0", -r.araki_lieb_gap, 0.0},
      {"gap log2 dT - S(T) >= 0", -r.dimension_gap, 0.0},
  };
}

inline FuzzSummary check_achievability_fuzz(const FuzzConfig& cfg) {
  return detail::run_suite("achievability", cfg, [&cfg](std::size_t t) { return achievability_trial(cfg, t); });
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"qicchain", "classical", "sumbound", "achievability"};
  return names;
}

/// Runs a suite by name; throws std::invalid_argument for unknown names.
inline FuzzSummary run_named_suite(const std::string& suite, const FuzzConfig& cfg) {
  if (suite == "qicchain") return check_qic_chain(cfg);
  if (suite == "classical") return check_classical_bound(cfg);
  if (suite == "sumbound") return check_sum_bound_fuzz(cfg);
  if (suite == "achievability") return check_achievability_fuzz(cfg);
  throw std::invalid_argument("unknown suite: " + suite);
}

/// Recomputes the links of one trial from its fingerprint.
inline std::vector<Link> replay(const std::string& suite, const FuzzConfig& cfg, std::size_t trial) {
  if (suite == "qicchain") return qic_chain_trial(cfg, trial);
  if (suite == "classical") return classical_trial(cfg, trial);
  if (suite == "sumbound") return sum_bound_trial(cfg, trial);
  if (suite == "achievability") return achievability_trial(cfg, trial);
  throw std::invalid_argument("unknown suite: " + suite);
}

}  // namespace qic::propcheck
