// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// fails. Usage: acceptance [--only 1,2,...] [--runs DIR]
//
// Tolerances and budgets are fixed below; learning criteria run the default
// Push configuration.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../gradient_check.hpp"
#include "../test_support.hpp"
#include "tactile/config.hpp"
#include "tactile/physics.hpp"
#include "tactile/replay.hpp"
#include "tactile/reward.hpp"
#include "tactile/trainer.hpp"

namespace fs = std::filesystem;
using namespace tactile;
namespace tt = tactile::testing;

namespace {

// Pinned tolerances and budgets.
constexpr double kSamplingCellTol = 0.01;
constexpr double kSamplingRuntimeSec = 10.0;
constexpr long kSamplingDraws = 1'000'000;
constexpr double kHindsightTol = 0.01;
constexpr long kHindsightItems = 100'000;
constexpr double kGradientTol = 1e-6;
constexpr int kGradientTrials = 100;
constexpr int kPhysicsStates = 10'000;
constexpr double kMomentumTol = 1e-12;
constexpr double kLinearityTol = 1e-12;
constexpr double kLearnTarget = 0.8;
constexpr int kLearnSeedsNeeded = 4;
constexpr double kHalfSuccess = 0.5;
constexpr double kRunBudgetSec = 30 * 60;
const std::vector<std::uint64_t> kSeeds{1, 2, 3, 4, 5};

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- 1

Verdict sampling_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  const double eps = 10.0, lambda = 10.0;
  const int T = 5;
  const std::vector<std::optional<int>> onsets{std::nullopt, 0, 3};
  EpisodeBuffer buffer(10, T, eps, lambda);
  for (const auto& o : onsets) buffer.push(tt::synthetic_episode(T, o, eps));

  // Exact joint straight from the weight definition.
  std::vector<std::vector<double>> exact(3, std::vector<double>(T));
  double z = 0.0;
  for (int e = 0; e < 3; ++e)
    for (int t = 0; t < T; ++t) {
      exact[e][t] = onsets[e] && t >= *onsets[e] ? lambda : 1.0;
      z += exact[e][t];
    }
  std::vector<double> exact_marginal(3, 0.0);
  for (int e = 0; e < 3; ++e)
    for (int t = 0; t < T; ++t) {
      exact[e][t] /= z;
      exact_marginal[e] += exact[e][t];
    }

  std::mt19937_64 rng(20240501);
  SamplerSettings s;
  s.batch_size = kSamplingDraws;
  std::vector<std::vector<double>> counts(3, std::vector<double>(T, 0.0));
  for (const auto& item : sample_cper(buffer, s, RewardParams{}, rng)) counts[item.episode][item.t_goal] += 1;

  double worst = 0.0;
  for (int e = 0; e < 3; ++e)
    for (int t = 0; t < T; ++t) worst = std::max(worst, std::abs(counts[e][t] / kSamplingDraws - exact[e][t]));

  const auto marginal = episode_marginal(transition_weights(buffer));
  double marginal_err = 0.0;
  for (int e = 0; e < 3; ++e) {
    marginal_err = std::max(marginal_err, std::abs(marginal[e] - exact_marginal[e]));
    marginal_err = std::max(marginal_err, std::abs(buffer.episode_weight(e) / z - exact_marginal[e]));
  }
  const double secs = seconds_since(t0);
  Verdict v;
  v.pass = worst <= kSamplingCellTol && marginal_err < 1e-15 && secs < kSamplingRuntimeSec;
  v.detail = "max cell error " + fmt("%.5f", worst) + " (tol 0.01), marginal error " +
             fmt("%.1e", marginal_err) + ", " + fmt("%.2f", secs) + " s";
  return v;
}

// ---------------------------------------------------------------- 2

Verdict reward_table() {
  const RewardParams p;
  const double d = 1e-6;
  const double forces[] = {0.0, p.eps_force, p.eps_force + d};
  const double dists[] = {0.0, p.eps_pos - d, p.eps_pos};
  int checked = 0, wrong = 0;
  std::set<double> seen;
  for (double f : forces)
    for (double dist : dists) {
      const double ext = dist < p.eps_pos ? 1.0 : 0.0;
      const double in = f > p.eps_force ? 1.0 : 0.0;
      const double expected = 0.75 * ext + 0.25 * in;
      const double got = combined_reward(Goal{{dist, 0.0}}, Goal{{0.0, 0.0}}, f, p);
      ++checked;
      wrong += got != expected;
      seen.insert(got);
    }
  const std::set<double> want{0.0, 0.25, 0.75, 1.0};
  Verdict v;
  v.pass = wrong == 0 && seen == want && p.w_ext == 0.75 && p.w_int == 0.25;
  v.detail = std::to_string(checked) + " cells, " + std::to_string(wrong) + " mismatches, values {0, 0.25, 0.75, 1}" +
             (seen == want ? " present" : " MISSING");
  return v;
}

// ---------------------------------------------------------------- 3

Verdict hindsight_fraction() {
  const ExperimentConfig c = ExperimentConfig::defaults(Task::Push);
  const RewardParams p = c.effective_reward();
  EpisodeBuffer buffer(c.buffer_episodes, 8, p.eps_force, c.lambda);
  for (int i = 0; i < 6; ++i)
    buffer.push(tt::synthetic_episode(8, i % 3 == 0 ? std::nullopt : std::optional<int>(i), p.eps_force));
  SamplerSettings s;
  s.batch_size = c.ddpg.batch_size;
  s.hindsight_prob = c.hindsight_prob;
  std::mt19937_64 rng(7);
  long total = 0, replaced = 0;
  while (total < kHindsightItems) {
    for (const auto& item : sample_batch(c.sampler(), buffer, s, p, rng)) {
      if (total == kHindsightItems) break;
      ++total;
      replaced += item.hindsight;
    }
  }
  const double frac = static_cast<double>(replaced) / total;
  Verdict v;
  v.pass = std::abs(frac - 0.8) <= kHindsightTol;
  v.detail = "goal-replaced fraction " + fmt("%.4f", frac) + " over " + std::to_string(total) + " items (0.80 +- 0.01)";
  return v;
}

// ---------------------------------------------------------------- 4

Verdict gradient_oracle() {
  std::mt19937_64 rng(4);
  double worst_actor = 0.0, worst_critic = 0.0;
  std::size_t max_params = 0;
  for (int i = 0; i < kGradientTrials; ++i) {
    const auto r = tt::random_gradient_trial(rng);
    worst_actor = std::max(worst_actor, r.actor_error);
    worst_critic = std::max(worst_critic, r.critic_error);
    max_params = std::max({max_params, r.actor_params, r.critic_params});
  }
  Verdict v;
  v.pass = worst_actor < kGradientTol && worst_critic < kGradientTol && max_params <= 50;
  v.detail = std::to_string(kGradientTrials) + " trials, worst relative error actor " + fmt("%.2e", worst_actor) +
             ", critic " + fmt("%.2e", worst_critic) + " (tol 1e-6), <= " + std::to_string(max_params) + " params";
  return v;
}

// ---------------------------------------------------------------- 5

Verdict degeneration() {
  std::mt19937_64 rng(5);
  int buffers = 0, mismatches = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int T = std::uniform_int_distribution<int>(1, 50)(rng);
    const int n = std::uniform_int_distribution<int>(1, 40)(rng);
    EpisodeBuffer buffer(static_cast<std::size_t>(n), T, 10.0, 1.0);
    for (int i = 0; i < n; ++i) {
      const int onset = std::uniform_int_distribution<int>(-1, T - 1)(rng);
      buffer.push(tt::synthetic_episode(T, onset < 0 ? std::nullopt : std::optional<int>(onset), 10.0));
    }
    ++buffers;
    for (double m : episode_marginal(transition_weights(buffer))) mismatches += m != 1.0 / n;
  }
  Verdict v;
  v.pass = mismatches == 0;
  v.detail = std::to_string(buffers) + " random buffers, " + std::to_string(mismatches) +
             " marginals differing from 1/N (exact comparison)";
  return v;
}

// ---------------------------------------------------------------- 9

Verdict physics_suite() {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0), unit(0.0, 1.0);
  int failures = 0;
  std::string first_failure;
  auto fail = [&](const std::string& what) {
    if (failures++ == 0) first_failure = what;
  };

  // Third law: with actuation, damping and friction off, one step conserves
  // momentum exactly up to rounding.
  {
    PhysicsConfig c = PhysicsConfig::defaults(Task::Push);
    c.mu = 0.0;
    c.eff_damping = 0.0;
    const std::vector<double> zero{0.0, 0.0};
    int contacts = 0;
    for (int i = 0; i < kPhysicsStates; ++i) {
      PhysicsState s;
      s.obj_pos = {0.1 * u(rng), 0.1 * u(rng)};
      const double ang = M_PI * u(rng);
      const double sep = (c.eff_radius + c.obj_radius) * (0.7 + 0.5 * unit(rng));
      s.eff_pos = {s.obj_pos[0] + sep * std::cos(ang), s.obj_pos[1] + sep * std::sin(ang)};
      s.eff_vel = {0.3 * u(rng), 0.3 * u(rng)};
      s.obj_vel = {0.3 * u(rng), 0.3 * u(rng)};
      contacts += contact_force(s, c) > 0.0;
      const PhysicsState n = integrate(s, zero, c);
      for (int k = 0; k < 2; ++k) {
        const double before = c.m_eff * s.eff_vel[k] + c.m_obj * s.obj_vel[k];
        const double after = c.m_eff * n.eff_vel[k] + c.m_obj * n.obj_vel[k];
        if (std::abs(after - before) > kMomentumTol) fail("momentum not conserved");
      }
    }
    if (contacts < kPhysicsStates / 4) fail("too few contact states sampled");
  }

  // Friction: a free-sliding object never speeds up, never reverses, and
  // higher friction leaves it slower.
  {
    PhysicsConfig lo = PhysicsConfig::defaults(Task::Push);
    const std::vector<double> zero{0.0, 0.0};
    for (int i = 0; i < kPhysicsStates; ++i) {
      PhysicsState s;
      s.eff_pos = {-0.2, 0.25};
      s.obj_pos = {0.15 * u(rng), 0.15 * u(rng)};
      s.obj_vel = {u(rng), u(rng)};
      lo.mu = 0.5 * unit(rng);
      PhysicsConfig hi = lo;
      hi.mu = lo.mu + 0.01 + 0.5 * unit(rng);
      const PhysicsState a = integrate(s, zero, lo);
      const PhysicsState b = integrate(s, zero, hi);
      const double v0 = std::hypot(s.obj_vel[0], s.obj_vel[1]);
      const double va = std::hypot(a.obj_vel[0], a.obj_vel[1]);
      const double vb = std::hypot(b.obj_vel[0], b.obj_vel[1]);
      if (va > v0) fail("friction increased speed");
      if (vb > va) fail("friction not monotone in mu");
      for (int k = 0; k < 2; ++k)
        if (a.obj_vel[k] * s.obj_vel[k] < 0.0 || b.obj_vel[k] * s.obj_vel[k] < 0.0) fail("friction reversed velocity");
    }
  }

  // Linearity: force equals k_n times the analytic overlap; doubling the
  // overlap doubles the force.
  {
    const PhysicsConfig c = PhysicsConfig::defaults(Task::Push);
    const double rsum = c.eff_radius + c.obj_radius;
    for (int i = 0; i < kPhysicsStates; ++i) {
      const double delta = 0.45 * rsum * unit(rng) + 1e-6;
      const double ang = M_PI * u(rng);
      PhysicsState s1, s2;
      s1.obj_pos = s2.obj_pos = {0.1 * u(rng), 0.1 * u(rng)};
      s1.eff_pos = {s1.obj_pos[0] + (rsum - delta) * std::cos(ang), s1.obj_pos[1] + (rsum - delta) * std::sin(ang)};
      s2.eff_pos = {s2.obj_pos[0] + (rsum - 2 * delta) * std::cos(ang), s2.obj_pos[1] + (rsum - 2 * delta) * std::sin(ang)};
      const double f1 = contact_force(s1, c), f2 = contact_force(s2, c);
      if (std::abs(f1 - c.k_n * delta) > kLinearityTol * c.k_n) fail("force differs from k_n * overlap");
      if (std::abs(f2 - 2.0 * f1) > kLinearityTol * c.k_n) fail("force not linear in overlap");
      PhysicsState apart = s1;
      apart.eff_pos = {s1.obj_pos[0] + (rsum + delta) * std::cos(ang), s1.obj_pos[1] + (rsum + delta) * std::sin(ang)};
      if (contact_force(apart, c) != 0.0) fail("force without overlap");
    }
  }

  // Slide: every goal is flagged unreachable, and no object position the
  // effector can touch from inside its workspace is.
  {
    const PhysicsConfig c = PhysicsConfig::defaults(Task::Slide);
    const ReachabilityPredicate unreachable = slide_reachability(c);
    const Difficulty levels[] = {Difficulty::Simple, Difficulty::Intermediate, Difficulty::Hard};
    for (int i = 0; i < kPhysicsStates; ++i) {
      const Goal g = sample_goal(levels[i % 3], c, rng);
      if (!unreachable(g)) fail("slide goal judged reachable");
      const Vec2 eff = c.eff_workspace.sample(rng);
      const double ang = M_PI * u(rng);
      const double sep = (c.eff_radius + c.obj_radius) * unit(rng);
      const Goal touched{{eff[0] + sep * std::cos(ang), eff[1] + sep * std::sin(ang)}};
      if (unreachable(touched)) fail("touchable object position judged unreachable");
    }
  }

  Verdict v;
  v.pass = failures == 0;
  v.detail = "4 properties x " + std::to_string(kPhysicsStates) + " states, " + std::to_string(failures) +
             " violations" + (failures ? " (first: " + first_failure + ")" : "");
  return v;
}

// ---------------------------------------------------------------- 6, 7, 8

struct RunResult {
  std::vector<MetricsRow> rows;
  double seconds = 0.0;
};

int epochs_to(const std::vector<MetricsRow>& rows, double level, int censor) {
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].eval_success >= level) return static_cast<int>(i) + 1;
  return censor;
}

double best_eval(const std::vector<MetricsRow>& rows) {
  double b = 0.0;
  for (const auto& r : rows) b = std::max(b, r.eval_success);
  return b;
}

ExperimentConfig push_config(Arm arm, Difficulty level, std::uint64_t seed) {
  ExperimentConfig c = ExperimentConfig::defaults(Task::Push);
  c.arm = arm;
  c.difficulty = level;
  c.seed = seed;
  return c;
}

// Runs until `stop_at` eval success is reached (the recorded prefix is
// identical to a full run's) or the epoch budget is spent.
RunResult learning_run(const ExperimentConfig& c, double stop_at, const fs::path& runs) {
  RunOptions opts;
  opts.output_dir = runs / run_name(c);
  opts.stop = [stop_at](const MetricsRow& r) { return r.eval_success >= stop_at; };
  const auto t0 = std::chrono::steady_clock::now();
  RunResult r;
  r.rows = run_experiment(c, opts);
  r.seconds = seconds_since(t0);
  std::printf("    run %-32s epochs %2zu  best eval %.2f  to-0.5 %2d  %.0f s\n", run_name(c).c_str(), r.rows.size(),
              best_eval(r.rows), epochs_to(r.rows, kHalfSuccess, c.epochs + 1), r.seconds);
  std::fflush(stdout);
  return r;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct LearningState {
  fs::path runs;
  std::map<std::string, RunResult> cache;

  const RunResult& get(const ExperimentConfig& c, double stop_at) {
    const std::string key = run_name(c);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, learning_run(c, stop_at, runs)).first;
    return it->second;
  }
};

Verdict determinism(LearningState& state) {
  const ExperimentConfig c = push_config(Arm::CperIr, Difficulty::Simple, kSeeds[0]);
  const fs::path a = state.runs / "determinism-a", b = state.runs / "determinism-b";
  const auto t0 = std::chrono::steady_clock::now();
  RunOptions oa, ob;
  oa.output_dir = a;
  ob.output_dir = b;
  RunResult first;
  first.rows = run_experiment(c, oa);
  first.seconds = seconds_since(t0);
  run_experiment(c, ob);
  // The full run doubles as the seed-1 learning run.
  state.cache.emplace(run_name(c), first);
  const std::string ca = read_file(a / "metrics.csv"), cb = read_file(b / "metrics.csv");
  Verdict v;
  v.pass = !ca.empty() && ca == cb;
  v.detail = "two " + std::to_string(c.epochs) + "-epoch Push-Simple runs, metrics.csv " +
             std::to_string(ca.size()) + " bytes, " + (ca == cb ? "byte-identical" : "DIFFERENT") + ", " +
             fmt("%.0f", seconds_since(t0)) + " s";
  return v;
}

Verdict desk_scale_learning(LearningState& state) {
  int reached = 0;
  double cper_sum = 0.0, her_sum = 0.0, slowest = 0.0;
  std::string per_seed;
  for (std::uint64_t seed : kSeeds) {
    const ExperimentConfig c = push_config(Arm::CperIr, Difficulty::Simple, seed);
    const RunResult& r = state.get(c, kLearnTarget);
    reached += best_eval(r.rows) >= kLearnTarget;
    const int e = epochs_to(r.rows, kHalfSuccess, c.epochs + 1);
    cper_sum += e;
    per_seed += (per_seed.empty() ? "" : " ") + std::to_string(e);
    slowest = std::max(slowest, r.seconds * c.epochs / static_cast<double>(r.rows.size()));
  }
  std::string her_seeds;
  for (std::uint64_t seed : kSeeds) {
    const ExperimentConfig c = push_config(Arm::Her, Difficulty::Simple, seed);
    const RunResult& r = state.get(c, kHalfSuccess);
    const int e = epochs_to(r.rows, kHalfSuccess, c.epochs + 1);
    her_sum += e;
    her_seeds += (her_seeds.empty() ? "" : " ") + std::to_string(e);
    slowest = std::max(slowest, r.seconds * c.epochs / static_cast<double>(r.rows.size()));
  }
  const double n = static_cast<double>(kSeeds.size());
  Verdict v;
  v.pass = reached >= kLearnSeedsNeeded && cper_sum / n < her_sum / n && slowest <= kRunBudgetSec;
  v.detail = "(a) CPER+IR >= 0.8 on " + std::to_string(reached) + "/5 seeds; (b) epochs to 0.5: CPER+IR " +
             fmt("%.1f", cper_sum / n) + " [" + per_seed + "] vs HER " + fmt("%.1f", her_sum / n) + " [" + her_seeds +
             "] (51 = never); worst projected 50-epoch run " + fmt("%.0f", slowest) + " s";
  return v;
}

Verdict difficulty_ordering(LearningState& state) {
  const Difficulty levels[] = {Difficulty::Simple, Difficulty::Intermediate, Difficulty::Hard};
  double means[3] = {0, 0, 0};
  for (int l = 0; l < 3; ++l) {
    for (std::uint64_t seed : kSeeds) {
      const ExperimentConfig c = push_config(Arm::CperIr, levels[l], seed);
      // Simple runs are shared with the learning criterion and stop at 0.8.
      const RunResult& r = state.get(c, l == 0 ? kLearnTarget : kHalfSuccess);
      means[l] += epochs_to(r.rows, kHalfSuccess, c.epochs + 1);
    }
    means[l] /= static_cast<double>(kSeeds.size());
  }
  Verdict v;
  v.pass = means[0] <= means[1] && means[1] <= means[2];
  v.detail = "mean epochs to 0.5: simple " + fmt("%.1f", means[0]) + ", intermediate " + fmt("%.1f", means[1]) +
             ", hard " + fmt("%.1f", means[2]) + " (51 = never)";
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  fs::path runs = fs::temp_directory_path() / "tactile-acceptance";
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--only" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      for (std::string tok; std::getline(ss, tok, ',');) only.insert(std::stoi(tok));
    } else if (arg == "--runs" && i + 1 < argc) {
      runs = argv[++i];
    } else {
      std::fprintf(stderr, "usage: acceptance [--only 1,2,...] [--runs DIR]\n");
      return 2;
    }
  }
  fs::remove_all(runs);
  fs::create_directories(runs);
  LearningState state{runs, {}};

  struct Criterion {
    int id;
    const char* name;
    std::function<Verdict()> check;
  };
  const std::vector<Criterion> criteria{
      {1, "sampling-distribution oracle", sampling_oracle},
      {2, "reward-function exactness", reward_table},
      {3, "hindsight fraction", hindsight_fraction},
      {4, "gradient oracle", gradient_oracle},
      {5, "degeneration equivalence", degeneration},
      {6, "determinism", [&] { return determinism(state); }},
      {7, "desk-scale learning", [&] { return desk_scale_learning(state); }},
      {8, "difficulty ordering", [&] { return difficulty_ordering(state); }},
      {9, "physics sanity", physics_suite},
  };

  int failed = 0, ran = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    ++ran;
    failed += !v.pass;
    std::printf("[%s] criterion %d %s: %s\n", v.pass ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", ran - failed, ran);
  return failed == 0 ? 0 : 1;
}
