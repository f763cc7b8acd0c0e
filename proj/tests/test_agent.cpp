#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "gradient_check.hpp"
#include "tactile/agent.hpp"
#include "tactile/errors.hpp"
#include "tactile/mlp.hpp"
#include "tactile/normalizer.hpp"
#include "tactile/optimizer.hpp"

using namespace tactile;
namespace tt = tactile::testing;

TEST(Mlp, ForwardMatchesReference) {
  std::mt19937_64 rng(1);
  Mlp net({5, 7, 6, 3}, OutputActivation::Tanh);
  net.initialize(rng);
  Matrix x(9, 5);
  std::normal_distribution<double> n(0.0, 1.0);
  for (double& v : x.flat()) v = n(rng);
  const Matrix y = net.forward(x);
  const auto ref = tt::reference_forward(net, x);
  for (std::size_t i = 0; i < y.size(); ++i) EXPECT_NEAR(y.flat()[i], ref.out.flat()[i], 1e-13);
  Mlp::Trace trace;
  net.forward(x, trace);
  EXPECT_EQ(trace.activations.back(), y);
  for (std::size_t i = 0; i < y.size(); ++i)
    EXPECT_NEAR(trace.output_preactivation.flat()[i], ref.out_pre.flat()[i], 1e-13);
}

TEST(Mlp, InitializationBounds) {
  std::mt19937_64 rng(2);
  Mlp net({16, 8, 1}, OutputActivation::Identity);
  net.initialize(rng);
  for (double w : net.weights(0)) EXPECT_LE(std::abs(w), 1.0 / std::sqrt(16.0));
  for (double w : net.weights(1)) EXPECT_LE(std::abs(w), 1.0 / std::sqrt(8.0));
  for (double b : net.bias(0)) EXPECT_EQ(b, 0.0);
  EXPECT_EQ(net.parameter_count(), 16u * 8 + 8 + 8 + 1);
}

TEST(Gradient, AnalyticMatchesFiniteDifferences) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    const auto r = tt::random_gradient_trial(rng);
    ASSERT_LE(r.actor_params, 50u);
    ASSERT_LE(r.critic_params, 50u);
    ASSERT_LT(r.actor_error, 1e-6) << "trial " << trial;
    ASSERT_LT(r.critic_error, 1e-6) << "trial " << trial;
  }
}

TEST(Gradient, ObjectivesMatchReference) {
  std::mt19937_64 rng(3);
  Mlp actor({3, 4, 2}, OutputActivation::Tanh), critic({5, 4, 1}, OutputActivation::Identity);
  actor.initialize(rng);
  critic.initialize(rng);
  NetworkBatch b;
  b.state = Matrix(4, 3, 0.3);
  b.state(1, 2) = -1.0;
  b.action = Matrix(4, 2, 0.1);
  b.reward = {0, 1, 0, 1};
  const std::vector<double> y{0.5, -0.2, 1.0, 0.0};
  EXPECT_NEAR(critic_loss(critic, b, y), tt::ref_critic_loss(critic, b, y), 1e-13);
  EXPECT_NEAR(actor_objective(actor, critic, b, 0.7), tt::ref_actor_objective(actor, critic, b, 0.7),
              1e-13);
}

TEST(Agent, SoftUpdate) {
  std::mt19937_64 rng(4);
  Mlp a({2, 3, 1}, OutputActivation::Identity), b({2, 3, 1}, OutputActivation::Identity);
  a.initialize(rng);
  b.initialize(rng);
  Mlp t = a;
  soft_update(t, b, 0.25);
  for (std::size_t i = 0; i < t.parameter_count(); ++i)
    EXPECT_NEAR(t.parameters()[i], 0.75 * a.parameters()[i] + 0.25 * b.parameters()[i], 1e-15);
  soft_update(t, b, 1.0);
  for (std::size_t i = 0; i < t.parameter_count(); ++i) EXPECT_EQ(t.parameters()[i], b.parameters()[i]);
  Mlp other({2, 4, 1}, OutputActivation::Identity);
  EXPECT_THROW(soft_update(other, a, 0.5), UsageError);
  EXPECT_THROW(soft_update(t, b, 1.5), UsageError);
}

TEST(Agent, TdTargetsAreClamped) {
  DdpgHyper h;
  h.hidden = {4};
  h.q_clip_low = 0.0;
  h.q_clip_high = 2.0;
  std::mt19937_64 rng(5);
  Mlp actor({2, 4, 1}, OutputActivation::Tanh), critic({3, 4, 1}, OutputActivation::Identity);
  actor.initialize(rng);
  critic.initialize(rng);
  // Constant critic output via the bias: Q' = 1.5 everywhere.
  for (double& p : critic.weights(1)) p = 0.0;
  critic.bias(1)[0] = 1.5;
  NetworkBatch b;
  b.state = b.next_state = Matrix(3, 2, 0.2);
  b.action = Matrix(3, 1, 0.0);
  b.reward = {0.0, 1.0, -5.0};
  const auto y = td_targets(b, actor, critic, h);
  EXPECT_NEAR(y[0], 0.98 * 1.5, 1e-12);
  EXPECT_EQ(y[1], 2.0);
  EXPECT_EQ(y[2], 0.0);
}

TEST(Agent, CriticStepReducesLossAndActorStepRaisesObjective) {
  DdpgHyper h;
  h.hidden = {16, 16};
  h.lr_critic = 1e-3;
  h.lr_actor = 1e-3;
  DdpgAgent agent({3, 2, 2}, h, 9);
  std::mt19937_64 rng(6);
  std::normal_distribution<double> n(0.0, 1.0);
  NetworkBatch b;
  b.state = Matrix(32, 5);
  b.next_state = Matrix(32, 5);
  b.action = Matrix(32, 2);
  for (double& v : b.state.flat()) v = n(rng);
  for (double& v : b.action.flat()) v = std::tanh(n(rng));
  b.reward.assign(32, 1.0);
  const std::vector<double> y(32, 3.0);
  const double before = critic_loss(agent.critic(), b, y);
  for (int i = 0; i < 20; ++i) agent.critic_update(b, y);
  EXPECT_LT(critic_loss(agent.critic(), b, y), before);
  const double j0 = actor_objective(agent.actor(), agent.critic(), b, h.action_l2);
  for (int i = 0; i < 20; ++i) agent.actor_update(b);
  EXPECT_GT(actor_objective(agent.actor(), agent.critic(), b, h.action_l2), j0);
}

TEST(Agent, ExploreBoundsAndRandomFraction) {
  DdpgHyper h;
  h.hidden = {8};
  h.random_eps = 0.3;
  h.noise_sigma = 0.0;
  DdpgAgent agent({2, 2, 2}, h, 1);
  std::mt19937_64 rng(7);
  const std::vector<double> obs{0.1, 0.2}, goal{0.3, 0.4};
  const Action greedy = agent.act(obs, goal);
  int random = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const Action a = agent.explore(obs, goal, rng);
    for (double v : a) ASSERT_TRUE(v >= -1.0 && v <= 1.0);
    random += a != greedy;
  }
  EXPECT_NEAR(static_cast<double>(random) / n, 0.3, 0.015);
}

TEST(Agent, ExplorationNoiseIsGaussian) {
  // With no random actions and a near-zero policy, unclamped noise should be
  // N(a, sigma^2); Kolmogorov-Smirnov against the normal CDF.
  DdpgHyper h;
  h.hidden = {8};
  h.random_eps = 0.0;
  h.noise_sigma = 0.1;
  DdpgAgent agent({1, 1, 1}, h, 3);
  for (double& p : agent.actor().parameters()) p = 0.0;
  std::mt19937_64 rng(8);
  std::vector<double> s;
  for (int i = 0; i < 5000; ++i) s.push_back(agent.explore(std::vector<double>{0.0}, std::vector<double>{0.0}, rng)[0]);
  std::sort(s.begin(), s.end());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double cdf = 0.5 * std::erfc(-s[i] / (0.1 * std::sqrt(2.0)));
    d = std::max({d, std::abs(cdf - static_cast<double>(i) / s.size()),
                  std::abs(cdf - static_cast<double>(i + 1) / s.size())});
  }
  EXPECT_LT(d, 1.63 / std::sqrt(5000.0));  // 1% critical value
}

TEST(Normalizer, RunningStatistics) {
  Normalizer norm(2, 5.0, 1e-2);
  EXPECT_EQ(norm.mean()[0], 0.0);
  EXPECT_EQ(norm.stddev()[0], 1.0);
  Matrix samples(4, 2);
  const double xs[4] = {1, 2, 3, 4};
  for (int i = 0; i < 4; ++i) {
    samples(i, 0) = xs[i];
    samples(i, 1) = 7.0;
  }
  norm.update(samples);
  EXPECT_DOUBLE_EQ(norm.mean()[0], 2.5);
  EXPECT_DOUBLE_EQ(norm.stddev()[0], std::sqrt(1.25));
  EXPECT_DOUBLE_EQ(norm.stddev()[1], 1e-2);  // floored
  const auto z = norm.normalize(std::vector<double>{2.5, 100.0});
  EXPECT_DOUBLE_EQ(z[0], 0.0);
  EXPECT_EQ(z[1], 5.0);  // clipped
}

TEST(Optimizer, SgdAndAdamSteps) {
  std::vector<double> p{1.0, -2.0};
  const std::vector<double> g{0.5, -1.0};
  Optimizer sgd(OptimizerKind::Sgd, 0.1, 2);
  sgd.step(p, g);
  EXPECT_DOUBLE_EQ(p[0], 0.95);
  EXPECT_DOUBLE_EQ(p[1], -1.9);
  // First bias-corrected Adam step moves every coordinate by ~lr * sign(g).
  std::vector<double> q{1.0, -2.0};
  Optimizer adam(OptimizerKind::Adam, 0.01, 2);
  adam.step(q, g);
  EXPECT_NEAR(q[0], 0.99, 1e-7);
  EXPECT_NEAR(q[1], -1.99, 1e-7);
  EXPECT_EQ(parse_optimizer("adam"), OptimizerKind::Adam);
  EXPECT_THROW(parse_optimizer("rmsprop"), ConfigError);
}

TEST(Agent, RejectsBadHyperparameters) {
  DdpgHyper h;
  h.gamma = 1.0;
  EXPECT_THROW(h.validate(), ConfigError);
  h = DdpgHyper{};
  h.hidden = {};
  EXPECT_THROW(DdpgAgent({2, 2, 2}, h, 1), ConfigError);
}

TEST(Agent, ZeroDiscountTargetIsReward) {
  DdpgHyper h;
  h.gamma = 0.0;  // td_targets itself does not validate; gamma 0 isolates r
  h.q_clip_low = -100.0;
  h.q_clip_high = 100.0;
  std::mt19937_64 rng(10);
  Mlp actor({2, 4, 1}, OutputActivation::Tanh), critic({3, 4, 1}, OutputActivation::Identity);
  actor.initialize(rng);
  critic.initialize(rng);
  NetworkBatch b;
  b.state = b.next_state = Matrix(4, 2, 0.7);
  b.action = Matrix(4, 1, 0.0);
  b.reward = {0.0, 0.25, 0.75, 1.0};
  const auto y = td_targets(b, actor, critic, h);
  for (std::size_t i = 0; i < y.size(); ++i) EXPECT_EQ(y[i], b.reward[i]);

  // Zero target critic: y = r exactly for any gamma.
  h.gamma = 0.98;
  for (double& p : critic.parameters()) p = 0.0;
  const auto y2 = td_targets(b, actor, critic, h);
  for (std::size_t i = 0; i < y2.size(); ++i) EXPECT_EQ(y2[i], b.reward[i]);
}

TEST(Agent, TargetsStayInClipRangeProperty) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  DdpgHyper h;
  h.q_clip_low = 0.0;
  h.q_clip_high = 1.0 / (1.0 - h.gamma);
  for (int trial = 0; trial < 200; ++trial) {
    Mlp actor({2, 3, 1}, OutputActivation::Tanh), critic({3, 3, 1}, OutputActivation::Identity);
    for (double& p : actor.parameters()) p = u(rng) * 10.0;
    for (double& p : critic.parameters()) p = u(rng) * 10.0;
    NetworkBatch b;
    b.state = b.next_state = Matrix(5, 2);
    for (double& v : b.next_state.flat()) v = u(rng);
    b.action = Matrix(5, 1, 0.0);
    for (int i = 0; i < 5; ++i) b.reward.push_back((rng() % 5) * 0.25);
    for (double y : td_targets(b, actor, critic, h)) {
      ASSERT_GE(y, h.q_clip_low);
      ASSERT_LE(y, h.q_clip_high);
    }
  }
}

TEST(Agent, ZeroParametersGiveZeroOutputs) {
  Mlp actor({4, 8, 2}, OutputActivation::Tanh), critic({6, 8, 1}, OutputActivation::Identity);
  const std::vector<double> obs{1.0, -2.0, 3.0}, goal{0.5}, act{0.3, -0.3};
  const Action a = actor_forward(actor, obs, goal);
  EXPECT_EQ(a, (Action{0.0, 0.0}));
  EXPECT_EQ(critic_forward(critic, obs, goal, act), 0.0);
  EXPECT_THROW(critic_forward(critic, obs, goal, std::vector<double>{0.1}), UsageError);
}

TEST(Agent, SingleLinearCriticIsDotProduct) {
  Mlp critic({3, 1}, OutputActivation::Identity);
  critic.weights(0)[0] = 2.0;
  critic.weights(0)[1] = -1.0;
  critic.weights(0)[2] = 0.5;
  critic.bias(0)[0] = 0.25;
  const std::vector<double> obs{1.0}, goal{3.0}, act{4.0};
  EXPECT_DOUBLE_EQ(critic_forward(critic, obs, goal, act), 2.0 - 3.0 + 2.0 + 0.25);
}

TEST(Agent, GradientsVanishAtStationaryPoints) {
  std::mt19937_64 rng(12);
  Mlp actor({2, 4, 1}, OutputActivation::Tanh), critic({3, 4, 1}, OutputActivation::Identity);
  actor.initialize(rng);
  critic.initialize(rng);
  NetworkBatch b;
  b.state = Matrix(6, 2);
  std::normal_distribution<double> n(0.0, 1.0);
  for (double& v : b.state.flat()) v = n(rng);
  b.action = Matrix(6, 1, 0.2);
  b.reward.assign(6, 0.0);

  // Targets equal to current Q: zero critic gradient.
  std::vector<double> y;
  for (std::size_t i = 0; i < 6; ++i) {
    const double s[2] = {b.state(i, 0), b.state(i, 1)};
    y.push_back(critic_forward(critic, std::span<const double>(s, 1), std::span<const double>(s + 1, 1),
                               std::vector<double>{0.2}));
  }
  std::vector<double> g(critic.parameter_count(), 0.0);
  critic_loss_gradient(critic, b, y, g);
  for (double v : g) EXPECT_NEAR(v, 0.0, 1e-14);

  // Critic independent of the action and no penalty: zero actor gradient.
  for (std::size_t r = 0; r < 4; ++r) critic.weights(0)[2 * 4 + r] = 0.0;  // input-major
  std::vector<double> ga(actor.parameter_count(), 0.0);
  actor_objective_gradient(actor, critic, b, 0.0, ga);
  for (double v : ga) EXPECT_EQ(v, 0.0);
}

TEST(Agent, FullyRandomExplorationIsUniform) {
  DdpgHyper h;
  h.hidden = {8};
  h.random_eps = 1.0;
  DdpgAgent agent({1, 1, 1}, h, 4);
  std::mt19937_64 rng(13);
  std::vector<double> s;
  const int n = 100000;
  for (int i = 0; i < n; ++i) s.push_back(agent.explore(std::vector<double>{0.0}, std::vector<double>{0.0}, rng)[0]);
  std::sort(s.begin(), s.end());
  double d = 0.0;
  for (int i = 0; i < n; ++i) {
    const double cdf = (s[i] + 1.0) / 2.0;
    d = std::max({d, std::abs(cdf - static_cast<double>(i) / n), std::abs(cdf - static_cast<double>(i + 1) / n)});
  }
  EXPECT_LT(d, 1.63 / std::sqrt(static_cast<double>(n)));
}

TEST(Agent, NoNoiseExplorationIsGreedy) {
  DdpgHyper h;
  h.hidden = {8};
  h.random_eps = 0.0;
  h.noise_sigma = 0.0;
  DdpgAgent agent({2, 2, 2}, h, 5);
  std::mt19937_64 rng(14);
  const std::vector<double> obs{0.4, -0.1}, goal{0.2, 0.9};
  for (int i = 0; i < 10; ++i) EXPECT_EQ(agent.explore(obs, goal, rng), agent.act(obs, goal));
}

TEST(Agent, TargetDriftIsBoundedByPolyakRate) {
  // After k soft updates toward a fixed online net, the gap shrinks exactly
  // by (1 - tau)^k.
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> tau_dist(0.01, 0.9);
  for (int trial = 0; trial < 50; ++trial) {
    Mlp online({3, 5, 1}, OutputActivation::Identity), target({3, 5, 1}, OutputActivation::Identity);
    online.initialize(rng);
    target.initialize(rng);
    const double tau = tau_dist(rng);
    const int k = 1 + static_cast<int>(rng() % 20);
    std::vector<double> gap0(online.parameter_count());
    for (std::size_t i = 0; i < gap0.size(); ++i) gap0[i] = target.parameters()[i] - online.parameters()[i];
    for (int s = 0; s < k; ++s) soft_update(target, online, tau);
    const double factor = std::pow(1.0 - tau, k);
    for (std::size_t i = 0; i < gap0.size(); ++i) {
      const double gap = target.parameters()[i] - online.parameters()[i];
      ASSERT_LE(std::abs(gap), std::abs(gap0[i]) * factor + 1e-12);
    }
  }
  Mlp a({2, 2, 1}, OutputActivation::Identity), b({2, 2, 1}, OutputActivation::Identity);
  a.initialize(rng);
  b.initialize(rng);
  const Mlp before = a;
  soft_update(a, b, 0.0);
  for (std::size_t i = 0; i < a.parameter_count(); ++i) EXPECT_EQ(a.parameters()[i], before.parameters()[i]);
}

TEST(Normalizer, KnownStreams) {
  Normalizer norm(1, 5.0, 1e-2);
  Matrix m(2, 1);
  m(0, 0) = 0.0;
  m(1, 0) = 2.0;
  norm.update(m);
  EXPECT_DOUBLE_EQ(norm.mean()[0], 1.0);
  EXPECT_DOUBLE_EQ(norm.stddev()[0], 1.0);
  EXPECT_DOUBLE_EQ(norm.normalize(std::vector<double>{2.0})[0], 1.0);

  Normalizer constant(1, 5.0, 1e-2);
  Matrix c(50, 1, 3.0);
  constant.update(c);
  EXPECT_EQ(constant.normalize(std::vector<double>{3.0})[0], 0.0);
  EXPECT_TRUE(std::isfinite(constant.normalize(std::vector<double>{4.0})[0]));
}
