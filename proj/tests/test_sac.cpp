#include <gtest/gtest.h>

#include <cmath>

#include "adagamma/env/corridor.hpp"
#include "adagamma/env/pendulum.hpp"
#include "adagamma/numerics/grad_check.hpp"
#include "adagamma/sac/agent.hpp"
#include "adagamma/sac/train.hpp"

using namespace adagamma;
using namespace adagamma::sac;

namespace {

// synthetic episodes: lengths[i] transitions, last one terminal unless the
// episode represents a horizon truncation
void fill_buffer(ReplayBuffer& buf, const std::vector<int>& lengths,
                 const std::vector<bool>& terminal_end, Rng& rng) {
    for (std::size_t e = 0; e < lengths.size(); ++e) {
        for (int k = 0; k < lengths[e]; ++k) {
            Transition t;
            t.s = {static_cast<double>(e), static_cast<double>(k)};
            t.a = {rng.uniform(-1.0, 1.0)};
            t.r = rng.uniform(-1.0, 1.0);
            t.s_next = {static_cast<double>(e), static_cast<double>(k + 1)};
            t.terminal = terminal_end[e] && k == lengths[e] - 1;
            t.episode = e;
            t.step_index = k;
            buf.push(t);
        }
    }
}

Params tiny_params(GammaVariant variant = GammaVariant::kAdaGammaRc) {
    Params p;
    p.hidden = 8;
    p.replay_capacity = 4096;
    p.min_buffer = 64;
    p.batch_size = 16;
    p.gamma.variant = variant;
    p.gamma.hidden = 8;
    p.gamma.warmup_steps = 128;
    p.gamma.update_every = 4;
    p.gamma.nstep = 3;
    p.gamma.ref_period = 2;
    return p;
}

} // namespace

TEST(ReplayBuffer, WindowsRespectEpisodeBoundaries) {
    Rng rng(1);
    ReplayBuffer buf(1024);
    fill_buffer(buf, {5, 3, 7, 1, 4}, {true, false, true, true, false}, rng);
    Rng sampler(2);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t start =
            static_cast<std::size_t>(sampler.uniform_int(0, static_cast<long>(buf.size()) - 1));
        const NStepWindow w = buf.extract_window(start, 4);
        const Transition& head = buf.at(start);
        ASSERT_GE(w.rewards.size(), 1u);
        ASSERT_LE(w.rewards.size(), 4u);
        // every reward in the window comes from the same episode, in order
        for (std::size_t k = 0; k < w.rewards.size(); ++k) {
            const Transition& t = buf.at(start + k);
            ASSERT_EQ(t.episode, head.episode);
            ASSERT_EQ(t.step_index, head.step_index + static_cast<int>(k));
            ASSERT_DOUBLE_EQ(w.rewards[k], t.r);
        }
        const Transition& tail = buf.at(start + w.rewards.size() - 1);
        ASSERT_EQ(w.tail_terminal, tail.terminal);
        ASSERT_EQ(w.sn, tail.s_next);
        // a window shorter than n ends at a terminal or at the episode tail
        if (w.rewards.size() < 4u && !w.tail_terminal) {
            const std::size_t next = start + w.rewards.size();
            ASSERT_TRUE(next >= buf.size() || buf.at(next).episode != head.episode);
        }
    }
}

TEST(ReplayBuffer, WindowStopsAtRingOverwrite) {
    Rng rng(3);
    ReplayBuffer buf(8); // tiny ring; one long episode wraps repeatedly
    for (int k = 0; k < 29; ++k) {
        Transition t;
        t.s = {static_cast<double>(k)};
        t.a = {0.0};
        t.r = static_cast<double>(k);
        t.s_next = {static_cast<double>(k + 1)};
        t.terminal = false;
        t.episode = 0;
        t.step_index = k;
        buf.push(t);
    }
    ASSERT_EQ(buf.size(), 8u);
    for (std::size_t start = 0; start < 8; ++start) {
        const NStepWindow w = buf.extract_window(start, 5);
        // rewards must be consecutive step indices
        for (std::size_t k = 1; k < w.rewards.size(); ++k)
            ASSERT_DOUBLE_EQ(w.rewards[k], w.rewards[k - 1] + 1.0);
    }
}

TEST(ReplayBuffer, TerminalHeadGivesSingleStepWindow) {
    Rng rng(4);
    ReplayBuffer buf(64);
    fill_buffer(buf, {3, 2}, {true, true}, rng);
    const NStepWindow w = buf.extract_window(2, 4); // last transition of episode 0
    EXPECT_EQ(w.rewards.size(), 1u);
    EXPECT_TRUE(w.tail_terminal);
    EXPECT_TRUE(w.first_terminal());
}

TEST(SacTarget, TerminalMasksBootstrap) {
    Rng rng(5);
    Mlp policy(2, 8, 8, 2, rng), q1(3, 8, 8, 1, rng), q2(3, 8, 8, 1, rng);
    Transition t;
    t.s = {0.1, 0.2};
    t.a = {0.5};
    t.r = 1.25;
    t.s_next = {0.3, -0.4};
    t.terminal = true;
    std::vector<const Transition*> batch{&t};
    Matrix noise(1, 1);
    noise(0, 0) = 0.7;
    const TargetInfo info = build_targets(policy, q1, q2, batch, noise, {0.97}, 0.2, 0.0, 1.0);
    EXPECT_DOUBLE_EQ(info.targets[0], 1.25);
}

TEST(SacTarget, BootstrapArithmetic) {
    // zero-logit gamma net over [0.9, 0.999]: gamma = 0.9495; with r=1,
    // min target Q = 2, log pi = -0.5, alpha = 0.2 the target is
    // 1 + 0.9495 * (2 + 0.1) = 2.99395
    const double gamma = 0.9 + 0.099 * 0.5;
    const double target = 1.0 + gamma * (2.0 - 0.2 * (-0.5));
    EXPECT_NEAR(target, 2.99395, 1e-12);

    // the same composition through build_targets with constant-output nets
    Mlp policy(2, 4, 4, 2); // zero net: mu = 0, raw log std = 0
    Mlp q1(3, 4, 4, 1), q2(3, 4, 4, 1);
    *q1.last_layer_bias() = 2.0;
    *q2.last_layer_bias() = 2.5; // min picks q1
    Transition t;
    t.s = {0.0, 0.0};
    t.a = {0.1};
    t.r = 1.0;
    t.s_next = {0.0, 0.0};
    t.terminal = false;
    std::vector<const Transition*> batch{&t};
    Matrix noise(1, 1);
    noise(0, 0) = 0.31;
    const TargetInfo info = build_targets(policy, q1, q2, batch, noise, {gamma}, 0.2, 0.0, 1.0);
    // log pi from the zero policy head: std = 1, u = eps, a = tanh(eps)
    const double a01 = std::tanh(0.31);
    const double lp = -0.5 * 0.31 * 0.31 - 0.5 * kLog2Pi - std::log(1.0 - a01 * a01 + kSquashEps);
    EXPECT_NEAR(info.targets[0], 1.0 + gamma * (2.0 - 0.2 * lp), 1e-12);
}

TEST(SacLosses, CriticGradientMatchesFiniteDifferences) {
    Rng rng(6);
    Mlp critic(3, 8, 8, 1, rng);
    Matrix inputs(10, 3);
    Vec targets(10);
    for (double& v : inputs.data) v = rng.uniform(-1.0, 1.0);
    for (double& v : targets) v = rng.uniform(-2.0, 2.0);

    Vec grads(critic.param_count(), 0.0);
    mse_loss_and_grad(critic, inputs, targets, &grads);
    auto f = [&](const Vec& params) {
        Mlp probe = critic;
        probe.params() = params;
        return mse_loss_and_grad(probe, inputs, targets);
    };
    EXPECT_LT(grad_check(f, critic.params(), grads, 1e-5), 1e-4);
}

TEST(SacLosses, PolicyGradientMatchesFiniteDifferences) {
    Rng rng(7);
    Mlp policy(3, 8, 8, 2, rng);
    Mlp q1(4, 8, 8, 1, rng), q2(4, 8, 8, 1, rng);
    Matrix states(6, 3), noise(6, 1);
    for (double& v : states.data) v = rng.uniform(-1.0, 1.0);
    for (double& v : noise.data) v = rng.normal();
    const double alpha = 0.2, center = 0.0, half = 2.0;

    Vec grads(policy.param_count(), 0.0);
    policy_loss_and_grad(policy, q1, q2, states, noise, alpha, center, half, &grads);
    auto f = [&](const Vec& params) {
        Mlp probe = policy;
        probe.params() = params;
        return policy_loss_and_grad(probe, q1, q2, states, noise, alpha, center, half).loss;
    };
    EXPECT_LT(grad_check(f, policy.params(), grads, 1e-5), 1e-4);
}

TEST(SacLosses, AlphaLossIsLinearInLogAlpha) {
    // J(alpha) = -log_alpha * (mean log pi + target entropy): the gradient
    // used by the agent is exactly the negated bracket
    const double mean_lp = -1.7, target_entropy = -1.0;
    auto f = [&](const Vec& p) { return -p[0] * (mean_lp + target_entropy); };
    const Vec analytic{-(mean_lp + target_entropy)};
    EXPECT_LT(grad_check(f, {std::log(0.2)}, analytic, 1e-6), 1e-10);
}

TEST(SacAgent, HighTemperatureGrowsLogStd) {
    Rng rng(8);
    Params p = tiny_params(GammaVariant::kFixed);
    p.alpha_init = 50.0;
    p.auto_alpha = false;
    Agent agent(p, 2, 1, -1.0, 1.0, 99);
    // start from a deliberately narrow policy (squashed-Gaussian entropy
    // peaks at a finite std, so the drift is only upward from below it)
    agent.policy().params()[agent.policy().param_count() - 1] = -2.0;
    // fill with random transitions
    for (int k = 0; k < 200; ++k) {
        Transition t;
        t.s = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        t.a = {rng.uniform(-1.0, 1.0)};
        t.r = rng.uniform(-1.0, 1.0);
        t.s_next = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
        t.terminal = false;
        t.episode = static_cast<std::uint64_t>(k / 50);
        t.step_index = k % 50;
        agent.observe(t);
    }
    const Vec probe{0.3, -0.3};
    const double before = agent.policy().forward(probe)[1]; // raw log-std head
    for (int i = 0; i < 100; ++i) agent.update(1000 + i);
    const double after = agent.policy().forward(probe)[1];
    EXPECT_GT(after, before);
}

TEST(SacAgent, TargetNetworkSoftUpdateElementwise) {
    Rng rng(9);
    Params p = tiny_params(GammaVariant::kFixed);
    Agent agent(p, 2, 1, -1.0, 1.0, 7);
    for (int k = 0; k < 100; ++k) {
        Transition t;
        t.s = {rng.normal(), rng.normal()};
        t.a = {rng.uniform(-1.0, 1.0)};
        t.r = rng.normal();
        t.s_next = {rng.normal(), rng.normal()};
        t.terminal = false;
        t.episode = 0;
        t.step_index = k;
        agent.observe(t);
    }
    const Vec target_before = agent.q1_target().params();
    agent.update(1);
    const Vec& online_after = agent.q1().params();
    const Vec& target_after = agent.q1_target().params();
    for (std::size_t i = 0; i < target_after.size(); ++i)
        ASSERT_DOUBLE_EQ(target_after[i],
                         (1.0 - p.tau) * target_before[i] + p.tau * online_after[i]);
}

TEST(SacAgent, GammaGradientIsolation) {
    Rng rng(10);
    Params p = tiny_params(GammaVariant::kAdaGammaRc);
    p.gamma.warmup_steps = 0;
    Agent agent(p, 2, 1, -1.0, 1.0, 21);
    for (int k = 0; k < 200; ++k) {
        Transition t;
        t.s = {rng.normal(), rng.normal()};
        t.a = {rng.uniform(-1.0, 1.0)};
        t.r = rng.normal();
        t.s_next = {rng.normal(), rng.normal()};
        t.terminal = k % 40 == 39;
        t.episode = static_cast<std::uint64_t>(k / 40);
        t.step_index = k % 40;
        agent.observe(t);
    }
    // agent update never touches gamma parameters
    const Vec phi_before = agent.gamma_net()->net().params();
    agent.update(1);
    EXPECT_EQ(agent.gamma_net()->net().params(), phi_before);

    // gamma update never touches policy/critic/alpha parameters
    const Vec psi = agent.policy().params();
    const Vec th1 = agent.q1().params();
    const Vec th2 = agent.q2().params();
    const Vec t1 = agent.q1_target().params();
    const Vec t2 = agent.q2_target().params();
    const double alpha = agent.alpha();
    agent.update_gamma(2);
    EXPECT_EQ(agent.policy().params(), psi);
    EXPECT_EQ(agent.q1().params(), th1);
    EXPECT_EQ(agent.q2().params(), th2);
    EXPECT_EQ(agent.q1_target().params(), t1);
    EXPECT_EQ(agent.q2_target().params(), t2);
    EXPECT_EQ(agent.alpha(), alpha);
    // and it does move the gamma net
    EXPECT_NE(agent.gamma_net()->net().params(), phi_before);
}

TEST(SacTrain, SmokeRunOnCorridorLogsEveryInterval) {
    Params p = tiny_params(GammaVariant::kAdaGammaRc);
    p.gamma.warmup_steps = 500;
    CorridorEnv env;
    Agent agent(p, env.obs_size(), env.action_size(), env.action_low(), env.action_high(), 31);
    TrainSettings ts;
    ts.max_steps = 2000;
    ts.eval_interval = 500;
    ts.eval_episodes = 2;
    RunLog log;
    const TrainResult res = train(agent, env, ts, 31, &log);
    EXPECT_EQ(res.steps, 2000);
    EXPECT_EQ(log.rows().size(), 4u);
    EXPECT_GT(res.episodes, 0);
    for (const LogRow& row : log.rows()) {
        EXPECT_GE(row.mean_gamma, p.gamma.gamma_min);
        EXPECT_LE(row.mean_gamma, p.gamma.gamma_max);
    }
}

TEST(SacTrain, FixedGammaReductionBitwise) {
    // with gamma_min = gamma_max = 0.99 the adaptive path must reproduce the
    // fixed-gamma trajectory exactly, including every logged agent metric
    auto run = [](GammaVariant variant) {
        Params p = tiny_params(variant);
        p.gamma.gamma_min = 0.99;
        p.gamma.gamma_max = 0.99;
        p.gamma.init_value = 0.99;
        p.gamma.fixed_value = 0.99;
        p.gamma.warmup_steps = 200;
        CorridorEnv env;
        Agent agent(p, env.obs_size(), env.action_size(), env.action_low(), env.action_high(),
                    1234);
        TrainSettings ts;
        ts.max_steps = 1200;
        ts.eval_interval = 300;
        ts.eval_episodes = 2;
        RunLog log;
        train(agent, env, ts, 1234, &log);
        return std::make_pair(agent.policy().params(), log.rows());
    };
    const auto fixed = run(GammaVariant::kFixed);
    const auto ada = run(GammaVariant::kAdaGammaRc);
    EXPECT_EQ(fixed.first, ada.first); // bitwise-identical policy parameters
    ASSERT_EQ(fixed.second.size(), ada.second.size());
    for (std::size_t i = 0; i < fixed.second.size(); ++i) {
        EXPECT_EQ(fixed.second[i].eval_return_mean, ada.second[i].eval_return_mean);
        EXPECT_EQ(fixed.second[i].critic_loss, ada.second[i].critic_loss);
        EXPECT_EQ(fixed.second[i].policy_loss, ada.second[i].policy_loss);
        EXPECT_EQ(fixed.second[i].alpha, ada.second[i].alpha);
        EXPECT_EQ(fixed.second[i].mean_gamma, ada.second[i].mean_gamma);
        EXPECT_EQ(fixed.second[i].min_gamma, ada.second[i].min_gamma);
        EXPECT_EQ(fixed.second[i].max_gamma, ada.second[i].max_gamma);
    }
}

TEST(SacTrain, RerunIsBitwiseIdentical) {
    auto run = [] {
        Params p = tiny_params(GammaVariant::kAdaGammaRc);
        p.gamma.warmup_steps = 300;
        CorridorEnv env;
        Agent agent(p, env.obs_size(), env.action_size(), env.action_low(), env.action_high(),
                    777);
        TrainSettings ts;
        ts.max_steps = 800;
        ts.eval_interval = 400;
        ts.eval_episodes = 2;
        RunLog log;
        train(agent, env, ts, 777, &log);
        return std::make_pair(agent.policy().params(), agent.gamma_net()->net().params());
    };
    const auto a = run();
    const auto b = run();
    EXPECT_EQ(a.first, b.first);
    EXPECT_EQ(a.second, b.second);
}

TEST(SacAgent, UncertaintyVariantKeepsGammaInBounds) {
    Rng rng(11);
    Params p = tiny_params(GammaVariant::kUncertainty);
    p.gamma.warmup_steps = 50;
    CorridorEnv env;
    Agent agent(p, env.obs_size(), env.action_size(), env.action_low(), env.action_high(), 42);
    TrainSettings ts;
    ts.max_steps = 400;
    ts.eval_interval = 200;
    ts.eval_episodes = 1;
    RunLog log;
    train(agent, env, ts, 42, &log);
    for (const LogRow& row : log.rows()) {
        EXPECT_GE(row.min_gamma, p.gamma.gamma_min);
        EXPECT_LE(row.max_gamma, p.gamma.gamma_max);
    }
}

TEST(SacAgent, CrossValidatedVariantTrainsGamma) {
    Params p = tiny_params(GammaVariant::kCrossValidated);
    p.gamma.warmup_steps = 100;
    CorridorEnv env;
    Agent agent(p, env.obs_size(), env.action_size(), env.action_low(), env.action_high(), 5150);
    TrainSettings ts;
    ts.max_steps = 400;
    ts.eval_interval = 400;
    ts.eval_episodes = 1;
    const Vec phi_before = agent.gamma_net()->net().params();
    train(agent, env, ts, 5150, nullptr);
    EXPECT_NE(agent.gamma_net()->net().params(), phi_before);
}
