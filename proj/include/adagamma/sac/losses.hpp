#pragma once

#include <algorithm>
#include <cmath>
#include <span>

#include "adagamma/numerics/matrix.hpp"
#include "adagamma/numerics/mlp.hpp"
#include "adagamma/sac/replay_buffer.hpp"

namespace adagamma::sac {

constexpr double kLogStdMin = -20.0;
constexpr double kLogStdMax = 2.0;
constexpr double kSquashEps = 1e-6;
constexpr double kLog2Pi = 1.8378770664093454836;

/// One squashed-Gaussian sample a = center + half * tanh(mu + std * eps),
/// with the quantities needed to backpropagate through the reparameterized
/// draw. The policy net emits [mu..., raw_log_std...]; raw log-std is
/// clamped to [-20, 2] before exponentiation.
struct SquashedSample {
    Vec action_env;
    double log_prob = 0.0;
    // per-dim intermediates
    Vec a01;     // tanh(u)
    Vec stddev;  // exp(clamped log std)
    Vec dlp_du;  // d log_prob / du_j
    std::vector<bool> clamped;
};

inline SquashedSample squash_sample(const double* head, const double* eps, int act_dim,
                                    double center, double half) {
    SquashedSample s;
    s.action_env.resize(act_dim);
    s.a01.resize(act_dim);
    s.stddev.resize(act_dim);
    s.dlp_du.resize(act_dim);
    s.clamped.resize(act_dim);
    for (int j = 0; j < act_dim; ++j) {
        const double mu = head[j];
        const double raw = head[act_dim + j];
        const double l = std::clamp(raw, kLogStdMin, kLogStdMax);
        s.clamped[j] = raw < kLogStdMin || raw > kLogStdMax;
        const double sd = std::exp(l);
        const double u = mu + sd * eps[j];
        const double t = std::tanh(u);
        s.a01[j] = t;
        s.stddev[j] = sd;
        s.action_env[j] = center + half * t;
        const double sq = 1.0 - t * t;
        s.log_prob += -0.5 * eps[j] * eps[j] - l - 0.5 * kLog2Pi -
                      std::log(sq + kSquashEps) - std::log(half);
        s.dlp_du[j] = 2.0 * t * sq / (sq + kSquashEps);
    }
    return s;
}

/// Deterministic (mean) action for evaluation rollouts.
inline Vec squash_mean_action(const double* head, int act_dim, double center, double half) {
    Vec a(act_dim);
    for (int j = 0; j < act_dim; ++j) a[j] = center + half * std::tanh(head[j]);
    return a;
}

/// Mean squared error of a scalar-output net against fixed targets, with
/// parameter gradients. Shared by the critics and the PPO value net.
inline double mse_loss_and_grad(const Mlp& net, const Matrix& inputs, const Vec& targets,
                                Vec* grads = nullptr) {
    MlpCache cache;
    const Matrix out = net.forward(inputs, cache);
    const std::size_t b = inputs.rows;
    const double inv_b = 1.0 / static_cast<double>(b);
    double loss = 0.0;
    Matrix upstream(b, 1);
    for (std::size_t i = 0; i < b; ++i) {
        const double d = out(i, 0) - targets[i];
        loss += d * d * inv_b;
        upstream(i, 0) = 2.0 * d * inv_b;
    }
    if (grads) net.backward(cache, upstream, *grads);
    return loss;
}

inline Matrix concat_state_action(const Matrix& states, const Matrix& actions) {
    Matrix out(states.rows, states.cols + actions.cols);
    for (std::size_t i = 0; i < states.rows; ++i) {
        for (std::size_t j = 0; j < states.cols; ++j) out(i, j) = states(i, j);
        for (std::size_t j = 0; j < actions.cols; ++j) out(i, states.cols + j) = actions(i, j);
    }
    return out;
}

/// Bootstrapped targets y = r + gamma (1 - d) [min_i Qbar_i(s', a') - alpha log pi(a'|s')]
/// with one fresh action sample per element. `soft_next` keeps the bracket
/// for the uncertainty-rule beta gradient.
struct TargetInfo {
    Vec targets;
    Vec soft_next;
};

inline TargetInfo build_targets(const Mlp& policy, const Mlp& q1_target, const Mlp& q2_target,
                                std::span<const Transition* const> batch, const Matrix& noise,
                                const Vec& gammas, double alpha, double center, double half) {
    const std::size_t b = batch.size();
    const int obs = static_cast<int>(batch.front()->s.size());
    const int act = static_cast<int>(batch.front()->a.size());

    Matrix next_states(b, obs);
    for (std::size_t i = 0; i < b; ++i)
        for (int j = 0; j < obs; ++j) next_states(i, j) = batch[i]->s_next[j];

    MlpCache pc;
    const Matrix heads = policy.forward(next_states, pc);
    Matrix next_actions(b, act);
    Vec log_probs(b);
    for (std::size_t i = 0; i < b; ++i) {
        const SquashedSample s = squash_sample(heads.row(i), noise.row(i), act, center, half);
        for (int j = 0; j < act; ++j) next_actions(i, j) = s.action_env[j];
        log_probs[i] = s.log_prob;
    }

    const Matrix sa = concat_state_action(next_states, next_actions);
    MlpCache c1, c2;
    const Matrix q1 = q1_target.forward(sa, c1);
    const Matrix q2 = q2_target.forward(sa, c2);

    TargetInfo info;
    info.targets.resize(b);
    info.soft_next.resize(b);
    for (std::size_t i = 0; i < b; ++i) {
        const double soft = std::min(q1(i, 0), q2(i, 0)) - alpha * log_probs[i];
        info.soft_next[i] = soft;
        const double mask = batch[i]->terminal ? 0.0 : 1.0;
        info.targets[i] = batch[i]->r + gammas[i] * mask * soft;
    }
    return info;
}

/// Reparameterized policy objective: mean over the batch of
/// alpha * log pi(a~|s) - min_i Q_i(s, a~). Returns loss and the mean log
/// probability (used by the temperature update); fills policy gradients.
struct PolicyLossResult {
    double loss = 0.0;
    double mean_log_prob = 0.0;
};

inline PolicyLossResult policy_loss_and_grad(const Mlp& policy, const Mlp& q1, const Mlp& q2,
                                             const Matrix& states, const Matrix& noise,
                                             double alpha, double center, double half,
                                             Vec* grads = nullptr) {
    const std::size_t b = states.rows;
    const int act = static_cast<int>(noise.cols);
    const double inv_b = 1.0 / static_cast<double>(b);

    MlpCache pc;
    const Matrix heads = policy.forward(states, pc);
    std::vector<SquashedSample> samples;
    samples.reserve(b);
    Matrix actions(b, act);
    for (std::size_t i = 0; i < b; ++i) {
        samples.push_back(squash_sample(heads.row(i), noise.row(i), act, center, half));
        for (int j = 0; j < act; ++j) actions(i, j) = samples[i].action_env[j];
    }

    const Matrix sa = concat_state_action(states, actions);
    MlpCache c1, c2;
    const Matrix q1_out = q1.forward(sa, c1);
    const Matrix q2_out = q2.forward(sa, c2);

    PolicyLossResult res;
    for (std::size_t i = 0; i < b; ++i) {
        const double qmin = std::min(q1_out(i, 0), q2_out(i, 0));
        res.loss += (alpha * samples[i].log_prob - qmin) * inv_b;
        res.mean_log_prob += samples[i].log_prob * inv_b;
    }
    if (!grads) return res;

    // dQmin/d(action): route each element through whichever critic is the min
    Matrix up1(b, 1), up2(b, 1);
    for (std::size_t i = 0; i < b; ++i) {
        const bool first = q1_out(i, 0) <= q2_out(i, 0);
        up1(i, 0) = first ? 1.0 : 0.0;
        up2(i, 0) = first ? 0.0 : 1.0;
    }
    Vec scratch1(q1.param_count(), 0.0), scratch2(q2.param_count(), 0.0);
    Matrix dsa1, dsa2;
    q1.backward(c1, up1, scratch1, &dsa1);
    q2.backward(c2, up2, scratch2, &dsa2);
    const std::size_t obs = states.cols;

    Matrix upstream(b, 2 * act);
    for (std::size_t i = 0; i < b; ++i) {
        const SquashedSample& s = samples[i];
        for (int j = 0; j < act; ++j) {
            const double dq_da = dsa1(i, obs + j) + dsa2(i, obs + j);
            const double da_du = half * (1.0 - s.a01[j] * s.a01[j]);
            const double dl_du = inv_b * (alpha * s.dlp_du[j] - dq_da * da_du);
            upstream(i, j) = dl_du;
            const double dl_dl = -alpha * inv_b + dl_du * s.stddev[j] * noise(i, j);
            upstream(i, act + j) = s.clamped[j] ? 0.0 : dl_dl;
        }
    }
    policy.backward(pc, upstream, *grads);
    return res;
}

} // namespace adagamma::sac
