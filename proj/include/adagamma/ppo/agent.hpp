#pragma once

#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "adagamma/gamma/gamma_net.hpp"
#include "adagamma/gamma/losses.hpp"
#include "adagamma/gamma/reference.hpp"
#include "adagamma/gamma/settings.hpp"
#include "adagamma/gamma/uncertainty.hpp"
#include "adagamma/numerics/adam.hpp"
#include "adagamma/ppo/losses.hpp"
#include "adagamma/ppo/rollout.hpp"

namespace adagamma::ppo {

using adagamma::GammaSettings;
using adagamma::GammaVariant;
using adagamma::variant_trains_net;

inline GammaSettings default_ppo_gamma() {
    GammaSettings g;
    g.lr = 3e-4;
    g.nstep = 10;
    g.weights.lambda_dev = 0.01;
    g.weights.lambda_var = 0.005;
    g.weights.lambda_bound = 0.05;
    g.ref_init = 0.99;
    g.ref_period = 1; // PPO updates
    return g;
}

struct Params {
    int hidden = 64;
    double actor_lr = 3e-4;
    double critic_lr = 3e-4;
    double clip = 0.2;
    double gae_lambda = 0.95;
    int epochs = 10;
    int rollout_steps = 4096;
    int minibatch = 128;
    double entropy_coef = 0.01;
    double max_grad_norm = 0.5;
    // state-independent action std with a scheduled decay
    double action_std_init = 0.5;
    double action_std_floor = 0.1;
    double action_std_decay = 0.05;
    long action_std_decay_period = 200000;
    /// value targets: advantage + V(s) (default) or the product-weighted
    /// n-step return
    bool nstep_value_targets = false;
    /// normalize advantages before composing value targets instead of after
    bool normalize_before_value_targets = false;
    GammaSettings gamma = default_ppo_gamma();
};

struct UpdateStats {
    double policy_loss = 0.0;
    double value_loss = 0.0;
    bool advantage_guard = false; // degenerate-spread normalization fired
    int skipped = 0;
};

/// Clipped-surrogate PPO with the on-policy adaptive-discount adapter:
/// per-rollout frozen gamma(s_t), the modified TD residual and GAE
/// recursion, and a gamma update after the optimization epochs.
class Agent {
public:
    Agent(Params params, int obs, int act, double act_low, double act_high, std::uint64_t seed)
        : p_(std::move(params)),
          obs_(obs),
          act_(act),
          act_low_(act_low),
          act_high_(act_high),
          rng_action_(Rng(seed).fork(1)),
          rng_update_(Rng(seed).fork(2)),
          rng_gamma_(Rng(seed).fork(3)) {
        Rng init = Rng(seed).fork(5);
        policy_ = Mlp(obs_, p_.hidden, p_.hidden, act_, init);
        value_ = Mlp(obs_, p_.hidden, p_.hidden, 1, init);
        const GammaSettings& g = p_.gamma;
        if (variant_trains_net(g.variant)) {
            gamma_net_ = GammaNet(obs_, g.hidden, g.gamma_min, g.gamma_max, g.init_value, init,
                                  g.boundary_margin);
            opt_gamma_ = AdamState(gamma_net_->net().param_count(), g.lr);
        }
        if (g.variant == GammaVariant::kUncertainty) {
            aux_value_ = Mlp(obs_, p_.hidden, p_.hidden, 1, init);
            opt_aux_ = AdamState(aux_value_->param_count(), p_.critic_lr);
        }
        uncertainty_.eta = g.unc_eta;
        uncertainty_.beta = g.unc_beta_init;
        uncertainty_.beta_lr = g.unc_beta_lr;
        uncertainty_.gamma_min = g.gamma_min;
        uncertainty_.gamma_max = g.gamma_max;
        uncertainty_.base_gamma = g.unc_base;
        reference_.value = g.ref_init;
        reference_.tau = g.ref_tau;
        reference_.period = g.ref_period;
        reference_.adaptive = g.ref_adaptive;

        opt_policy_ = AdamState(policy_.param_count(), p_.actor_lr);
        opt_value_ = AdamState(value_.param_count(), p_.critic_lr);
        action_std_ = p_.action_std_init;
    }

    const Params& params() const { return p_; }
    int obs_size() const { return obs_; }
    int action_size() const { return act_; }
    Mlp& policy() { return policy_; }
    const Mlp& policy() const { return policy_; }
    Mlp& value_net() { return value_; }
    const Mlp& value_net() const { return value_; }
    GammaNet* gamma_net() { return gamma_net_ ? &*gamma_net_ : nullptr; }
    const GammaNet* gamma_net() const { return gamma_net_ ? &*gamma_net_ : nullptr; }
    const Mlp* aux_value_net() const { return aux_value_ ? &*aux_value_ : nullptr; }
    const UncertaintyGamma& uncertainty() const { return uncertainty_; }
    ReferenceDiscount& reference() { return reference_; }
    double action_std() const { return action_std_; }
    long episodes() const { return episodes_; }
    long updates() const { return updates_; }

    /// Scheduled decay: every `period` env steps the std shrinks by `decay`
    /// down to the floor.
    void refresh_action_std(long env_steps) {
        const long ticks = p_.action_std_decay_period > 0
                               ? env_steps / p_.action_std_decay_period
                               : 0;
        action_std_ = std::max(p_.action_std_floor,
                               p_.action_std_init - p_.action_std_decay * ticks);
    }

    struct ActionSample {
        Vec action;
        double log_prob;
    };

    ActionSample act_stochastic(const Vec& s) {
        const Vec mean = policy_.forward(s);
        ActionSample out;
        out.action.resize(act_);
        out.log_prob = 0.0;
        for (int j = 0; j < act_; ++j) {
            const double eps = rng_action_.normal();
            out.action[j] = mean[j] + action_std_ * eps;
            out.log_prob += -0.5 * eps * eps - std::log(action_std_) - 0.5 * sac::kLog2Pi;
        }
        return out;
    }

    Vec act_deterministic(const Vec& s) const { return policy_.forward(s); }

    double state_value(const Vec& s) const { return value_.forward(s)[0]; }

    void count_episode() { episodes_ += 1; }

    /// The frozen per-state discount for one rollout, computed once.
    Vec freeze_gammas(const Matrix& states) const {
        const GammaSettings& g = p_.gamma;
        const std::size_t t_len = states.rows;
        Vec gam(t_len, g.fixed_value);
        switch (g.variant) {
            case GammaVariant::kFixed:
                break;
            case GammaVariant::kUncertainty:
                for (std::size_t t = 0; t < t_len; ++t) {
                    Vec s(states.row(t), states.row(t) + obs_);
                    if (episodes_ < g.warmup_episodes) {
                        gam[t] = g.unc_base;
                    } else {
                        const double d = std::abs(value_.forward(s)[0] - aux_value_->forward(s)[0]);
                        gam[t] = uncertainty_(d);
                    }
                }
                break;
            default:
                for (std::size_t t = 0; t < t_len; ++t) {
                    if (episodes_ < g.warmup_episodes) {
                        gam[t] = g.init_value;
                    } else {
                        Vec s(states.row(t), states.row(t) + obs_);
                        gam[t] = (*gamma_net_)(s);
                    }
                }
                break;
        }
        return gam;
    }

    /// Fills values/next_values from the current value net. Interior steps
    /// reuse the next row's value; boundary and tail steps evaluate the
    /// stored successor observation.
    void fill_values(Rollout& r) const {
        const std::size_t t_len = r.length();
        r.values.resize(t_len);
        r.next_values.resize(t_len);
        MlpCache cache;
        const Matrix v = value_.forward(r.states, cache);
        for (std::size_t t = 0; t < t_len; ++t) r.values[t] = v(t, 0);
        for (std::size_t t = 0; t < t_len; ++t) {
            if (t + 1 < t_len && !r.boundary[t]) {
                r.next_values[t] = r.values[t + 1];
            } else {
                Vec s(r.next_obs.row(t), r.next_obs.row(t) + obs_);
                r.next_values[t] = value_.forward(s)[0];
            }
        }
    }

    /// K epochs of clipped-surrogate minibatch updates plus value-MSE steps.
    /// The frozen gamma array is asserted unchanged across the epochs.
    UpdateStats update(Rollout& rollout) {
        const std::size_t t_len = rollout.length();
        if (t_len < 2) throw std::invalid_argument("ppo::update: rollout too short");
        const std::uint64_t gamma_hash = hash_doubles(rollout.gammas);

        Vec advantages = gae_adaptive(rollout, p_.gae_lambda);
        UpdateStats stats;
        if (p_.normalize_before_value_targets)
            stats.advantage_guard = normalize_advantages(advantages);
        Vec targets(t_len);
        if (p_.nstep_value_targets) {
            for (std::size_t t = 0; t < t_len; ++t)
                targets[t] = nstep_value_target(rollout, t, p_.gamma.nstep);
        } else {
            for (std::size_t t = 0; t < t_len; ++t)
                targets[t] = advantages[t] + rollout.values[t];
        }
        if (!p_.normalize_before_value_targets)
            stats.advantage_guard = normalize_advantages(advantages);

        std::vector<std::size_t> order(t_len);
        std::iota(order.begin(), order.end(), 0);
        const std::size_t mb = std::min<std::size_t>(p_.minibatch, t_len);

        for (int epoch = 0; epoch < p_.epochs; ++epoch) {
            // Fisher-Yates shuffle from the update stream
            for (std::size_t i = t_len - 1; i > 0; --i) {
                const std::size_t j =
                    static_cast<std::size_t>(rng_update_.uniform_int(0, static_cast<long>(i)));
                std::swap(order[i], order[j]);
            }
            for (std::size_t lo = 0; lo + mb <= t_len; lo += mb) {
                const std::span<const std::size_t> idx(order.data() + lo, mb);
                stats.policy_loss = policy_minibatch(rollout, advantages, idx, &stats.skipped);
                stats.value_loss = value_minibatch(rollout, targets, idx, value_, opt_value_,
                                                   &stats.skipped);
                if (aux_value_)
                    value_minibatch(rollout, targets, idx, *aux_value_, opt_aux_,
                                    &stats.skipped);
            }
        }
        if (hash_doubles(rollout.gammas) != gamma_hash)
            throw std::logic_error("ppo::update: frozen gamma array changed during epochs");
        updates_ += 1;
        return stats;
    }

    bool gamma_update_due() const {
        return variant_trains_net(p_.gamma.variant) && episodes_ >= p_.gamma.warmup_episodes;
    }

    /// Gamma step on the rollout's n-step windows, run once per PPO update
    /// after the epochs; the reference EMA follows its update-period cadence.
    GammaLossTerms update_gamma(const Rollout& rollout) {
        GammaLossTerms terms;
        if (!gamma_update_due() || !gamma_net_) return terms;
        const GammaSettings& g = p_.gamma;
        const std::size_t t_len = rollout.length();

        std::vector<NStepWindow> windows;
        windows.reserve(t_len);
        for (std::size_t t = 0; t < t_len; ++t) windows.push_back(window_at(rollout, t, g.nstep));
        ValueFn value_fn = [this](const Vec& s) { return value_.forward(s)[0]; };

        Vec grads(gamma_net_->net().param_count(), 0.0);
        switch (g.variant) {
            case GammaVariant::kAdaGammaRc:
                terms = full_gamma_loss(*gamma_net_, windows, value_fn, reference_, g.weights,
                                        g.nstep, &grads);
                break;
            case GammaVariant::kNaiveTd: {
                std::vector<TdSample> tds;
                tds.reserve(t_len);
                for (std::size_t t = 0; t < t_len; ++t) tds.push_back(td_at(rollout, t));
                terms.rc = naive_td_gamma_loss(*gamma_net_, tds, value_fn, &grads);
                terms.total = terms.rc;
                break;
            }
            case GammaVariant::kCrossValidated: {
                terms = cross_validated_step(rollout, grads);
                break;
            }
            default:
                return terms;
        }
        clip_grad_norm(grads, p_.max_grad_norm);
        adam_step(gamma_net_->net().params(), grads, opt_gamma_);
        last_gamma_terms_ = terms;

        updates_since_ref_ += 1;
        reference_.warmup_done = true;
        if (updates_since_ref_ >= reference_.period) {
            double mean = 0.0;
            for (std::size_t t = 0; t < t_len; ++t) {
                Vec s(rollout.states.row(t), rollout.states.row(t) + obs_);
                mean += (*gamma_net_)(s);
            }
            reference_.update(mean / static_cast<double>(t_len));
            updates_since_ref_ = 0;
        }
        return terms;
    }

    const GammaLossTerms& last_gamma_terms() const { return last_gamma_terms_; }

private:
    Params p_;
    int obs_, act_;
    double act_low_, act_high_;
    Rng rng_action_, rng_update_, rng_gamma_;
    Mlp policy_, value_;
    std::optional<Mlp> aux_value_;
    std::optional<GammaNet> gamma_net_;
    UncertaintyGamma uncertainty_;
    ReferenceDiscount reference_;
    AdamState opt_policy_, opt_value_, opt_aux_, opt_gamma_;
    double action_std_ = 0.5;
    long episodes_ = 0;
    long updates_ = 0;
    long updates_since_ref_ = 0;
    GammaLossTerms last_gamma_terms_;

    NStepWindow window_at(const Rollout& r, std::size_t t, int n) const {
        NStepWindow w;
        w.s0.assign(r.states.row(t), r.states.row(t) + obs_);
        w.rewards.reserve(n);
        std::size_t k = t;
        while (true) {
            w.rewards.push_back(r.rewards[k]);
            const bool stop = r.boundary[k] || k + 1 >= r.length() ||
                              static_cast<int>(k - t) + 1 >= n;
            if (stop) {
                w.tail_terminal = r.terminal[k];
                w.sn = successor_obs(r, k);
                break;
            }
            k += 1;
        }
        w.s1 = successor_obs(r, t);
        return w;
    }

    static Vec successor_obs(const Rollout& r, std::size_t k) {
        return Vec(r.next_obs.row(k), r.next_obs.row(k) + r.next_obs.cols);
    }

    TdSample td_at(const Rollout& r, std::size_t t) const {
        TdSample td;
        td.s.assign(r.states.row(t), r.states.row(t) + obs_);
        td.s_next = successor_obs(r, t);
        td.r = r.rewards[t];
        td.terminal = r.terminal[t] != 0;
        return td;
    }

    double policy_minibatch(const Rollout& r, const Vec& advantages,
                            std::span<const std::size_t> idx, int* skipped) {
        const std::size_t m = idx.size();
        Matrix states(m, obs_), actions(m, act_);
        Vec old_lp(m), adv(m);
        for (std::size_t i = 0; i < m; ++i) {
            for (int j = 0; j < obs_; ++j) states(i, j) = r.states(idx[i], j);
            for (int j = 0; j < act_; ++j) actions(i, j) = r.actions(idx[i], j);
            old_lp[i] = r.log_probs[idx[i]];
            adv[i] = advantages[idx[i]];
        }
        Vec grads(policy_.param_count(), 0.0);
        const double loss = clipped_surrogate_loss(policy_, states, actions, old_lp, adv,
                                                   action_std_, p_.clip, p_.entropy_coef,
                                                   &grads);
        clip_grad_norm(grads, p_.max_grad_norm);
        if (!adam_step(policy_.params(), grads, opt_policy_) && skipped) *skipped += 1;
        return loss;
    }

    double value_minibatch(const Rollout& r, const Vec& targets,
                           std::span<const std::size_t> idx, Mlp& net, AdamState& opt,
                           int* skipped) {
        const std::size_t m = idx.size();
        Matrix states(m, obs_);
        Vec t(m);
        for (std::size_t i = 0; i < m; ++i) {
            for (int j = 0; j < obs_; ++j) states(i, j) = r.states(idx[i], j);
            t[i] = targets[idx[i]];
        }
        Vec grads(net.param_count(), 0.0);
        const double loss = sac::mse_loss_and_grad(net, states, t, &grads);
        clip_grad_norm(grads, p_.max_grad_norm);
        if (!adam_step(net.params(), grads, opt) && skipped) *skipped += 1;
        return loss;
    }

    GammaLossTerms cross_validated_step(const Rollout& rollout, Vec& grads) {
        GammaLossTerms terms;
        const std::size_t t_len = rollout.length();
        const std::size_t half = t_len / 2;
        if (half == 0) return terms;
        // random 50/50 split of the rollout indices
        std::vector<std::size_t> order(t_len);
        std::iota(order.begin(), order.end(), 0);
        for (std::size_t i = t_len - 1; i > 0; --i) {
            const std::size_t j =
                static_cast<std::size_t>(rng_gamma_.uniform_int(0, static_cast<long>(i)));
            std::swap(order[i], order[j]);
        }
        std::vector<TdSample> td_a, td_b;
        for (std::size_t i = 0; i < half; ++i) td_a.push_back(td_at(rollout, order[i]));
        for (std::size_t i = half; i < t_len; ++i) td_b.push_back(td_at(rollout, order[i]));

        // one value-net gradient step on half A, applied to a snapshot
        Mlp v_snap = value_;
        Matrix states_a(td_a.size(), obs_);
        Vec targets_a(td_a.size());
        for (std::size_t i = 0; i < td_a.size(); ++i) {
            const std::size_t t = order[i];
            for (int j = 0; j < obs_; ++j) states_a(i, j) = rollout.states(t, j);
            const double vnext = rollout.terminal[t] ? 0.0 : rollout.next_values[t];
            targets_a[i] = rollout.rewards[t] + rollout.gammas[t] * vnext;
        }
        Vec g(v_snap.param_count(), 0.0);
        sac::mse_loss_and_grad(v_snap, states_a, targets_a, &g);
        for (std::size_t i = 0; i < g.size(); ++i) v_snap.params()[i] -= p_.critic_lr * g[i];

        ValueFn value_after_a = [&v_snap](const Vec& s) { return v_snap.forward(s)[0]; };
        terms.rc = cross_validated_loss(*gamma_net_, td_a, td_b, value_after_a, &grads);
        terms.total = terms.rc;
        return terms;
    }
};

} // namespace adagamma::ppo
