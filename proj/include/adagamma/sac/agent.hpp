#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "adagamma/gamma/gamma_net.hpp"
#include "adagamma/gamma/losses.hpp"
#include "adagamma/gamma/reference.hpp"
#include "adagamma/gamma/settings.hpp"
#include "adagamma/gamma/uncertainty.hpp"
#include "adagamma/numerics/adam.hpp"
#include "adagamma/sac/losses.hpp"
#include "adagamma/sac/replay_buffer.hpp"

namespace adagamma::sac {

using adagamma::GammaSettings;
using adagamma::GammaVariant;
using adagamma::variant_trains_net;

struct Params {
    int hidden = 256;
    double lr = 3e-4;
    double tau = 5e-3;
    std::size_t replay_capacity = 1000000;
    std::size_t min_buffer = 5000;
    int batch_size = 256;
    int grad_steps_per_env_step = 1;
    double alpha_init = 0.2;
    bool auto_alpha = true;
    std::optional<double> target_entropy; // defaults to -action_dim
    double max_grad_norm = 1.0;
    GammaSettings gamma;
};

struct UpdateStats {
    double critic_loss = 0.0;
    double policy_loss = 0.0;
    double alpha = 0.0;
    int skipped = 0; // optimizer steps rejected on non-finite gradients
};

struct GammaDiagnostics {
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
};

/// Twin-critic soft actor-critic with a pluggable discount source. The
/// adaptive-discount variants differ from the fixed baseline only in how
/// gamma(s_t) enters the bootstrapped target and in the extra gamma-side
/// update; per-concern RNG streams keep the agent-side draw sequence
/// identical across variants.
class Agent {
public:
    Agent(Params params, int obs, int act, double act_low, double act_high, std::uint64_t seed)
        : p_(std::move(params)),
          obs_(obs),
          act_(act),
          center_((act_high + act_low) / 2.0),
          half_((act_high - act_low) / 2.0),
          act_low_(act_low),
          act_high_(act_high),
          rng_action_(Rng(seed).fork(1)),
          rng_batch_(Rng(seed).fork(2)),
          rng_update_(Rng(seed).fork(3)),
          rng_gamma_(Rng(seed).fork(4)),
          buffer_(p_.replay_capacity) {
        Rng init = Rng(seed).fork(5);
        policy_ = Mlp(obs_, p_.hidden, p_.hidden, 2 * act_, init);
        q1_ = Mlp(obs_ + act_, p_.hidden, p_.hidden, 1, init);
        q2_ = Mlp(obs_ + act_, p_.hidden, p_.hidden, 1, init);
        q1_target_ = q1_;
        q2_target_ = q2_;
        log_alpha_ = std::log(p_.alpha_init);
        target_entropy_ = p_.target_entropy.value_or(-static_cast<double>(act_));

        const GammaSettings& g = p_.gamma;
        if (variant_trains_net(g.variant)) {
            gamma_net_ = GammaNet(obs_, g.hidden, g.gamma_min, g.gamma_max, g.init_value, init,
                                  g.boundary_margin);
            opt_gamma_ = AdamState(gamma_net_->net().param_count(), g.lr);
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

        opt_policy_ = AdamState(policy_.param_count(), p_.lr);
        opt_q1_ = AdamState(q1_.param_count(), p_.lr);
        opt_q2_ = AdamState(q2_.param_count(), p_.lr);
        opt_alpha_ = AdamState(1, p_.lr);
    }

    int obs_size() const { return obs_; }
    int action_size() const { return act_; }
    const Params& params() const { return p_; }
    double alpha() const { return std::exp(log_alpha_); }
    ReplayBuffer& buffer() { return buffer_; }
    const ReplayBuffer& buffer() const { return buffer_; }
    Mlp& policy() { return policy_; }
    const Mlp& policy() const { return policy_; }
    const Mlp& q1() const { return q1_; }
    const Mlp& q2() const { return q2_; }
    const Mlp& q1_target() const { return q1_target_; }
    const Mlp& q2_target() const { return q2_target_; }
    GammaNet* gamma_net() { return gamma_net_ ? &*gamma_net_ : nullptr; }
    const GammaNet* gamma_net() const { return gamma_net_ ? &*gamma_net_ : nullptr; }
    ReferenceDiscount& reference() { return reference_; }
    const UncertaintyGamma& uncertainty() const { return uncertainty_; }
    double action_center() const { return center_; }
    double action_half_range() const { return half_; }

    /// Exploration action: uniform before the buffer warms up, a policy
    /// sample afterwards.
    Vec act_explore(const Vec& s) {
        if (buffer_.size() < p_.min_buffer) {
            Vec a(act_);
            for (double& v : a) v = rng_action_.uniform(act_low_, act_high_);
            return a;
        }
        return act_stochastic(s);
    }

    Vec act_stochastic(const Vec& s) {
        const Vec head = policy_.forward(s);
        Vec noise(act_);
        for (double& v : noise) v = rng_action_.normal();
        return squash_sample(head.data(), noise.data(), act_, center_, half_).action_env;
    }

    Vec act_deterministic(const Vec& s) const {
        const Vec head = policy_.forward(s);
        return squash_mean_action(head.data(), act_, center_, half_);
    }

    void observe(Transition t) { buffer_.push(std::move(t)); }

    bool ready_to_update() const { return buffer_.size() >= p_.min_buffer; }

    /// The discount applied in the critic target for one transition. Always
    /// evaluated without gradient. Before the gamma warmup ends, the
    /// configured default is used (the freshly initialized net outputs the
    /// same value, so the switch is seamless).
    double target_gamma(const Vec& s, const Vec& a_env, long step) const {
        const GammaSettings& g = p_.gamma;
        switch (g.variant) {
            case GammaVariant::kFixed:
                return g.fixed_value;
            case GammaVariant::kUncertainty: {
                if (step <= g.warmup_steps) return uncertainty_.base_gamma;
                return uncertainty_(critic_disagreement(s, a_env));
            }
            default:
                if (step <= g.warmup_steps) return g.init_value;
                return (*gamma_net_)(s);
        }
    }

    /// One full gradient pass: critics on the adaptive target, then policy,
    /// temperature, and the soft target-network update.
    UpdateStats update(long step) {
        UpdateStats stats;
        const auto batch = buffer_.sample_batch(p_.batch_size, rng_batch_);
        const std::size_t b = batch.size();

        Matrix states(b, obs_), actions(b, act_);
        Vec gammas(b);
        for (std::size_t i = 0; i < b; ++i) {
            for (int j = 0; j < obs_; ++j) states(i, j) = batch[i]->s[j];
            for (int j = 0; j < act_; ++j) actions(i, j) = batch[i]->a[j];
            gammas[i] = target_gamma(batch[i]->s, batch[i]->a, step);
        }

        Matrix target_noise(b, act_);
        for (double& v : target_noise.data) v = rng_update_.normal();
        const TargetInfo targets = build_targets(policy_, q1_target_, q2_target_, batch,
                                                 target_noise, gammas, alpha(), center_, half_);

        const Matrix sa = concat_state_action(states, actions);
        Vec g1(q1_.param_count(), 0.0), g2(q2_.param_count(), 0.0);
        const double l1 = mse_loss_and_grad(q1_, sa, targets.targets, &g1);
        const double l2 = mse_loss_and_grad(q2_, sa, targets.targets, &g2);
        stats.critic_loss = l1 + l2;

        if (p_.gamma.variant == GammaVariant::kUncertainty && step > p_.gamma.warmup_steps)
            update_uncertainty_beta(batch, sa, targets);

        clip_grad_norm(g1, p_.max_grad_norm);
        clip_grad_norm(g2, p_.max_grad_norm);
        stats.skipped += adam_step(q1_.params(), g1, opt_q1_) ? 0 : 1;
        stats.skipped += adam_step(q2_.params(), g2, opt_q2_) ? 0 : 1;

        Matrix policy_noise(b, act_);
        for (double& v : policy_noise.data) v = rng_update_.normal();
        Vec gp(policy_.param_count(), 0.0);
        const PolicyLossResult pres = policy_loss_and_grad(policy_, q1_, q2_, states,
                                                           policy_noise, alpha(), center_, half_,
                                                           &gp);
        stats.policy_loss = pres.loss;
        clip_grad_norm(gp, p_.max_grad_norm);
        stats.skipped += adam_step(policy_.params(), gp, opt_policy_) ? 0 : 1;

        if (p_.auto_alpha) {
            // J(alpha) = -log_alpha * (mean log pi + target entropy), detached
            Vec params{log_alpha_};
            Vec grad{-(pres.mean_log_prob + target_entropy_)};
            stats.skipped += adam_step(params, grad, opt_alpha_) ? 0 : 1;
            log_alpha_ = params[0];
        }
        stats.alpha = alpha();

        soft_update(q1_target_, q1_, p_.tau);
        soft_update(q2_target_, q2_, p_.tau);
        return stats;
    }

    bool gamma_update_due(long step) const {
        const GammaSettings& g = p_.gamma;
        return variant_trains_net(g.variant) && step > g.warmup_steps &&
               step % g.update_every == 0 && ready_to_update();
    }

    /// One gamma-side update; which objective runs depends on the variant.
    /// Touches only the gamma parameters.
    GammaLossTerms update_gamma(long step) {
        const GammaSettings& g = p_.gamma;
        GammaLossTerms terms;
        if (!variant_trains_net(g.variant) || !gamma_net_) return terms;
        Vec grads(gamma_net_->net().param_count(), 0.0);
        switch (g.variant) {
            case GammaVariant::kAdaGammaRc: {
                const auto windows = buffer_.sample_windows(p_.batch_size, g.nstep, rng_gamma_);
                terms = full_gamma_loss(*gamma_net_, windows, soft_value_fn(), reference_,
                                        g.weights, g.nstep, &grads);
                break;
            }
            case GammaVariant::kNaiveTd: {
                const auto samples = sample_td(p_.batch_size);
                terms.rc = naive_td_gamma_loss(*gamma_net_, samples, soft_value_fn(), &grads);
                terms.total = terms.rc;
                break;
            }
            case GammaVariant::kCrossValidated: {
                terms = cross_validated_update(step, grads);
                break;
            }
            default:
                return terms;
        }
        clip_grad_norm(grads, p_.max_grad_norm);
        if (!adam_step(gamma_net_->net().params(), grads, opt_gamma_)) gamma_skips_ += 1;
        last_gamma_terms_ = terms;
        return terms;
    }

    /// Episode bookkeeping: the reference discount tracks the replay-mean
    /// predicted discount every `ref_period` episodes after warmup.
    void on_episode_end(long step) {
        episodes_ += 1;
        episodes_since_ref_ += 1;
        const GammaSettings& g = p_.gamma;
        if (!variant_trains_net(g.variant)) return;
        reference_.warmup_done = step > g.warmup_steps;
        if (episodes_since_ref_ >= reference_.period && reference_.warmup_done &&
            ready_to_update()) {
            reference_.update(replay_mean_gamma());
            episodes_since_ref_ = 0;
        }
    }

    GammaDiagnostics gamma_diagnostics(long step) {
        const GammaSettings& g = p_.gamma;
        if (g.variant == GammaVariant::kFixed)
            return {g.fixed_value, g.fixed_value, g.fixed_value};
        if (buffer_.size() == 0) return {g.init_value, g.init_value, g.init_value};
        const std::size_t n = std::min<std::size_t>(256, buffer_.size());
        const auto batch = buffer_.sample_batch(n, rng_gamma_);
        GammaDiagnostics d;
        d.min = 1.0;
        d.max = 0.0;
        for (const Transition* t : batch) {
            const double v = g.variant == GammaVariant::kUncertainty
                                 ? (step <= g.warmup_steps
                                        ? uncertainty_.base_gamma
                                        : uncertainty_(critic_disagreement(t->s, t->a)))
                                 : (*gamma_net_)(t->s);
            d.mean += v;
            d.min = std::min(d.min, v);
            d.max = std::max(d.max, v);
        }
        d.mean /= static_cast<double>(n);
        if (d.min == d.max) d.mean = d.min; // exact when the source is constant
        return d;
    }

    const GammaLossTerms& last_gamma_terms() const { return last_gamma_terms_; }
    long episodes() const { return episodes_; }
    long gamma_skips() const { return gamma_skips_; }

    /// Soft value estimate under the target critics; the stop-gradient
    /// value source for the gamma objectives.
    double soft_value(const Vec& s) {
        const Vec head = policy_.forward(s);
        Vec a_env;
        double lp = 0.0;
        if (p_.gamma.rc_fresh_action) {
            Vec noise(act_);
            for (double& v : noise) v = rng_gamma_.normal();
            const SquashedSample smp = squash_sample(head.data(), noise.data(), act_, center_, half_);
            a_env = smp.action_env;
            lp = smp.log_prob;
        } else {
            Vec zero(act_, 0.0);
            const SquashedSample smp = squash_sample(head.data(), zero.data(), act_, center_, half_);
            a_env = smp.action_env;
            lp = smp.log_prob;
        }
        Vec sa(obs_ + act_);
        for (int j = 0; j < obs_; ++j) sa[j] = s[j];
        for (int j = 0; j < act_; ++j) sa[obs_ + j] = a_env[j];
        const double q = std::min(q1_target_.forward(sa)[0], q2_target_.forward(sa)[0]);
        return q - alpha() * lp;
    }

private:
    Params p_;
    int obs_, act_;
    double center_, half_, act_low_, act_high_;
    Rng rng_action_, rng_batch_, rng_update_, rng_gamma_;
    ReplayBuffer buffer_;

    Mlp policy_, q1_, q2_, q1_target_, q2_target_;
    double log_alpha_ = 0.0;
    double target_entropy_ = -1.0;
    std::optional<GammaNet> gamma_net_;
    UncertaintyGamma uncertainty_;
    ReferenceDiscount reference_;

    AdamState opt_policy_, opt_q1_, opt_q2_, opt_alpha_, opt_gamma_;
    GammaLossTerms last_gamma_terms_;
    long episodes_ = 0;
    long episodes_since_ref_ = 0;
    long gamma_skips_ = 0;

    static void soft_update(Mlp& target, const Mlp& online, double tau) {
        Vec& t = target.params();
        const Vec& o = online.params();
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = (1.0 - tau) * t[i] + tau * o[i];
    }

    double critic_disagreement(const Vec& s, const Vec& a_env) const {
        Vec sa(obs_ + act_);
        for (int j = 0; j < obs_; ++j) sa[j] = s[j];
        for (int j = 0; j < act_; ++j) sa[obs_ + j] = a_env[j];
        return std::abs(q1_.forward(sa)[0] - q2_.forward(sa)[0]);
    }

    void update_uncertainty_beta(const std::vector<const Transition*>& batch, const Matrix& sa,
                                 const TargetInfo& targets) {
        // d(critic MSE)/d(beta) through the target's gamma
        MlpCache c1, c2;
        const Matrix q1_out = q1_.forward(sa, c1);
        const Matrix q2_out = q2_.forward(sa, c2);
        const double inv_b = 1.0 / static_cast<double>(batch.size());
        double grad = 0.0;
        for (std::size_t i = 0; i < batch.size(); ++i) {
            if (batch[i]->terminal) continue;
            const double d = critic_disagreement(batch[i]->s, batch[i]->a);
            const double dy = targets.soft_next[i] * uncertainty_.dgamma_dbeta(d);
            const double resid = (q1_out(i, 0) - targets.targets[i]) +
                                 (q2_out(i, 0) - targets.targets[i]);
            grad += -2.0 * resid * dy * inv_b;
        }
        if (std::isfinite(grad)) uncertainty_.sgd_step(grad);
    }

    ValueFn soft_value_fn() {
        return [this](const Vec& s) { return soft_value(s); };
    }

    std::vector<TdSample> sample_td(std::size_t n) {
        std::vector<TdSample> out;
        out.reserve(n);
        for (const Transition* t : buffer_.sample_batch(n, rng_gamma_))
            out.push_back({t->s, t->s_next, t->r, t->terminal});
        return out;
    }

    double replay_mean_gamma() {
        const std::size_t n = std::min<std::size_t>(256, buffer_.size());
        const auto batch = buffer_.sample_batch(n, rng_gamma_);
        double mean = 0.0;
        for (const Transition* t : batch) mean += (*gamma_net_)(t->s) / static_cast<double>(n);
        return mean;
    }

    /// Cross-validated gamma objective: one SGD step on critic snapshots
    /// using half A, TD errors for the loss on half B.
    GammaLossTerms cross_validated_update(long step, Vec& grads) {
        GammaLossTerms terms;
        const auto batch = buffer_.sample_batch(p_.batch_size, rng_gamma_);
        const std::size_t half_n = batch.size() / 2;
        if (half_n == 0) return terms;
        std::vector<const Transition*> half_a(batch.begin(), batch.begin() + half_n);
        std::vector<const Transition*> half_b(batch.begin() + half_n, batch.end());

        Mlp q1_snap = q1_, q2_snap = q2_;
        Matrix states_a(half_a.size(), obs_), actions_a(half_a.size(), act_);
        Vec gammas_a(half_a.size());
        for (std::size_t i = 0; i < half_a.size(); ++i) {
            for (int j = 0; j < obs_; ++j) states_a(i, j) = half_a[i]->s[j];
            for (int j = 0; j < act_; ++j) actions_a(i, j) = half_a[i]->a[j];
            gammas_a[i] = target_gamma(half_a[i]->s, half_a[i]->a, step);
        }
        Matrix noise_a(half_a.size(), act_);
        for (double& v : noise_a.data) v = rng_gamma_.normal();
        const TargetInfo ta = build_targets(policy_, q1_target_, q2_target_, half_a, noise_a,
                                            gammas_a, alpha(), center_, half_);
        const Matrix sa_a = concat_state_action(states_a, actions_a);
        for (Mlp* q : {&q1_snap, &q2_snap}) {
            Vec g(q->param_count(), 0.0);
            mse_loss_and_grad(*q, sa_a, ta.targets, &g);
            for (std::size_t i = 0; i < g.size(); ++i) q->params()[i] -= p_.lr * g[i];
        }

        auto value_after_a = [this, &q1_snap, &q2_snap](const Vec& s) {
            const Vec head = policy_.forward(s);
            Vec noise(act_);
            for (double& v : noise) v = rng_gamma_.normal();
            const SquashedSample smp = squash_sample(head.data(), noise.data(), act_, center_, half_);
            Vec sa(obs_ + act_);
            for (int j = 0; j < obs_; ++j) sa[j] = s[j];
            for (int j = 0; j < act_; ++j) sa[obs_ + j] = smp.action_env[j];
            return std::min(q1_snap.forward(sa)[0], q2_snap.forward(sa)[0]) -
                   alpha() * smp.log_prob;
        };

        std::vector<TdSample> td_a, td_b;
        for (const Transition* t : half_a) td_a.push_back({t->s, t->s_next, t->r, t->terminal});
        for (const Transition* t : half_b) td_b.push_back({t->s, t->s_next, t->r, t->terminal});
        terms.rc = cross_validated_loss(*gamma_net_, td_a, td_b, value_after_a, &grads);
        terms.total = terms.rc;
        return terms;
    }
};

} // namespace adagamma::sac
