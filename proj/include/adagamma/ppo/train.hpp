#pragma once

#include <cmath>
#include <limits>
#include <memory>

#include "adagamma/env/env.hpp"
#include "adagamma/harness/run_log.hpp"
#include "adagamma/ppo/agent.hpp"
#include "adagamma/sac/train.hpp" // evaluate_policy / TrainSettings / TrainResult

namespace adagamma::ppo {

using sac::EvalStats;
using sac::TrainResult;
using sac::TrainSettings;
using sac::evaluate_policy;

/// Collects one fixed-length rollout, resetting the environment at episode
/// boundaries and tagging terminals vs truncations.
inline Rollout collect_rollout(Agent& agent, Env& env, Vec& state, int steps, Rng& rng_env) {
    const int obs = env.obs_size();
    const int act = env.action_size();
    Rollout r;
    r.states = Matrix(steps, obs);
    r.actions = Matrix(steps, act);
    r.next_obs = Matrix(steps, obs);
    r.log_probs.resize(steps);
    r.rewards.resize(steps);
    r.terminal.assign(steps, 0);
    r.boundary.assign(steps, 0);

    for (int t = 0; t < steps; ++t) {
        for (int j = 0; j < obs; ++j) r.states(t, j) = state[j];
        const Agent::ActionSample a = agent.act_stochastic(state);
        const EnvStep es = env.step(a.action, rng_env);
        for (int j = 0; j < act; ++j) r.actions(t, j) = a.action[j];
        for (int j = 0; j < obs; ++j) r.next_obs(t, j) = es.next_state[j];
        r.log_probs[t] = a.log_prob;
        r.rewards[t] = es.reward;
        r.terminal[t] = es.terminal ? 1 : 0;
        if (es.terminal || es.truncated) {
            r.boundary[t] = 1;
            state = env.reset(rng_env);
            agent.count_episode();
        } else {
            state = es.next_state;
        }
    }
    return r;
}

/// The on-policy loop: collect, freeze discounts, residuals/advantages,
/// K epochs, then the gamma update; evaluation at the configured cadence.
inline TrainResult train(Agent& agent, Env& env, const TrainSettings& ts, std::uint64_t seed,
                         RunLog* log = nullptr) {
    Rng rng_env = Rng(seed).fork(10);
    Rng rng_eval = Rng(seed).fork(11);
    std::unique_ptr<Env> eval_env = env.clone();

    TrainResult result;
    Vec state = env.reset(rng_env);
    long env_steps = 0;
    long next_eval = ts.eval_interval;
    UpdateStats last_update;
    GammaLossTerms last_terms;

    while (env_steps < ts.max_steps) {
        agent.refresh_action_std(env_steps);
        Rollout rollout = collect_rollout(agent, env, state,
                                          agent.params().rollout_steps, rng_env);
        env_steps += agent.params().rollout_steps;
        rollout.gammas = agent.freeze_gammas(rollout.states);
        agent.fill_values(rollout);
        last_update = agent.update(rollout);
        result.skipped_optimizer_steps += last_update.skipped;
        last_terms = agent.update_gamma(rollout);

        while (next_eval <= env_steps) {
            const EvalStats ev = evaluate_policy(*eval_env, rng_eval, ts.eval_episodes,
                                                 [&](const Vec& s) {
                                                     return agent.act_deterministic(s);
                                                 });
            result.final_eval_mean = ev.mean;
            result.final_eval_std = ev.stddev;
            if (log) {
                double gmin = 1.0, gmax = 0.0, gmean = 0.0;
                for (double g : rollout.gammas) {
                    gmin = std::min(gmin, g);
                    gmax = std::max(gmax, g);
                    gmean += g;
                }
                gmean /= static_cast<double>(rollout.gammas.size());
                if (gmin == gmax) gmean = gmin;
                LogRow row;
                row.step = next_eval;
                row.episode = agent.episodes();
                row.eval_return_mean = ev.mean;
                row.eval_return_std = ev.stddev;
                row.mean_gamma = gmean;
                row.min_gamma = gmin;
                row.max_gamma = gmax;
                row.gamma_loss_rc = last_terms.rc;
                row.gamma_loss_dev = last_terms.dev;
                row.gamma_loss_var = last_terms.var;
                row.gamma_loss_bound = last_terms.bound;
                row.critic_loss = last_update.value_loss;
                row.policy_loss = last_update.policy_loss;
                row.alpha = 0.0; // no temperature in this adapter
                row.gamma_ref = agent.reference().value;
                log->append(row);
            }
            if (!std::isnan(ts.early_stop_return) && ev.mean >= ts.early_stop_return) {
                result.early_stopped = true;
                result.steps = env_steps;
                result.episodes = agent.episodes();
                return result;
            }
            next_eval += ts.eval_interval;
        }
    }
    result.steps = env_steps;
    result.episodes = agent.episodes();
    return result;
}

} // namespace adagamma::ppo
