#pragma once

#include <cmath>
#include <limits>
#include <memory>

#include "adagamma/env/env.hpp"
#include "adagamma/harness/run_log.hpp"
#include "adagamma/sac/agent.hpp"

namespace adagamma::sac {

struct TrainSettings {
    long max_steps = 150000;
    long eval_interval = 10000;
    int eval_episodes = 10;
    /// When finite: stop once the eval mean reaches this return.
    double early_stop_return = std::numeric_limits<double>::quiet_NaN();
};

struct TrainResult {
    long steps = 0;
    long episodes = 0;
    double final_eval_mean = std::numeric_limits<double>::quiet_NaN();
    double final_eval_std = 0.0;
    bool early_stopped = false;
    long skipped_optimizer_steps = 0;
};

struct EvalStats {
    double mean = 0.0;
    double stddev = 0.0;
};

/// Deterministic-policy evaluation: mean/population-std of the undiscounted
/// return over a fixed number of episodes.
template <typename ActFn>
EvalStats evaluate_policy(Env& env, Rng& rng, int episodes, ActFn&& act) {
    Vec returns(episodes, 0.0);
    for (int e = 0; e < episodes; ++e) {
        Vec s = env.reset(rng);
        while (true) {
            const EnvStep step = env.step(act(s), rng);
            returns[e] += step.reward;
            s = step.next_state;
            if (step.terminal || step.truncated) break;
        }
    }
    EvalStats st;
    for (double r : returns) st.mean += r / episodes;
    for (double r : returns) st.stddev += (r - st.mean) * (r - st.mean) / episodes;
    st.stddev = std::sqrt(st.stddev);
    return st;
}

/// The full off-policy loop: stream transitions into the replay buffer, one
/// gradient pass per environment step once warm, gamma updates on their own
/// cadence, the reference-discount EMA on episode boundaries, and periodic
/// deterministic evaluation.
inline TrainResult train(Agent& agent, Env& env, const TrainSettings& ts, std::uint64_t seed,
                         RunLog* log = nullptr) {
    Rng rng_env = Rng(seed).fork(10);
    Rng rng_eval = Rng(seed).fork(11);
    std::unique_ptr<Env> eval_env = env.clone();

    TrainResult result;
    Vec s = env.reset(rng_env);
    std::uint64_t episode_id = 0;
    int step_in_episode = 0;
    UpdateStats last_update;

    for (long step = 1; step <= ts.max_steps; ++step) {
        const Vec a = agent.act_explore(s);
        const EnvStep es = env.step(a, rng_env);
        agent.observe({s, a, es.reward, es.next_state, es.terminal,
                       episode_id, step_in_episode});
        s = es.next_state;
        step_in_episode += 1;
        if (es.terminal || es.truncated) {
            s = env.reset(rng_env);
            episode_id += 1;
            step_in_episode = 0;
            agent.on_episode_end(step);
        }

        if (agent.ready_to_update()) {
            for (int k = 0; k < agent.params().grad_steps_per_env_step; ++k) {
                last_update = agent.update(step);
                result.skipped_optimizer_steps += last_update.skipped;
            }
            if (agent.gamma_update_due(step)) agent.update_gamma(step);
        }

        if (step % ts.eval_interval == 0) {
            const EvalStats ev = evaluate_policy(*eval_env, rng_eval, ts.eval_episodes,
                                                 [&](const Vec& state) {
                                                     return agent.act_deterministic(state);
                                                 });
            result.final_eval_mean = ev.mean;
            result.final_eval_std = ev.stddev;
            if (log) {
                const GammaDiagnostics gd = agent.gamma_diagnostics(step);
                const GammaLossTerms& gl = agent.last_gamma_terms();
                LogRow row;
                row.step = step;
                row.episode = static_cast<long>(episode_id);
                row.eval_return_mean = ev.mean;
                row.eval_return_std = ev.stddev;
                row.mean_gamma = gd.mean;
                row.min_gamma = gd.min;
                row.max_gamma = gd.max;
                row.gamma_loss_rc = gl.rc;
                row.gamma_loss_dev = gl.dev;
                row.gamma_loss_var = gl.var;
                row.gamma_loss_bound = gl.bound;
                row.critic_loss = last_update.critic_loss;
                row.policy_loss = last_update.policy_loss;
                row.alpha = last_update.alpha;
                row.gamma_ref = agent.reference().value;
                log->append(row);
            }
            if (!std::isnan(ts.early_stop_return) && ev.mean >= ts.early_stop_return) {
                result.early_stopped = true;
                result.steps = step;
                result.episodes = agent.episodes();
                return result;
            }
        }
    }
    result.steps = ts.max_steps;
    result.episodes = agent.episodes();
    return result;
}

} // namespace adagamma::sac
