#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "adagamma/numerics/matrix.hpp"
#include "adagamma/numerics/rng.hpp"

namespace adagamma {

/// Finite MDP with a per-state discount vector, the exact-arithmetic object
/// behind the operator certificates.
struct TabularMdp {
    int n_states = 0;
    int n_actions = 0;
    std::vector<double> transitions; // P[s][a][s'], row-normalized
    Matrix rewards;                  // r[s][a]
    Vec gamma;                       // gamma[s] in [0, 1)

    double p(int s, int a, int s2) const {
        return transitions[(static_cast<std::size_t>(s) * n_actions + a) * n_states + s2];
    }
    double& p(int s, int a, int s2) {
        return transitions[(static_cast<std::size_t>(s) * n_actions + a) * n_states + s2];
    }

    /// Largest per-state discount; the contraction modulus bound.
    double beta() const {
        double b = 0.0;
        for (double g : gamma) b = std::max(b, g);
        return b;
    }

    double max_abs_reward() const {
        double r = 0.0;
        for (double v : rewards.data) r = std::max(r, std::abs(v));
        return r;
    }

    void validate() const {
        if (n_states < 1 || n_actions < 1)
            throw std::invalid_argument("TabularMdp: empty state or action set");
        for (int s = 0; s < n_states; ++s) {
            if (!(gamma[s] >= 0.0 && gamma[s] < 1.0))
                throw std::invalid_argument("TabularMdp: gamma[s] outside [0,1)");
            for (int a = 0; a < n_actions; ++a) {
                double sum = 0.0;
                for (int s2 = 0; s2 < n_states; ++s2) {
                    const double v = p(s, a, s2);
                    if (v < 0.0 || !std::isfinite(v))
                        throw std::invalid_argument("TabularMdp: bad transition probability");
                    sum += v;
                }
                if (std::abs(sum - 1.0) > 1e-12)
                    throw std::invalid_argument("TabularMdp: transition row does not sum to 1");
                if (!std::isfinite(rewards(s, a)))
                    throw std::invalid_argument("TabularMdp: non-finite reward");
            }
        }
    }
};

/// Random instance generator. Transition rows come from normalized unit
/// exponentials (flat Dirichlet) with a `sparsity` fraction of entries
/// zeroed and the row renormalized; at least one entry always survives.
inline TabularMdp random_mdp(int n_states, int n_actions, double sparsity,
                             double reward_lo, double reward_hi,
                             double gamma_lo, double gamma_hi, Rng& rng) {
    if (n_states < 1 || n_actions < 1)
        throw std::invalid_argument("random_mdp: need at least one state and action");
    if (!(gamma_lo >= 0.0 && gamma_hi < 1.0 && gamma_lo <= gamma_hi))
        throw std::invalid_argument("random_mdp: gamma range must lie inside [0, 1)");
    if (sparsity < 0.0 || sparsity >= 1.0)
        throw std::invalid_argument("random_mdp: sparsity must be in [0, 1)");

    TabularMdp mdp;
    mdp.n_states = n_states;
    mdp.n_actions = n_actions;
    mdp.transitions.assign(static_cast<std::size_t>(n_states) * n_actions * n_states, 0.0);
    mdp.rewards = Matrix(n_states, n_actions);
    mdp.gamma.resize(n_states);

    const int zeroed = std::min(n_states - 1, static_cast<int>(sparsity * n_states));
    std::vector<int> order(n_states);
    for (int s = 0; s < n_states; ++s) {
        for (int a = 0; a < n_actions; ++a) {
            double sum = 0.0;
            for (int s2 = 0; s2 < n_states; ++s2) {
                const double e = -std::log(1.0 - rng.uniform());
                mdp.p(s, a, s2) = e;
                sum += e;
            }
            // Fisher-Yates prefix to pick which entries to zero.
            for (int i = 0; i < n_states; ++i) order[i] = i;
            for (int i = 0; i < zeroed; ++i) {
                const int j = static_cast<int>(rng.uniform_int(i, n_states - 1));
                std::swap(order[i], order[j]);
                sum -= mdp.p(s, a, order[i]);
                mdp.p(s, a, order[i]) = 0.0;
            }
            for (int s2 = 0; s2 < n_states; ++s2) mdp.p(s, a, s2) /= sum;
            mdp.rewards(s, a) = rng.uniform(reward_lo, reward_hi);
        }
        mdp.gamma[s] = rng.uniform(gamma_lo, gamma_hi);
    }
    mdp.validate();
    return mdp;
}

} // namespace adagamma
