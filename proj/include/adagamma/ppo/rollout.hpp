#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "adagamma/numerics/matrix.hpp"

namespace adagamma::ppo {

/// One on-policy batch. Discounts are computed once from the rollout states
/// and stay frozen across every optimization epoch of the update; the
/// terminal/boundary flags drive residual masking and recursion restarts.
struct Rollout {
    Matrix states;   // T x obs
    Matrix actions;  // T x act
    Matrix next_obs; // T x obs, the actual successor observation per step
    Vec log_probs;   // T, behavior log pi(a_t|s_t)
    Vec rewards;     // T
    Vec values;      // T, V(s_t)
    /// V(next_obs[t]): at episode boundaries this is the pre-reset state's
    /// value, at the rollout tail the final observation's. Ignored where
    /// `terminal` is set.
    Vec next_values;
    std::vector<std::uint8_t> terminal; // true MDP terminal after step t
    std::vector<std::uint8_t> boundary; // episode ended after step t (terminal or truncation)
    Vec gammas;                         // frozen gamma_t = gamma(s_t)

    std::size_t length() const { return rewards.size(); }
};

/// delta_t = r_t + gamma_t V(s_{t+1}) - V(s_t), with V(s_{t+1}) = 0 at true
/// terminals and the stored bootstrap value at truncations.
inline Vec td_residuals(const Rollout& r) {
    const std::size_t t_len = r.length();
    Vec delta(t_len);
    for (std::size_t t = 0; t < t_len; ++t) {
        const double vnext = r.terminal[t] ? 0.0 : r.next_values[t];
        delta[t] = r.rewards[t] + r.gammas[t] * vnext - r.values[t];
    }
    return delta;
}

/// Backward recursion A_t = delta_t + gamma_t * lambda * A_{t+1}, restarting
/// at episode boundaries inside the rollout.
inline Vec gae_adaptive(const Rollout& r, double lambda) {
    const std::size_t t_len = r.length();
    const Vec delta = td_residuals(r);
    Vec adv(t_len);
    double carry = 0.0;
    for (std::size_t t = t_len; t-- > 0;) {
        if (r.boundary[t]) carry = 0.0;
        carry = delta[t] + r.gammas[t] * lambda * carry;
        adv[t] = carry;
    }
    return adv;
}

/// Direct product-of-gammas expansion of the advantage at index t, for one
/// episode segment: A_t = delta_t + sum_l (prod_{k<l} gamma_{t+k}) lambda^l delta_{t+l}.
/// Exists as the independent cross-check of the recursion.
inline double gae_expansion(std::span<const double> deltas, std::span<const double> gammas,
                            double lambda, std::size_t t) {
    if (t >= deltas.size()) throw std::out_of_range("gae_expansion: index out of range");
    double acc = deltas[t];
    double weight = 1.0;
    for (std::size_t l = 1; l + t < deltas.size(); ++l) {
        weight *= gammas[t + l - 1] * lambda;
        acc += weight * deltas[t + l];
    }
    return acc;
}

/// Product-weighted n-step value target from index t:
/// sum_k (prod_{j<k} gamma_{t+j}) r_{t+k} + (prod_{j<n} gamma_{t+j}) V(s_{t+n}).
/// The window shortens at episode boundaries; a true terminal drops the
/// bootstrap term.
inline double nstep_value_target(const Rollout& r, std::size_t t, int n) {
    if (n < 1) throw std::invalid_argument("nstep_value_target: n must be >= 1");
    if (t >= r.length()) throw std::out_of_range("nstep_value_target: index out of range");
    double acc = 0.0;
    double weight = 1.0;
    std::size_t k = t;
    while (true) {
        acc += weight * r.rewards[k];
        weight *= r.gammas[k];
        const bool stop = r.boundary[k] || k + 1 >= r.length() ||
                          static_cast<int>(k - t) + 1 >= n;
        if (stop) {
            if (!r.terminal[k]) acc += weight * r.next_values[k];
            return acc;
        }
        k += 1;
    }
}

/// In-place normalization to zero mean and unit (population) std. When the
/// spread is degenerate the array is zeroed and the guard reported.
inline bool normalize_advantages(Vec& adv) {
    if (adv.size() < 2)
        throw std::invalid_argument("normalize_advantages: need at least two elements");
    double mean = 0.0;
    for (double a : adv) mean += a;
    mean /= static_cast<double>(adv.size());
    double var = 0.0;
    for (double a : adv) var += (a - mean) * (a - mean);
    var /= static_cast<double>(adv.size());
    const double stddev = std::sqrt(var);
    if (stddev < 1e-8) {
        for (double& a : adv) a = 0.0;
        return true;
    }
    for (double& a : adv) a = (a - mean) / stddev;
    return false;
}

/// FNV-1a over the byte representation; used to assert the frozen-gamma
/// contract across optimization epochs.
inline std::uint64_t hash_doubles(std::span<const double> xs) {
    std::uint64_t h = 1469598103934665603ULL;
    for (double x : xs) {
        std::uint64_t bits;
        static_assert(sizeof(bits) == sizeof(x));
        __builtin_memcpy(&bits, &x, sizeof(bits));
        for (int i = 0; i < 8; ++i) {
            h ^= (bits >> (8 * i)) & 0xffULL;
            h *= 1099511628211ULL;
        }
    }
    return h;
}

} // namespace adagamma::ppo
