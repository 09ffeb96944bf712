#pragma once

#include <algorithm>
#include <cmath>

#include "adagamma/numerics/matrix.hpp"
#include "adagamma/numerics/mlp.hpp"
#include "adagamma/sac/losses.hpp" // kLog2Pi, mse_loss_and_grad

namespace adagamma::ppo {

/// Clipped-surrogate policy objective over one minibatch, for a Gaussian
/// policy with state-independent std:
///   L = -mean_i min(rho_i A_i, clip(rho_i, 1 +- eps) A_i) - c_ent H(std).
/// The entropy of a fixed-std Gaussian does not depend on the mean head, so
/// the bonus shifts the loss value without contributing gradient.
inline double clipped_surrogate_loss(const Mlp& policy, const Matrix& states,
                                     const Matrix& actions, const Vec& old_log_probs,
                                     const Vec& advantages, double action_std, double clip,
                                     double entropy_coef, Vec* grads = nullptr) {
    const std::size_t m = states.rows;
    const int act = static_cast<int>(actions.cols);
    const double inv_m = 1.0 / static_cast<double>(m);
    const double inv_var = 1.0 / (action_std * action_std);

    MlpCache cache;
    const Matrix mean = policy.forward(states, cache);

    const double entropy = act * (0.5 * (1.0 + sac::kLog2Pi) + std::log(action_std));
    double loss = -entropy_coef * entropy;
    Matrix upstream(m, act);
    for (std::size_t i = 0; i < m; ++i) {
        double lp_new = 0.0;
        for (int j = 0; j < act; ++j) {
            const double d = actions(i, j) - mean(i, j);
            lp_new += -0.5 * d * d * inv_var - std::log(action_std) - 0.5 * sac::kLog2Pi;
        }
        const double ratio = std::exp(lp_new - old_log_probs[i]);
        const double adv = advantages[i];
        const double clipped = std::clamp(ratio, 1.0 - clip, 1.0 + clip);
        loss += -std::min(ratio * adv, clipped * adv) * inv_m;
        const bool active = adv >= 0.0 ? ratio <= 1.0 + clip : ratio >= 1.0 - clip;
        const double dloss_dratio = active ? -adv * inv_m : 0.0;
        for (int j = 0; j < act; ++j) {
            const double dlp_dmu = (actions(i, j) - mean(i, j)) * inv_var;
            upstream(i, j) = dloss_dratio * ratio * dlp_dmu;
        }
    }
    if (grads) policy.backward(cache, upstream, *grads);
    return loss;
}

} // namespace adagamma::ppo
