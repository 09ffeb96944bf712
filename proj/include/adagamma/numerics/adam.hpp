#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "adagamma/numerics/matrix.hpp"

namespace adagamma {

/// Bias-corrected first-order adaptive optimizer state for one flat
/// parameter vector.
struct AdamState {
    double lr = 3e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    long step = 0;
    Vec m;
    Vec v;

    AdamState() = default;
    AdamState(std::size_t n, double learning_rate)
        : lr(learning_rate), m(n, 0.0), v(n, 0.0) {}
};

/// One update. Returns false and leaves params/state untouched when any
/// gradient entry is non-finite; the caller logs the skipped step.
inline bool adam_step(Vec& params, const Vec& grads, AdamState& st) {
    if (params.size() != grads.size() || params.size() != st.m.size())
        throw std::invalid_argument("adam_step: shape mismatch");
    for (double g : grads)
        if (!std::isfinite(g)) return false;

    st.step += 1;
    const double c1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.step));
    const double c2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        st.m[i] = st.beta1 * st.m[i] + (1.0 - st.beta1) * grads[i];
        st.v[i] = st.beta2 * st.v[i] + (1.0 - st.beta2) * grads[i] * grads[i];
        const double mhat = st.m[i] / c1;
        const double vhat = st.v[i] / c2;
        params[i] -= st.lr * mhat / (std::sqrt(vhat) + st.eps);
    }
    return true;
}

/// Global-norm gradient clipping; returns the pre-clip norm.
inline double clip_grad_norm(Vec& grads, double max_norm) {
    double sq = 0.0;
    for (double g : grads) sq += g * g;
    const double norm = std::sqrt(sq);
    if (max_norm > 0.0 && norm > max_norm) {
        const double scale = max_norm / norm;
        for (double& g : grads) g *= scale;
    }
    return norm;
}

} // namespace adagamma
