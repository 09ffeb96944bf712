#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>

#include "adagamma/gamma/gamma_net.hpp"
#include "adagamma/gamma/reference.hpp"
#include "adagamma/numerics/matrix.hpp"

namespace adagamma {

/// Value estimates fed to the gamma losses are always stop-gradient: the
/// losses return gradients for the gamma net alone.
using ValueFn = std::function<double(const Vec&)>;

/// A contiguous slice of one episode used as gamma-training supervision:
/// rewards r_t..r_{t+m-1} (m <= n), the immediate successor s_{t+1}, and the
/// last reachable state s_{t+m}. `tail_terminal` means the episode truly
/// terminated inside the window, which drops the bootstrap tail.
struct NStepWindow {
    Vec s0;
    Vec s1;
    Vec sn;
    Vec rewards;
    bool tail_terminal = false;

    /// d_t of the leading transition. Windows stop at terminals, so the
    /// first transition is terminal exactly when it is the only one.
    bool first_terminal() const { return tail_terminal && rewards.size() == 1; }
};

/// Plain transition view for the TD-style gamma objectives.
struct TdSample {
    Vec s;
    Vec s_next;
    double r = 0.0;
    bool terminal = false;
};

struct GammaLossWeights {
    double lambda_rc = 1.0;
    double lambda_dev = 0.005;
    double lambda_var = 0.012;
    double lambda_bound = 0.05;
    /// Anchor of the deviation penalty. When `anchor_to_ref` is set (the
    /// default) the live reference discount is used and `gamma_target` is
    /// ignored.
    double gamma_target = 0.98;
    bool anchor_to_ref = true;
};

/// The four raw objective terms (unweighted) plus the weighted total.
struct GammaLossTerms {
    double rc = 0.0;
    double dev = 0.0;
    double var = 0.0;
    double bound = 0.0;
    double total = 0.0;
};

namespace detail {

inline Matrix stack_lead_states(std::span<const NStepWindow> batch) {
    Matrix states(batch.size(), batch.front().s0.size());
    for (std::size_t i = 0; i < batch.size(); ++i)
        for (std::size_t j = 0; j < batch[i].s0.size(); ++j) states(i, j) = batch[i].s0[j];
    return states;
}

/// Per-window pieces of the return-consistency residual that do not depend
/// on gamma: the bootstrap multiplier V(s_{t+1}) (masked at a leading
/// terminal) and the n-step reference target.
struct RcParts {
    double bootstrap1 = 0.0;
    double target = 0.0;
};

inline RcParts rc_parts(const NStepWindow& w, const ValueFn& value_fn, double gamma_ref, int n) {
    const int m = static_cast<int>(w.rewards.size());
    if (m < 1 || m > n)
        throw std::invalid_argument("return_consistency_loss: window length outside [1, n]");
    RcParts p;
    p.bootstrap1 = w.first_terminal() ? 0.0 : value_fn(w.s1);
    double pw = 1.0;
    for (int k = 0; k < m; ++k) {
        p.target += pw * w.rewards[k];
        pw *= gamma_ref;
    }
    if (!w.tail_terminal) p.target += pw * value_fn(w.sn);
    return p;
}

} // namespace detail

/// Mean squared gap between the one-step bootstrap under the learned
/// discount, r_t + gamma(s_t) V(s_{t+1}), and the n-step return under the
/// reference discount. Gradients flow only through gamma(s_t).
inline double return_consistency_loss(const GammaNet& net, std::span<const NStepWindow> batch,
                                      const ValueFn& value_fn, double gamma_ref, int n,
                                      Vec* grad_out = nullptr) {
    if (n < 1) throw std::invalid_argument("return_consistency_loss: horizon n must be >= 1");
    if (batch.empty()) throw std::invalid_argument("return_consistency_loss: empty batch");

    const GammaBatch gb = net.eval_batch(detail::stack_lead_states(batch));
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    double loss = 0.0;
    Vec coeff(batch.size(), 0.0);
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto parts = detail::rc_parts(batch[i], value_fn, gamma_ref, n);
        const double resid = batch[i].rewards[0] + gb.gammas[i] * parts.bootstrap1 - parts.target;
        loss += resid * resid * inv_b;
        coeff[i] = 2.0 * resid * parts.bootstrap1 * inv_b;
    }
    if (grad_out) net.backward(gb, coeff, *grad_out);
    return loss;
}

/// Full gamma objective: weighted return consistency plus the deviation
/// anchor, the batch-variance penalty, and the boundary hinge.
inline GammaLossTerms full_gamma_loss(const GammaNet& net, std::span<const NStepWindow> batch,
                                      const ValueFn& value_fn, const ReferenceDiscount& ref,
                                      const GammaLossWeights& weights, int n,
                                      Vec* grad_out = nullptr) {
    if (n < 1) throw std::invalid_argument("full_gamma_loss: horizon n must be >= 1");
    if (batch.empty()) throw std::invalid_argument("full_gamma_loss: empty batch");

    const GammaBatch gb = net.eval_batch(detail::stack_lead_states(batch));
    const std::size_t b = batch.size();
    const double inv_b = 1.0 / static_cast<double>(b);
    const double target = weights.anchor_to_ref ? ref.value : weights.gamma_target;
    const double lo = net.gamma_min() + net.boundary_margin();
    const double hi = net.gamma_max() - net.boundary_margin();

    double mean_gamma = 0.0;
    for (double g : gb.gammas) mean_gamma += g * inv_b;

    GammaLossTerms terms;
    Vec coeff(b, 0.0);
    for (std::size_t i = 0; i < b; ++i) {
        const double g = gb.gammas[i];
        const auto parts = detail::rc_parts(batch[i], value_fn, ref.value, n);
        const double resid = batch[i].rewards[0] + g * parts.bootstrap1 - parts.target;
        terms.rc += resid * resid * inv_b;
        coeff[i] += weights.lambda_rc * 2.0 * resid * parts.bootstrap1 * inv_b;

        terms.dev += (g - target) * (g - target) * inv_b;
        coeff[i] += weights.lambda_dev * 2.0 * (g - target) * inv_b;

        terms.var += (g - mean_gamma) * (g - mean_gamma) * inv_b;
        coeff[i] += weights.lambda_var * 2.0 * (g - mean_gamma) * inv_b;

        if (g < lo) {
            terms.bound += (lo - g) * inv_b;
            coeff[i] -= weights.lambda_bound * inv_b;
        }
        if (g > hi) {
            terms.bound += (g - hi) * inv_b;
            coeff[i] += weights.lambda_bound * inv_b;
        }
    }
    terms.total = weights.lambda_rc * terms.rc + weights.lambda_dev * terms.dev +
                  weights.lambda_var * terms.var + weights.lambda_bound * terms.bound;
    if (grad_out) net.backward(gb, coeff, *grad_out);
    return terms;
}

namespace detail {

inline double td_squared_loss(const GammaNet& net, std::span<const TdSample> batch,
                              const ValueFn& value_fn, Vec* grad_out) {
    Matrix states(batch.size(), batch.front().s.size());
    for (std::size_t i = 0; i < batch.size(); ++i)
        for (std::size_t j = 0; j < batch[i].s.size(); ++j) states(i, j) = batch[i].s[j];
    const GammaBatch gb = net.eval_batch(states);
    const double inv_b = 1.0 / static_cast<double>(batch.size());
    double loss = 0.0;
    Vec coeff(batch.size(), 0.0);
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto& t = batch[i];
        const double vnext = t.terminal ? 0.0 : value_fn(t.s_next);
        const double delta = t.r + gb.gammas[i] * vnext - value_fn(t.s);
        loss += delta * delta * inv_b;
        coeff[i] = 2.0 * delta * vnext * inv_b;
    }
    if (grad_out) net.backward(gb, coeff, *grad_out);
    return loss;
}

} // namespace detail

/// The collapse-prone objective: minimize squared TD error straight through
/// gamma(s_t). Kept only for the collapse-demonstration experiment.
inline double naive_td_gamma_loss(const GammaNet& net, std::span<const TdSample> batch,
                                  const ValueFn& value_fn, Vec* grad_out = nullptr) {
    if (batch.empty()) throw std::invalid_argument("naive_td_gamma_loss: empty batch");
    return detail::td_squared_loss(net, batch, value_fn, grad_out);
}

/// Cross-validated objective: squared TD errors on half B, evaluated with a
/// value function that took one gradient step on half A only. The A half is
/// taken as evidence the split happened; only B enters the loss.
inline double cross_validated_loss(const GammaNet& net, std::span<const TdSample> batch_a,
                                   std::span<const TdSample> batch_b,
                                   const ValueFn& value_fn_after_a, Vec* grad_out = nullptr) {
    if (batch_a.empty() || batch_b.empty())
        throw std::invalid_argument("cross_validated_loss: empty half-batch");
    return detail::td_squared_loss(net, batch_b, value_fn_after_a, grad_out);
}

} // namespace adagamma
