#pragma once

#include <cmath>
#include <stdexcept>

#include "adagamma/numerics/matrix.hpp"
#include "adagamma/numerics/mlp.hpp"
#include "adagamma/numerics/rng.hpp"

namespace adagamma {

inline double sigmoid(double x) {
    return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

inline double logit(double p) { return std::log(p / (1.0 - p)); }

/// Batch evaluation cache for gamma-loss backprop.
struct GammaBatch {
    MlpCache cache;
    Vec logits; // g(s) per sample
    Vec gammas; // rescaled per sample
};

/// State-conditioned discount: gamma(s) = gmin + (gmax - gmin) * sigmoid(g(s))
/// with g a small MLP. Bounded by construction for every input. The final
/// layer starts with zero weights and a bias chosen so the net outputs
/// `init_gamma` everywhere until trained, which keeps warmup targets at the
/// configured default without a separate code path.
class GammaNet {
public:
    GammaNet() = default;

    GammaNet(int obs_size, int hidden, double gamma_min, double gamma_max,
             double init_gamma, Rng& rng, double boundary_margin = 0.005)
        : net_(obs_size, hidden, hidden, 1, rng), gamma_min_(gamma_min), gamma_max_(gamma_max),
          boundary_margin_(boundary_margin) {
        if (!(0.0 <= gamma_min && gamma_min <= gamma_max && gamma_max < 1.0))
            throw std::invalid_argument("GammaNet: need 0 <= gamma_min <= gamma_max < 1");
        double* w = net_.last_layer_weights();
        for (std::size_t i = 0; i < net_.last_layer_weight_count(); ++i) w[i] = 0.0;
        if (span() == 0.0) {
            // degenerate bounds: the net is a constant gamma_min and all
            // gamma gradients vanish (the fixed-discount reduction case)
            *net_.last_layer_bias() = 0.0;
        } else {
            if (!(init_gamma > gamma_min && init_gamma < gamma_max))
                throw std::invalid_argument(
                    "GammaNet: init_gamma must lie strictly inside the bounds");
            *net_.last_layer_bias() = logit((init_gamma - gamma_min) / (gamma_max - gamma_min));
        }
    }

    double gamma_min() const { return gamma_min_; }
    double gamma_max() const { return gamma_max_; }
    double span() const { return gamma_max_ - gamma_min_; }
    double boundary_margin() const { return boundary_margin_; }

    Mlp& net() { return net_; }
    const Mlp& net() const { return net_; }

    double logit_of(const Vec& s) const { return net_.forward(s)[0]; }

    /// gamma(s); pure and reentrant.
    double operator()(const Vec& s) const { return rescale(logit_of(s)); }

    double rescale(double raw_logit) const {
        return gamma_min_ + span() * sigmoid(raw_logit);
    }

    GammaBatch eval_batch(const Matrix& states) const {
        GammaBatch b;
        net_.forward(states, b.cache);
        b.logits.resize(states.rows);
        b.gammas.resize(states.rows);
        for (std::size_t i = 0; i < states.rows; ++i) {
            b.logits[i] = b.cache.out(i, 0);
            b.gammas[i] = rescale(b.logits[i]);
        }
        return b;
    }

    /// Accumulate d(loss)/d(params) given per-sample dL/dgamma coefficients.
    void backward(const GammaBatch& batch, const Vec& dloss_dgamma, Vec& grads) const {
        Matrix upstream(batch.logits.size(), 1);
        for (std::size_t i = 0; i < batch.logits.size(); ++i) {
            const double s = sigmoid(batch.logits[i]);
            upstream(i, 0) = dloss_dgamma[i] * span() * s * (1.0 - s);
        }
        net_.backward(batch.cache, upstream, grads);
    }

private:
    Mlp net_;
    double gamma_min_ = 0.900;
    double gamma_max_ = 0.999;
    double boundary_margin_ = 0.005;
};

} // namespace adagamma
