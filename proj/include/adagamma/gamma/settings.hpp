#pragma once

#include "adagamma/gamma/losses.hpp"

namespace adagamma {

enum class GammaVariant { kFixed, kAdaGammaRc, kCrossValidated, kUncertainty, kNaiveTd };

inline bool variant_trains_net(GammaVariant v) {
    return v == GammaVariant::kAdaGammaRc || v == GammaVariant::kCrossValidated ||
           v == GammaVariant::kNaiveTd;
}

/// Discount-side knobs shared by both adapters. The off-policy adapter gates
/// gamma training on `warmup_steps` (environment steps), the on-policy one
/// on `warmup_episodes`; each reads only its own gate.
struct GammaSettings {
    GammaVariant variant = GammaVariant::kAdaGammaRc;
    double gamma_min = 0.900;
    double gamma_max = 0.999;
    double init_value = 0.98;  // net output at init; also the pre-warmup target discount
    double fixed_value = 0.99; // kFixed
    int hidden = 256;
    double lr = 1e-4;
    int nstep = 5;
    long warmup_steps = 100000;
    long warmup_episodes = 200;
    int update_every = 20; // env steps between gamma updates (off-policy)
    GammaLossWeights weights;
    double boundary_margin = 0.005;
    double ref_init = 0.98;
    double ref_tau = 0.1;
    int ref_period = 5; // episodes (off-policy) or updates (on-policy)
    bool ref_adaptive = true;
    /// V(s) inside the gamma losses: fresh sampled action (true) or the
    /// deterministic policy mean (false). Off-policy adapter only.
    bool rc_fresh_action = true;
    // uncertainty-rule baseline
    double unc_eta = 1.0;
    double unc_beta_init = 2.0;
    double unc_beta_lr = 1e-3;
    double unc_base = 0.99;
};

} // namespace adagamma
