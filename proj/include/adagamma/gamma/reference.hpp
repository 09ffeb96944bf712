#pragma once

namespace adagamma {

/// Slowly adaptive reference discount. The EMA is a convex combination, so
/// the value can never leave [gamma_min, gamma_max] once fed in-range means.
struct ReferenceDiscount {
    double value = 0.98;
    double tau = 0.1;
    int period = 5;          // episodes for the off-policy adapter, updates for the on-policy one
    bool adaptive = true;
    bool warmup_done = false;

    /// Applies the EMA when the gate is open; otherwise a no-op.
    void update(double replay_mean_gamma) {
        if (!adaptive || !warmup_done) return;
        value = (1.0 - tau) * value + tau * replay_mean_gamma;
    }
};

} // namespace adagamma
