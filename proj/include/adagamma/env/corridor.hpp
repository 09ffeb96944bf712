#pragma once

#include <algorithm>
#include <cmath>

#include "adagamma/env/env.hpp"

namespace adagamma {

/// Two-zone corridor on [0, 10]. The left half [0, 5) is noisy (additive
/// N(0, 0.5) on every move) and pays dense position-proportional shaping;
/// the right half [5, 10] is deterministic and pays a delayed +10 once the
/// agent stands at >= 9.5. Actions are bounded velocities in [-1, 1].
/// Episodes end by the 100-step horizon only. The zone split gives a
/// state-dependent discount something to find: short effective horizons pay
/// off on the left, long ones on the right. All constants are test fixtures;
/// see the config reference in the README before changing them.
class CorridorEnv final : public Env {
public:
    static constexpr double kLength = 10.0;
    static constexpr double kZoneBoundary = 5.0;
    static constexpr double kNoiseSigma = 0.5;
    static constexpr double kGoalPosition = 9.5;
    static constexpr double kGoalReward = 10.0;
    static constexpr double kShapingScale = 0.05;
    static constexpr int kHorizon = 100;

    int obs_size() const override { return 1; }
    int action_size() const override { return 1; }
    double action_low() const override { return -1.0; }
    double action_high() const override { return 1.0; }
    int horizon() const override { return kHorizon; }

    Vec reset(Rng&) override {
        position_ = 0.0;
        steps_ = 0;
        return obs();
    }

    EnvStep step(const Vec& action, Rng& rng) override {
        const double a = std::clamp(action.at(0), -1.0, 1.0);
        const double reward = reward_at(position_);

        double next = position_ + a;
        if (in_noisy_zone(position_)) next += rng.normal(0.0, kNoiseSigma);
        position_ = std::clamp(next, 0.0, kLength);
        steps_ += 1;

        EnvStep out;
        out.next_state = obs();
        out.reward = reward;
        out.terminal = false;
        out.truncated = steps_ >= kHorizon;
        return out;
    }

    std::unique_ptr<Env> clone() const override { return std::make_unique<CorridorEnv>(*this); }

    double position() const { return position_; }
    void set_position(double x) { position_ = std::clamp(x, 0.0, kLength); }

    static bool in_noisy_zone(double x) { return x < kZoneBoundary; }

    static double reward_at(double x) {
        if (in_noisy_zone(x)) return kShapingScale * x;
        return x >= kGoalPosition ? kGoalReward : 0.0;
    }

private:
    double position_ = 0.0;
    int steps_ = 0;

    // Observation rescaled to [-1, 1] so the first tanh layer stays out of
    // saturation across the whole corridor.
    Vec obs() const { return {position_ / (kLength / 2.0) - 1.0}; }
};

} // namespace adagamma
