#pragma once

#include <algorithm>
#include <cmath>

#include "adagamma/env/env.hpp"

namespace adagamma {

/// Torque-limited pendulum swing-up, the conventional formulation:
/// obs [cos th, sin th, thdot], reward -(wrap(th)^2 + 0.1 thdot^2 + 0.001 u^2),
/// semi-implicit Euler at dt=0.05, 200-step horizon, never terminal.
class PendulumEnv final : public Env {
public:
    static constexpr double kMaxTorque = 2.0;
    static constexpr double kMaxSpeed = 8.0;
    static constexpr double kDt = 0.05;
    static constexpr double kGravity = 10.0;
    static constexpr double kMass = 1.0;
    static constexpr double kLength = 1.0;
    static constexpr int kHorizon = 200;

    int obs_size() const override { return 3; }
    int action_size() const override { return 1; }
    double action_low() const override { return -kMaxTorque; }
    double action_high() const override { return kMaxTorque; }
    int horizon() const override { return kHorizon; }

    Vec reset(Rng& rng) override {
        theta_ = rng.uniform(-M_PI, M_PI);
        theta_dot_ = rng.uniform(-1.0, 1.0);
        steps_ = 0;
        return obs();
    }

    EnvStep step(const Vec& action, Rng&) override {
        const double u = std::clamp(action.at(0), -kMaxTorque, kMaxTorque);
        const double wrapped = wrap_angle(theta_);
        const double cost = wrapped * wrapped + 0.1 * theta_dot_ * theta_dot_ + 0.001 * u * u;

        const double theta_ddot =
            3.0 * kGravity / (2.0 * kLength) * std::sin(theta_) +
            3.0 / (kMass * kLength * kLength) * u;
        theta_dot_ = std::clamp(theta_dot_ + theta_ddot * kDt, -kMaxSpeed, kMaxSpeed);
        theta_ += theta_dot_ * kDt;
        steps_ += 1;

        EnvStep out;
        out.next_state = obs();
        out.reward = -cost;
        out.terminal = false;
        out.truncated = steps_ >= kHorizon;
        return out;
    }

    std::unique_ptr<Env> clone() const override { return std::make_unique<PendulumEnv>(*this); }

    double theta() const { return theta_; }
    double theta_dot() const { return theta_dot_; }

    static double wrap_angle(double x) {
        x = std::fmod(x + M_PI, 2.0 * M_PI);
        if (x < 0.0) x += 2.0 * M_PI;
        return x - M_PI;
    }

private:
    double theta_ = 0.0;
    double theta_dot_ = 0.0;
    int steps_ = 0;

    Vec obs() const { return {std::cos(theta_), std::sin(theta_), theta_dot_}; }
};

} // namespace adagamma
