#pragma once

#include <memory>

#include "adagamma/numerics/matrix.hpp"
#include "adagamma/numerics/rng.hpp"

namespace adagamma {

/// One environment transition. `terminal` marks a true MDP terminal (d_t=1);
/// `truncated` marks a horizon cap. The two are never set from the same
/// cause: bootstrapping continues through truncation.
struct EnvStep {
    Vec next_state;
    double reward = 0.0;
    bool terminal = false;
    bool truncated = false;
};

/// Uniform step interface for the desk-scale tasks. One env per training
/// run; mutable, single-owner.
class Env {
public:
    virtual ~Env() = default;
    virtual int obs_size() const = 0;
    virtual int action_size() const = 0;
    virtual double action_low() const = 0;
    virtual double action_high() const = 0;
    virtual int horizon() const = 0;
    virtual Vec reset(Rng& rng) = 0;
    virtual EnvStep step(const Vec& action, Rng& rng) = 0;
    virtual std::unique_ptr<Env> clone() const = 0;
};

} // namespace adagamma
