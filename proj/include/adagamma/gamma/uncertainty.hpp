#pragma once

#include <cmath>

#include "adagamma/gamma/gamma_net.hpp"

namespace adagamma {

/// Rule-based adaptive discount driven by critic disagreement d(s) >= 0:
/// gamma(s) = gamma_max - (gamma_max - gamma_min) * sigmoid(eta * beta * d(s)).
/// High disagreement shortens the effective horizon. The scale beta is the
/// only learnable piece and is trained by plain SGD on the host critic loss.
struct UncertaintyGamma {
    double beta = 2.0;
    double beta_lr = 1e-3;
    double eta = 1.0;
    double gamma_min = 0.900;
    double gamma_max = 0.999;
    double base_gamma = 0.99; // used before the host starts feeding disagreements

    double operator()(double disagreement) const {
        return gamma_max - (gamma_max - gamma_min) * sigmoid(eta * beta * disagreement);
    }

    double dgamma_dbeta(double disagreement) const {
        const double z = sigmoid(eta * beta * disagreement);
        return -(gamma_max - gamma_min) * z * (1.0 - z) * eta * disagreement;
    }

    void sgd_step(double dloss_dbeta) { beta -= beta_lr * dloss_dbeta; }
};

} // namespace adagamma
