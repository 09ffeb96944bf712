#pragma once

#include <algorithm>
#include <cmath>
#include <functional>

#include "adagamma/numerics/matrix.hpp"

namespace adagamma {

/// Central-difference comparison of an analytic gradient against f, one
/// parameter at a time. Returns the worst relative error, where the error of
/// a coordinate is |fd - analytic| scaled by max(|fd|, |analytic|) unless
/// both are tiny, in which case the absolute difference is used.
inline double grad_check(const std::function<double(const Vec&)>& f, Vec params,
                         const Vec& analytic, double h = 1e-5) {
    double worst = 0.0;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double saved = params[i];
        params[i] = saved + h;
        const double fp = f(params);
        params[i] = saved - h;
        const double fm = f(params);
        params[i] = saved;
        const double fd = (fp - fm) / (2.0 * h);
        const double a = analytic[i];
        const double scale = std::max(std::abs(fd), std::abs(a));
        const double diff = std::abs(fd - a);
        worst = std::max(worst, scale < 1e-8 ? diff : diff / scale);
    }
    return worst;
}

} // namespace adagamma
