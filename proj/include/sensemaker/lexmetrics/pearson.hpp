#pragma once

#include "sensemaker/common/error.hpp"

#include <cmath>
#include <span>

namespace sensemaker::lexmetrics {

/// Sample Pearson correlation coefficient.
inline double pearson(std::span<double const> xs, std::span<double const> ys)
{
    if (xs.size() != ys.size() || xs.size() < 2) {
        throw ArgumentError("pearson: need two aligned samples of length >= 2");
    }
    double const n = static_cast<double>(xs.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw ArgumentError("pearson: zero variance");
    }
    return sxy / std::sqrt(sxx * syy);
}

} // namespace sensemaker::lexmetrics
