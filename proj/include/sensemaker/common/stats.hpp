#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace sensemaker {

/// Sample count, mean, and population standard deviation of a sample.
struct Summary
{
    std::size_t n = 0;
    double mean = 0.0;
    double std = 0.0;

    friend bool operator==(Summary const &, Summary const &) = default;
};

inline Summary summarize(std::span<double const> xs)
{
    Summary s;
    s.n = xs.size();
    if (s.n == 0) {
        return s;
    }
    double sum = 0.0;
    for (double x : xs) {
        sum += x;
    }
    s.mean = sum / static_cast<double>(s.n);
    double ss = 0.0;
    for (double x : xs) {
        ss += (x - s.mean) * (x - s.mean);
    }
    s.std = std::sqrt(ss / static_cast<double>(s.n));
    return s;
}

} // namespace sensemaker
