#pragma once

#include <cmath>
#include <compare>
#include <optional>

namespace sensemaker::adversarial {

/// A rating on the 0..100 scale that has already been normalized. Keeping it
/// a distinct type makes the rescue rule impossible to apply twice.
struct RescuedScore
{
    double value = 0.0;

    friend auto operator<=>(RescuedScore const &, RescuedScore const &) = default;
};

/// Normalizes a third-party rating. Ratings at or below 1 are treated as
/// having been given on a 0..1 scale and multiplied by 100. Values outside
/// [0, 100] or non-finite values yield no rating.
inline std::optional<RescuedScore> rescue_rating(double raw)
{
    if (!std::isfinite(raw) || raw < 0.0 || raw > 100.0) {
        return std::nullopt;
    }
    return RescuedScore{raw <= 1.0 ? raw * 100.0 : raw};
}

/// Already rescued: identity.
constexpr RescuedScore rescue_rating(RescuedScore score) noexcept
{
    return score;
}

} // namespace sensemaker::adversarial
