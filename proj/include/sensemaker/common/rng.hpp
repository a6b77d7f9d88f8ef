#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace sensemaker {

/// 64-bit FNV-1a. Stable across platforms and runs.
constexpr std::uint64_t fnv1a(std::string_view text) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derives an independent seed from a base seed and a textual key, so that
/// results keyed by e.g. a document id do not depend on processing order.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view key) noexcept
{
    return splitmix64(seed ^ splitmix64(fnv1a(key)));
}

/// Seeded generator with platform-independent sampling helpers. The standard
/// distributions are implementation-defined, so they are not used here.
class Rng
{
public:
    explicit Rng(std::uint64_t seed)
    : engine_(splitmix64(seed))
    {}

    Rng(std::uint64_t seed, std::string_view key)
    : Rng(derive_seed(seed, key))
    {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, bound). bound must be positive.
    std::uint64_t below(std::uint64_t bound)
    {
        // rejection sampling to remove modulo bias
        std::uint64_t const limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
        std::uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % bound;
    }

    /// Uniform real in [0, 1) with 53 bits of precision.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    template <typename T, std::size_t N>
    void shuffle(std::span<T, N> items)
    {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::size_t const j = below(i);
            using std::swap;
            swap(items[i - 1], items[j]);
        }
    }

    template <typename Container>
    void shuffle(Container & items)
    {
        shuffle(std::span<typename Container::value_type>{items.data(), items.size()});
    }

private:
    std::mt19937_64 engine_;
};

} // namespace sensemaker
