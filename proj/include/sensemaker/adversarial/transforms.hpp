#pragma once

#include "sensemaker/common/error.hpp"
#include "sensemaker/common/rng.hpp"
#include "sensemaker/common/text.hpp"

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace sensemaker::adversarial {

/// Seeded uniform permutation of the whitespace tokens, re-joined with
/// single spaces.
inline std::string shuffle_words(std::string const & text, std::uint64_t seed)
{
    auto tokens = split_whitespace(text);
    Rng rng(seed);
    rng.shuffle(tokens);
    return join(tokens, " ");
}

/// As many tokens as `templ` has, drawn uniformly with replacement from the
/// vocabulary.
inline std::string random_text(std::string const & templ, std::vector<std::string> const & vocabulary,
                               std::uint64_t seed)
{
    if (vocabulary.empty()) {
        throw ArgumentError("random_text: empty vocabulary");
    }
    auto const count = whitespace_spans(templ).size();
    Rng rng(seed);
    std::vector<std::string> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(vocabulary[rng.below(vocabulary.size())]);
    }
    return join(out, " ");
}

/// Sorted set of lowercase alphanumeric tokens over the given texts.
inline std::vector<std::string> build_vocabulary(std::vector<std::string> const & texts)
{
    std::set<std::string> vocab;
    for (auto const & t : texts) {
        for (auto & tok : alnum_tokens(t)) {
            vocab.insert(std::move(tok));
        }
    }
    return {vocab.begin(), vocab.end()};
}

/// Uniformly random permutation of 0..n-1 without fixed points (rejection
/// sampling; expected e attempts).
inline std::vector<std::size_t> random_derangement(std::size_t n, Rng & rng)
{
    if (n < 2) {
        throw ArgumentError("no derangement exists for fewer than two items");
    }
    std::vector<std::size_t> perm(n);
    while (true) {
        for (std::size_t i = 0; i < n; ++i) {
            perm[i] = i;
        }
        rng.shuffle(perm);
        bool fixed = false;
        for (std::size_t i = 0; i < n && !fixed; ++i) {
            fixed = perm[i] == i;
        }
        if (!fixed) {
            return perm;
        }
    }
}

} // namespace sensemaker::adversarial
