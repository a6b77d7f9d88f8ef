#pragma once

#include "sensemaker/common/error.hpp"
#include "sensemaker/common/rng.hpp"
#include "sensemaker/common/stats.hpp"
#include "sensemaker/embedmetrics/relevance.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace sensemaker::embedmetrics {

enum class Quantity { relevance, coverage, diversity };

inline constexpr std::array<Quantity, 3> all_quantities{Quantity::relevance, Quantity::coverage,
                                                        Quantity::diversity};

inline char const * to_string(Quantity q)
{
    switch (q) {
    case Quantity::relevance: return "relevance";
    case Quantity::coverage: return "coverage";
    case Quantity::diversity: return "diversity";
    }
    return "";
}

inline double value_of(TeacherScore const & s, Quantity q)
{
    switch (q) {
    case Quantity::relevance: return s.relevance;
    case Quantity::coverage: return s.coverage;
    case Quantity::diversity: return s.diversity;
    }
    return 0.0;
}

/// system id -> document id -> score. A system without an entry for a
/// document did not submit questions for it.
using ScoreTable = std::map<std::string, std::map<std::string, TeacherScore>>;

/// Ranks of every system on one document, per quantity. n is best, 1 worst.
struct DocumentRanks
{
    std::string document;
    std::map<std::string, std::array<int, 3>> ranks;
};

struct RankAggregate
{
    std::vector<DocumentRanks> per_document;
    /// Per system: summaries of ranks for relevance, coverage, diversity.
    std::map<std::string, std::array<Summary, 3>> per_system;
    /// Per system: summary over all three quantities together.
    std::map<std::string, Summary> overall;
};

/// Ranks systems on every document separately and averages the ranks.
/// Higher scores rank better. Missing submissions take the worst ranks.
/// Ties of either kind are broken by a generator seeded from (seed,
/// document, quantity), so results do not depend on input order.
inline RankAggregate aggregate_ranks(ScoreTable const & scores,
                                     std::vector<std::string> documents,
                                     std::uint64_t seed)
{
    if (scores.size() < 2) {
        throw ArgumentError("aggregate_ranks: need at least two systems");
    }
    if (documents.empty()) {
        std::set<std::string> all;
        for (auto const & [system, docs] : scores) {
            for (auto const & [doc, s] : docs) {
                all.insert(doc);
            }
        }
        documents.assign(all.begin(), all.end());
    }
    if (documents.empty()) {
        throw ArgumentError("aggregate_ranks: no documents");
    }
    std::sort(documents.begin(), documents.end());
    documents.erase(std::unique(documents.begin(), documents.end()), documents.end());

    int const n = static_cast<int>(scores.size());
    RankAggregate out;
    std::map<std::string, std::array<std::vector<double>, 3>> samples;

    for (auto const & doc : documents) {
        DocumentRanks dr;
        dr.document = doc;
        for (std::size_t qi = 0; qi < all_quantities.size(); ++qi) {
            auto const quantity = all_quantities[qi];
            Rng rng(seed, doc + '\x1f' + to_string(quantity));

            std::vector<std::tuple<double, std::uint64_t, std::string>> present;
            std::vector<std::string> missing;
            for (auto const & [system, docs] : scores) {
                auto const tiebreak = rng.next();
                if (auto it = docs.find(doc); it != docs.end()) {
                    present.emplace_back(value_of(it->second, quantity), tiebreak, system);
                } else {
                    missing.push_back(system);
                }
            }
            std::sort(present.begin(), present.end(), [](auto const & a, auto const & b) {
                if (std::get<0>(a) != std::get<0>(b)) {
                    return std::get<0>(a) > std::get<0>(b);
                }
                return std::get<1>(a) < std::get<1>(b);
            });
            rng.shuffle(missing);

            int rank = n;
            for (auto const & p : present) {
                dr.ranks[std::get<2>(p)][qi] = rank--;
            }
            for (auto const & system : missing) {
                dr.ranks[system][qi] = rank--;
            }
        }
        for (auto const & [system, r] : dr.ranks) {
            for (std::size_t qi = 0; qi < 3; ++qi) {
                samples[system][qi].push_back(r[qi]);
            }
        }
        out.per_document.push_back(std::move(dr));
    }

    for (auto const & [system, per_q] : samples) {
        std::vector<double> all;
        for (std::size_t qi = 0; qi < 3; ++qi) {
            out.per_system[system][qi] = summarize(per_q[qi]);
            all.insert(all.end(), per_q[qi].begin(), per_q[qi].end());
        }
        out.overall[system] = summarize(all);
    }
    return out;
}

} // namespace sensemaker::embedmetrics
