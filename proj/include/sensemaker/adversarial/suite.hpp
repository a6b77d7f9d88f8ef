#pragma once

#include "sensemaker/adversarial/transforms.hpp"
#include "sensemaker/common/error.hpp"
#include "sensemaker/common/rng.hpp"
#include "sensemaker/corpus/types.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace sensemaker::adversarial {

enum class Transform {
    answers_swapped,
    answer_random_text,
    question_random_text,
    answer_words_shuffled,
    question_words_shuffled,
    material_swapped,
    questions_swapped,
};

inline constexpr Transform all_transforms[] = {
    Transform::answers_swapped,       Transform::answer_random_text,      Transform::question_random_text,
    Transform::answer_words_shuffled, Transform::question_words_shuffled, Transform::material_swapped,
    Transform::questions_swapped,
};

inline char const * to_string(Transform t)
{
    switch (t) {
    case Transform::answers_swapped: return "answers_swapped";
    case Transform::answer_random_text: return "answer_random_text";
    case Transform::question_random_text: return "question_random_text";
    case Transform::answer_words_shuffled: return "answer_words_shuffled";
    case Transform::question_words_shuffled: return "question_words_shuffled";
    case Transform::material_swapped: return "material_swapped";
    case Transform::questions_swapped: return "questions_swapped";
    }
    return "";
}

inline std::optional<Transform> parse_transform(std::string const & s)
{
    for (auto t : all_transforms) {
        if (s == to_string(t)) {
            return t;
        }
    }
    return std::nullopt;
}

/// Human-readable category label used in report tables.
inline char const * category_label(Transform t)
{
    switch (t) {
    case Transform::answers_swapped: return "answers swapped";
    case Transform::answer_random_text: return "answer random text";
    case Transform::question_random_text: return "question random text";
    case Transform::answer_words_shuffled: return "words in answer shuffled";
    case Transform::question_words_shuffled: return "words in question shuffled";
    case Transform::material_swapped: return "material swapped";
    case Transform::questions_swapped: return "questions swapped";
    }
    return "";
}

/// A genuine (material, question, answer) test item.
struct BaseItem
{
    std::string id;
    corpus::SectionRef section_ref;
    std::string question_system_id;
    std::size_t question_index = 0;
    std::string answer_source_id;
    std::string material;
    std::string question;
    std::string answer;

    friend bool operator==(BaseItem const &, BaseItem const &) = default;
};

struct AdversarialItem
{
    BaseItem base;
    Transform transform = Transform::answers_swapped;
    std::uint64_t seed = 0;
    /// Ids of donor items for swap transforms.
    std::vector<std::string> provenance;
    std::string material;
    std::string question;
    std::string answer;

    friend bool operator==(AdversarialItem const &, AdversarialItem const &) = default;
};

enum class SwapField { answer, material, question };

/// Which donors a swap may draw from.
enum class SwapScope {
    corpus,         ///< any other item
    same_kind,      ///< items of the same material kind where possible
    different_kind, ///< items of another material kind where possible
};

namespace detail {

inline Transform transform_for(SwapField f)
{
    switch (f) {
    case SwapField::answer: return Transform::answers_swapped;
    case SwapField::material: return Transform::material_swapped;
    case SwapField::question: return Transform::questions_swapped;
    }
    return Transform::answers_swapped;
}

inline char const * name(SwapField f)
{
    switch (f) {
    case SwapField::answer: return "answer";
    case SwapField::material: return "material";
    case SwapField::question: return "question";
    }
    return "";
}

/// Derangement constrained to stay within groups. Items in singleton groups
/// are pooled and deranged among themselves; a lone leftover is spliced into
/// another cycle.
inline std::vector<std::size_t> grouped_derangement(std::vector<std::string> const & groups, Rng & rng)
{
    std::size_t const n = groups.size();
    std::map<std::string, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < n; ++i) {
        members[groups[i]].push_back(i);
    }
    std::vector<std::size_t> perm(n, n);
    std::vector<std::size_t> pool;
    for (auto const & [g, idx] : members) {
        if (idx.size() < 2) {
            pool.insert(pool.end(), idx.begin(), idx.end());
            continue;
        }
        auto const d = random_derangement(idx.size(), rng);
        for (std::size_t k = 0; k < idx.size(); ++k) {
            perm[idx[k]] = idx[d[k]];
        }
    }
    if (pool.size() >= 2) {
        auto const d = random_derangement(pool.size(), rng);
        for (std::size_t k = 0; k < pool.size(); ++k) {
            perm[pool[k]] = pool[d[k]];
        }
    } else if (pool.size() == 1) {
        auto const a = pool.front();
        std::vector<std::size_t> assigned;
        for (std::size_t i = 0; i < n; ++i) {
            if (i != a) {
                assigned.push_back(i);
            }
        }
        auto const i = assigned[rng.below(assigned.size())];
        perm[a] = perm[i];
        perm[i] = a;
    }
    return perm;
}

/// Derangement where every item receives a donor from another group, found
/// by rejection sampling. Falls back to an unconstrained derangement when no
/// such assignment is found.
inline std::vector<std::size_t> cross_group_derangement(std::vector<std::string> const & groups, Rng & rng)
{
    for (int attempt = 0; attempt < 10000; ++attempt) {
        auto perm = random_derangement(groups.size(), rng);
        bool ok = true;
        for (std::size_t i = 0; i < perm.size() && ok; ++i) {
            ok = groups[perm[i]] != groups[i];
        }
        if (ok) {
            return perm;
        }
    }
    return random_derangement(groups.size(), rng);
}

} // namespace detail

/// Reassigns one field of every item from another item via a seeded
/// derangement, so no item keeps its own field. Donor ids are recorded in
/// provenance.
inline std::vector<AdversarialItem> swap_within(std::vector<BaseItem> const & items,
                                                SwapField field,
                                                std::uint64_t seed,
                                                SwapScope scope = SwapScope::corpus)
{
    if (items.size() < 2) {
        throw ArgumentError("swap_within: need at least two items");
    }
    Rng rng(seed, std::string("swap:") + detail::name(field));
    std::vector<std::string> kinds;
    kinds.reserve(items.size());
    for (auto const & it : items) {
        kinds.push_back(it.section_ref.kind);
    }
    std::vector<std::size_t> perm;
    switch (scope) {
    case SwapScope::corpus: perm = random_derangement(items.size(), rng); break;
    case SwapScope::same_kind: perm = detail::grouped_derangement(kinds, rng); break;
    case SwapScope::different_kind: perm = detail::cross_group_derangement(kinds, rng); break;
    }

    std::vector<AdversarialItem> out;
    out.reserve(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) {
        auto const & base = items[i];
        auto const & donor = items[perm[i]];
        AdversarialItem a{base, detail::transform_for(field), seed, {donor.id}, base.material, base.question,
                          base.answer};
        switch (field) {
        case SwapField::answer: a.answer = donor.answer; break;
        case SwapField::material: a.material = donor.material; break;
        case SwapField::question: a.question = donor.question; break;
        }
        out.push_back(std::move(a));
    }
    return out;
}

struct SuiteOptions
{
    SwapScope answers_scope = SwapScope::same_kind;
    SwapScope material_scope = SwapScope::same_kind;
    SwapScope questions_scope = SwapScope::different_kind;
};

/// Applies every requested transform to every item. Output is grouped by
/// transform (in enum order) and follows the input item order within a
/// group. Per-item transforms are seeded from (seed, transform, item id).
inline std::vector<AdversarialItem> build_adversarial_suite(std::vector<BaseItem> const & items,
                                                            std::set<Transform> const & transforms,
                                                            std::vector<std::string> const & vocabulary,
                                                            std::uint64_t seed,
                                                            SuiteOptions const & options = {})
{
    if (items.empty()) {
        throw ArgumentError("build_adversarial_suite: no items");
    }
    std::vector<AdversarialItem> out;
    for (auto t : transforms) {
        switch (t) {
        case Transform::answers_swapped: {
            auto v = swap_within(items, SwapField::answer, seed, options.answers_scope);
            out.insert(out.end(), v.begin(), v.end());
            continue;
        }
        case Transform::material_swapped: {
            auto v = swap_within(items, SwapField::material, seed, options.material_scope);
            out.insert(out.end(), v.begin(), v.end());
            continue;
        }
        case Transform::questions_swapped: {
            auto v = swap_within(items, SwapField::question, seed, options.questions_scope);
            out.insert(out.end(), v.begin(), v.end());
            continue;
        }
        default: break;
        }
        for (auto const & base : items) {
            auto const item_seed = derive_seed(seed, std::string(to_string(t)) + ":" + base.id);
            AdversarialItem a{base, t, item_seed, {}, base.material, base.question, base.answer};
            switch (t) {
            case Transform::answer_random_text: a.answer = random_text(base.answer, vocabulary, item_seed); break;
            case Transform::question_random_text:
                a.question = random_text(base.question, vocabulary, item_seed);
                break;
            case Transform::answer_words_shuffled: a.answer = shuffle_words(base.answer, item_seed); break;
            case Transform::question_words_shuffled: a.question = shuffle_words(base.question, item_seed); break;
            default: break;
            }
            out.push_back(std::move(a));
        }
    }
    return out;
}

/// Serializes to the questions/answers record shape plus transform and
/// provenance fields.
inline nlohmann::json to_json(AdversarialItem const & a)
{
    return {{"item_id", a.base.id + "~" + to_string(a.transform)},
            {"base_item_id", a.base.id},
            {"kind", a.base.section_ref.kind},
            {"section_id", a.base.section_ref.section_id},
            {"question_system_id", a.base.question_system_id},
            {"question_index", a.base.question_index},
            {"answer_source_id", a.base.answer_source_id},
            {"question", a.question},
            {"answer", a.answer},
            {"material_from", a.transform == Transform::material_swapped ? a.provenance.front() : a.base.id},
            {"transform", to_string(a.transform)},
            {"seed", a.seed},
            {"provenance", a.provenance}};
}

} // namespace sensemaker::adversarial
