#pragma once

#include "sensemaker/common/error.hpp"
#include "sensemaker/common/rng.hpp"
#include "sensemaker/common/stats.hpp"
#include "sensemaker/common/text.hpp"
#include "sensemaker/corpus/types.hpp"
#include "sensemaker/llmroles/baselines.hpp"
#include "sensemaker/llmroles/chat.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <vector>

namespace sensemaker::llmroles {

/// Order in which the eight statements are presented.
enum class PromptVariant { original, pair_swapped, reversed };

inline constexpr std::array<PromptVariant, 3> all_variants{PromptVariant::original, PromptVariant::pair_swapped,
                                                           PromptVariant::reversed};

inline char const * to_string(PromptVariant v)
{
    switch (v) {
    case PromptVariant::original: return "original";
    case PromptVariant::pair_swapped: return "pair_swapped";
    case PromptVariant::reversed: return "reversed";
    }
    return "";
}

inline std::optional<PromptVariant> parse_variant(std::string const & s)
{
    for (auto v : all_variants) {
        if (s == to_string(v)) {
            return v;
        }
    }
    return std::nullopt;
}

/// The eight judge statements, 1-based ids. Odd ids ask for the "least"
/// set, the following even id for the "most" set of the same category.
inline constexpr std::array<char const *, 8> entry_statements{
    "The questions require thinking about least different parts of the material.",
    "The questions require thinking about most different parts of the material.",
    "The questions cover the material least.",
    "The questions cover the material most.",
    "The questions are least useful for learning to reason about the material for the test.",
    "The questions are most useful for learning to reason about the material for the test.",
    "The questions are least useful for learning the material for the test.",
    "The questions are most useful for learning the material for the test.",
};

enum class Category { different_parts = 0, coverage = 1, reasoning = 2, learning = 3 };

inline constexpr std::array<Category, 4> all_categories{Category::different_parts, Category::coverage,
                                                        Category::reasoning, Category::learning};

inline char const * label(Category c)
{
    switch (c) {
    case Category::different_parts: return "require thinking about different parts of the material";
    case Category::coverage: return "cover the material most";
    case Category::reasoning: return "useful for learning to reason about the material";
    case Category::learning: return "useful for learning the material";
    }
    return "";
}

inline char const * to_string(Category c)
{
    switch (c) {
    case Category::different_parts: return "different_parts";
    case Category::coverage: return "coverage";
    case Category::reasoning: return "reasoning";
    case Category::learning: return "learning";
    }
    return "";
}

/// Statement id presented at each position 1..8.
inline std::array<int, 8> entry_order(PromptVariant v)
{
    switch (v) {
    case PromptVariant::original: return {1, 2, 3, 4, 5, 6, 7, 8};
    case PromptVariant::pair_swapped: return {2, 1, 4, 3, 6, 5, 8, 7};
    case PromptVariant::reversed: return {8, 7, 6, 5, 4, 3, 2, 1};
    }
    return {};
}

struct CategoryJudgment
{
    bool valid = false;
    std::string best;
    std::string worst;
};

struct TripletJudgment
{
    std::string document;
    PromptVariant variant = PromptVariant::original;
    std::string judge_model;
    /// System ids in presentation order: set_ids[k] is QUESTIONSET k+1.
    std::array<std::string, 3> set_ids;
    std::array<CategoryJudgment, 4> per_category;
    std::string reply;
};

/// The ENTRY lines for a variant. Labels run ENTRY1..ENTRY8 by position; the
/// statements follow the variant order.
inline std::string render_entries(PromptVariant v)
{
    auto const order = entry_order(v);
    std::string out;
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        out += "ENTRY" + std::to_string(pos + 1) + ": " + entry_statements[static_cast<std::size_t>(order[pos] - 1)]
               + " is most true about \"QUESTIONSET_NUMBER\": {}\n";
    }
    return out;
}

/// The text and the numbered question sets, as JSON.
inline std::string render_payload(std::string const & material, std::array<corpus::QuestionSet const *, 3> const & numbered)
{
    json sets = json::array();
    for (std::size_t k = 0; k < numbered.size(); ++k) {
        json qs = json::array();
        for (auto const & q : numbered[k]->questions) {
            qs.push_back(q.question);
        }
        sets.push_back({{"QUESTIONSET_NUMBER", k + 1}, {"questions", std::move(qs)}});
    }
    json payload = {{"text", material}, {"question_sets", std::move(sets)}};
    return payload.dump(2, ' ', false, json::error_handler_t::replace);
}

/// Presentation order of three sets: a seeded permutation keyed by the
/// document and the sorted system ids, independent of the prompt variant.
inline std::array<std::size_t, 3> presentation_order(std::string const & document,
                                                     std::array<corpus::QuestionSet const *, 3> const & sets,
                                                     std::uint64_t seed)
{
    std::vector<std::string> ids{sets[0]->system_id, sets[1]->system_id, sets[2]->system_id};
    std::sort(ids.begin(), ids.end());
    std::array<std::size_t, 3> order{0, 1, 2};
    Rng(seed, "triplet:" + document + "\x1f" + join(ids, "\x1f")).shuffle(order);
    return order;
}

/// Extracts the QUESTIONSET number given for each ENTRY position (1..8).
/// Scans case-insensitively for "ENTRY<k>" and takes the nearest integer
/// after a following "QUESTIONSET_NUMBER", falling back to the first integer
/// in that entry's segment.
inline std::array<std::optional<int>, 8> parse_entries(std::string const & reply)
{
    static std::regex const entry_re(R"(ENTRY\s*([1-8])(?!\d))", std::regex::icase);
    static std::regex const number_re(R"(QUESTIONSET_NUMBER[^0-9A-Za-z]*?(\d+))", std::regex::icase);
    static std::regex const integer_re(R"((\d+))");

    struct Hit
    {
        int entry;
        std::size_t label;
        std::size_t begin;
        std::size_t end;
    };
    std::vector<Hit> hits;
    for (auto it = std::sregex_iterator(reply.begin(), reply.end(), entry_re); it != std::sregex_iterator(); ++it) {
        auto const label = static_cast<std::size_t>(it->position(0));
        hits.push_back({std::stoi((*it)[1].str()), label, label + static_cast<std::size_t>(it->length(0)), 0});
    }
    for (std::size_t i = 0; i < hits.size(); ++i) {
        hits[i].end = i + 1 < hits.size() ? hits[i + 1].label : reply.size();
    }

    std::array<std::optional<int>, 8> out;
    for (auto const & h : hits) {
        auto & slot = out[static_cast<std::size_t>(h.entry - 1)];
        if (slot) {
            continue;
        }
        std::string const segment = reply.substr(h.begin, h.end - h.begin);
        std::smatch m;
        if (std::regex_search(segment, m, number_re) || std::regex_search(segment, m, integer_re)) {
            auto const digits = m[1].str();
            if (digits.size() <= 3) {
                int const v = std::stoi(digits);
                if (v >= 1 && v <= 3) {
                    slot = v;
                }
            }
        }
    }
    return out;
}

/// Turns parsed entry numbers into per-category best/worst judgments.
inline std::array<CategoryJudgment, 4> judge_categories(std::array<std::optional<int>, 8> const & entries,
                                                        PromptVariant variant,
                                                        std::array<std::string, 3> const & set_ids)
{
    auto const order = entry_order(variant);
    std::array<std::optional<int>, 9> by_statement{};
    for (std::size_t pos = 0; pos < 8; ++pos) {
        by_statement[static_cast<std::size_t>(order[pos])] = entries[pos];
    }
    std::array<CategoryJudgment, 4> out;
    for (std::size_t c = 0; c < 4; ++c) {
        auto const least = by_statement[2 * c + 1];
        auto const most = by_statement[2 * c + 2];
        if (!least || !most || *least == *most) {
            continue;
        }
        out[c] = {true, set_ids[static_cast<std::size_t>(*most - 1)], set_ids[static_cast<std::size_t>(*least - 1)]};
    }
    return out;
}

struct TripletPrompt
{
    std::string text;
    std::array<std::string, 3> set_ids;
    std::array<std::size_t, 3> order;
};

inline TripletPrompt build_triplet_prompt(std::string const & document,
                                          std::string const & material,
                                          std::array<corpus::QuestionSet const *, 3> const & sets,
                                          PromptVariant variant,
                                          std::uint64_t seed,
                                          std::string const & tmpl = default_ranking_prompt)
{
    std::set<std::string> distinct{sets[0]->system_id, sets[1]->system_id, sets[2]->system_id};
    if (distinct.size() != 3) {
        throw ArgumentError("rank_triplet: the three question sets must come from distinct systems");
    }
    TripletPrompt p;
    p.order = presentation_order(document, sets, seed);
    std::array<corpus::QuestionSet const *, 3> numbered{sets[p.order[0]], sets[p.order[1]], sets[p.order[2]]};
    for (std::size_t k = 0; k < 3; ++k) {
        p.set_ids[k] = numbered[k]->system_id;
    }
    auto const payload = render_payload(material, numbered);
    auto const entries = render_entries(variant);
    p.text = render_template(tmpl, [&](std::string const & name) -> std::string const * {
        if (name == "payload") return &payload;
        if (name == "entries") return &entries;
        return nullptr;
    });
    return p;
}

/// Asks the judge to pick best and worst of three question sets in four
/// categories. Retries while some ENTRY cannot be parsed and keeps the
/// attempt with the most parsed entries. Categories with a missing entry or
/// identical best and worst are invalid.
inline TripletJudgment rank_triplet(std::string const & document,
                                    std::string const & material,
                                    std::array<corpus::QuestionSet const *, 3> const & sets,
                                    PromptVariant variant,
                                    std::uint64_t seed,
                                    ChatProvider & provider,
                                    RoleConfig const & cfg)
{
    auto const prompt = build_triplet_prompt(document, material, sets, variant, seed, cfg.prompts.ranking);

    ChatRequest request;
    request.model = cfg.model;
    request.messages = {{"user", prompt.text}};
    request.temperature = cfg.temperature;
    request.max_retries = cfg.max_retries;
    request.task = "triplet_judge";
    json sets_json = json::array();
    for (std::size_t k = 0; k < 3; ++k) {
        json qs = json::array();
        for (auto const & q : sets[prompt.order[k]]->questions) {
            qs.push_back(q.question);
        }
        sets_json.push_back(std::move(qs));
    }
    request.annotations = {{"material", material}, {"sets", sets_json}, {"entry_order", entry_order(variant)}};

    TripletJudgment j;
    j.document = document;
    j.variant = variant;
    j.judge_model = cfg.model;
    j.set_ids = prompt.set_ids;

    std::array<std::optional<int>, 8> best_entries{};
    int best_count = -1;
    for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
        request.attempt = attempt;
        std::string reply;
        try {
            reply = provider.complete(request);
        } catch (ProviderError const &) {
            continue;
        }
        auto const entries = parse_entries(reply);
        int const count = static_cast<int>(std::count_if(entries.begin(), entries.end(), [](auto const & e) {
            return e.has_value();
        }));
        if (count > best_count) {
            best_count = count;
            best_entries = entries;
            j.reply = reply;
        }
        if (count == 8) {
            break;
        }
    }
    j.per_category = judge_categories(best_entries, variant, j.set_ids);
    return j;
}

/// All 3-element combinations of the (sorted) system ids.
inline std::vector<std::array<std::string, 3>> enumerate_triplets(std::vector<std::string> systems)
{
    std::sort(systems.begin(), systems.end());
    systems.erase(std::unique(systems.begin(), systems.end()), systems.end());
    std::vector<std::array<std::string, 3>> out;
    for (std::size_t a = 0; a < systems.size(); ++a) {
        for (std::size_t b = a + 1; b < systems.size(); ++b) {
            for (std::size_t c = b + 1; c < systems.size(); ++c) {
                out.push_back({systems[a], systems[b], systems[c]});
            }
        }
    }
    return out;
}

/// Mean ranks per system and category, plus an overall column.
struct RankTable
{
    std::map<std::string, std::array<Summary, 4>> per_category;
    std::map<std::string, Summary> overall;
};

/// Converts judgments into ranks (best 3, worst 1, the remaining set 2) for
/// every valid category and summarizes them per system.
inline RankTable aggregate_triplet_ranks(std::vector<TripletJudgment> const & judgments,
                                         std::vector<std::string> const & systems)
{
    std::set<std::string> const known(systems.begin(), systems.end());
    std::map<std::string, std::array<std::vector<double>, 4>> samples;
    for (auto const & s : known) {
        samples[s];
    }
    for (auto const & j : judgments) {
        for (auto const & id : j.set_ids) {
            if (!known.count(id)) {
                throw ArgumentError("aggregate_triplet_ranks: unknown system '" + id + "'");
            }
        }
        for (std::size_t c = 0; c < 4; ++c) {
            auto const & cj = j.per_category[c];
            if (!cj.valid) {
                continue;
            }
            for (auto const & id : j.set_ids) {
                double const rank = id == cj.best ? 3.0 : id == cj.worst ? 1.0 : 2.0;
                samples[id][c].push_back(rank);
            }
        }
    }
    RankTable t;
    for (auto const & [id, per] : samples) {
        std::vector<double> all;
        for (std::size_t c = 0; c < 4; ++c) {
            t.per_category[id][c] = summarize(per[c]);
            all.insert(all.end(), per[c].begin(), per[c].end());
        }
        t.overall[id] = summarize(all);
    }
    return t;
}

} // namespace sensemaker::llmroles
