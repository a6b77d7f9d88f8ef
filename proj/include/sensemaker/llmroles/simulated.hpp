#pragma once

#include "sensemaker/common/error.hpp"
#include "sensemaker/common/rng.hpp"
#include "sensemaker/common/text.hpp"
#include "sensemaker/llmroles/chat.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <string>
#include <vector>

namespace sensemaker::llmroles {

/// Deterministic stand-in for a chat model, used for hermetic runs. It reads
/// the structured inputs recorded in ChatRequest::annotations and produces
/// plausible replies with simple lexical heuristics. The model id seeds a
/// small amount of rater noise, so two simulated judges disagree sometimes.
class SimulatedChatProvider final : public ChatProvider
{
public:
    std::string complete(ChatRequest const & request) override
    {
        validate(request);
        auto const & a = request.annotations;
        try {
            if (request.task == "teacher") {
                return teacher(a.at("span").get<std::string>());
            }
            if (request.task == "student") {
                return student(a.at("material").get<std::string>(), a.at("questions").get<std::vector<std::string>>());
            }
            if (request.task == "evaluator") {
                return evaluator(request.model, a.at("material").get<std::string>(), a.at("question").get<std::string>(),
                                 a.at("answer").get<std::string>());
            }
            if (request.task == "mcq") {
                return mcq(a.at("material").get<std::string>(), a.at("options").get<std::vector<std::string>>());
            }
            if (request.task == "triplet_judge") {
                return judge(request.model, a.at("material").get<std::string>(),
                             a.at("sets").get<std::vector<std::vector<std::string>>>(),
                             a.at("entry_order").get<std::vector<int>>());
            }
        } catch (json::exception const & e) {
            throw ProviderError(std::string("simulated provider: incomplete annotations: ") + e.what());
        }
        throw ProviderError("simulated provider: unsupported task '" + request.task + "'");
    }

    static std::vector<std::string> sentences(std::string const & text)
    {
        std::vector<std::string> out;
        std::string cur;
        for (char c : text) {
            cur += c;
            if (c == '.' || c == '!' || c == '?' || c == '\n') {
                auto t = trim(cur);
                if (!t.empty()) {
                    out.push_back(std::move(t));
                }
                cur.clear();
            }
        }
        auto t = trim(cur);
        if (!t.empty()) {
            out.push_back(std::move(t));
        }
        return out;
    }

private:
    static std::set<std::string> token_set(std::string const & text)
    {
        auto const v = alnum_tokens(text);
        std::set<std::string> s;
        for (auto const & t : v) {
            if (t.size() > 2) {
                s.insert(t);
            }
        }
        return s;
    }

    static double overlap(std::set<std::string> const & a, std::set<std::string> const & b)
    {
        if (a.empty() || b.empty()) {
            return 0.0;
        }
        std::size_t common = 0;
        for (auto const & t : a) {
            common += b.count(t);
        }
        return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
    }

    static std::string teacher(std::string const & span)
    {
        auto const sents = sentences(span);
        std::string const basis = sents.empty() ? span : *std::max_element(sents.begin(), sents.end(),
            [](auto const & x, auto const & y) { return x.size() < y.size(); });
        auto words = split_whitespace(basis);
        if (words.size() > 6) {
            words.resize(6);
        }
        auto topic = join(words, " ");
        while (!topic.empty() && std::ispunct(static_cast<unsigned char>(topic.back()))) {
            topic.pop_back();
        }
        json reply = {{"question", "What does the material say about \"" + topic + "\"?"}, {"answer", basis}};
        return reply.dump();
    }

    static std::string student(std::string const & material, std::vector<std::string> const & questions)
    {
        auto const sents = sentences(material);
        json answers = json::array();
        for (auto const & q : questions) {
            auto const qt = token_set(q);
            double best = -1.0;
            std::string pick;
            for (auto const & s : sents) {
                double const o = overlap(qt, token_set(s));
                if (o > best) {
                    best = o;
                    pick = s;
                }
            }
            if (best <= 0.0) {
                answers.push_back("The material does not answer this question.");
            } else {
                answers.push_back(pick);
            }
        }
        return json{{"answers", answers}}.dump();
    }

    static std::string evaluator(std::string const & model, std::string const & material, std::string const & question,
                                 std::string const & answer)
    {
        auto const at = token_set(answer);
        auto const mt = token_set(material);
        double support = 0.0;
        if (!at.empty()) {
            std::size_t in = 0;
            for (auto const & t : at) {
                in += mt.count(t);
            }
            support = static_cast<double>(in) / static_cast<double>(at.size());
        }
        double const related = std::min(1.0, 4.0 * overlap(token_set(question), at));
        double raw = 5.0 * (0.5 * support + 0.5 * related);
        Rng rng(fnv1a(model), material + "\x1f" + question + "\x1f" + answer);
        auto const roll = rng.below(10);
        if (roll == 0) {
            raw -= 1.0;
        } else if (roll == 1) {
            raw += 1.0;
        }
        int const rating = static_cast<int>(std::clamp(std::lround(raw), 0L, 5L));
        return json{{"rating", rating}}.dump();
    }

    static std::string mcq(std::string const & material, std::vector<std::string> const & options)
    {
        auto const mt = token_set(material);
        double best = 0.0;
        std::size_t pick = options.size();
        for (std::size_t i = 0; i < options.size(); ++i) {
            double const o = overlap(mt, token_set(options[i]));
            if (o > best) {
                best = o;
                pick = i;
            }
        }
        if (pick == options.size() || best < 0.12) {
            return json{{"answer", "UNKNOWABLE"}}.dump();
        }
        auto const lower = to_lower_ascii(material + " " + options[pick]);
        bool const negative = lower.find("untrue") != std::string::npos || lower.find("false") != std::string::npos
                              || lower.find("not true") != std::string::npos;
        std::string answer = negative ? "FALSE " : "TRUE ";
        answer += static_cast<char>('A' + pick);
        return json{{"answer", answer}}.dump();
    }

    static std::string judge(std::string const & model, std::string const & material,
                             std::vector<std::vector<std::string>> const & sets, std::vector<int> const & order)
    {
        if (sets.size() != 3 || order.size() != 8) {
            throw ProviderError("simulated judge: expected three sets and eight entries");
        }
        auto const mt = token_set(material);
        std::array<std::array<double, 4>, 3> features{};
        Rng rng(fnv1a(model), material);
        for (std::size_t k = 0; k < 3; ++k) {
            std::set<std::string> covered;
            std::size_t total = 0;
            std::size_t reasoning = 0;
            for (auto const & q : sets[k]) {
                auto const qt = token_set(q);
                total += qt.size();
                for (auto const & t : qt) {
                    if (mt.count(t)) {
                        covered.insert(t);
                    }
                }
                auto const lower = to_lower_ascii(q);
                if (lower.rfind("why", 0) == 0 || lower.rfind("how", 0) == 0 || lower.rfind("explain", 0) == 0) {
                    ++reasoning;
                }
            }
            double const n = static_cast<double>(std::max<std::size_t>(sets[k].size(), 1));
            double const coverage = mt.empty() ? 0.0 : static_cast<double>(covered.size()) / static_cast<double>(mt.size());
            double const distinct = total == 0 ? 0.0 : static_cast<double>(covered.size()) / static_cast<double>(total);
            features[k] = {distinct, coverage, static_cast<double>(reasoning) / n + 0.1 * coverage,
                           coverage + 0.01 * n};
            for (auto & f : features[k]) {
                f += 0.02 * rng.uniform();
            }
        }
        std::string reply;
        for (std::size_t pos = 0; pos < 8; ++pos) {
            int const statement = order[pos];
            auto const c = static_cast<std::size_t>((statement - 1) / 2);
            bool const most = statement % 2 == 0;
            std::size_t pick = 0;
            for (std::size_t k = 1; k < 3; ++k) {
                if (most ? features[k][c] > features[pick][c] : features[k][c] < features[pick][c]) {
                    pick = k;
                }
            }
            reply += "ENTRY" + std::to_string(pos + 1) + ": QUESTIONSET_NUMBER: " + std::to_string(pick + 1) + "\n";
        }
        return reply;
    }
};

} // namespace sensemaker::llmroles
