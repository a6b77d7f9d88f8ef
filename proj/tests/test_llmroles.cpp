#include "sensemaker/llmroles/baselines.hpp"
#include "sensemaker/llmroles/chat.hpp"
#include "sensemaker/llmroles/http_chat.hpp"
#include "sensemaker/llmroles/prompts.hpp"
#include "sensemaker/llmroles/simulated.hpp"
#include "sensemaker/llmroles/triplet.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <thread>

using namespace sensemaker;
using namespace sensemaker::llmroles;
using namespace testing_support;

namespace {

corpus::QuestionSet qset(std::string system, std::size_t n)
{
    corpus::QuestionSet q;
    q.system_id = std::move(system);
    q.section_ref = {"lecture", "s1"};
    for (std::size_t i = 0; i < n; ++i) {
        q.questions.push_back({q.system_id + " question " + std::to_string(i), std::nullopt});
    }
    return q;
}

/// Judge that prefers sets with more questions in every category.
std::string size_judge(ChatRequest const & r)
{
    auto const sets = r.annotations.at("sets");
    auto const order = r.annotations.at("entry_order").get<std::vector<int>>();
    std::string reply;
    for (std::size_t pos = 0; pos < 8; ++pos) {
        bool const most = order[pos] % 2 == 0;
        std::size_t pick = 0;
        for (std::size_t k = 1; k < 3; ++k) {
            auto const n = sets[k].size();
            if (most ? n > sets[pick].size() : n < sets[pick].size()) {
                pick = k;
            }
        }
        reply += "ENTRY" + std::to_string(pos + 1) + ": QUESTIONSET_NUMBER: " + std::to_string(pick + 1) + "\n";
    }
    return reply;
}

RoleConfig config(std::string model = "judge")
{
    RoleConfig c;
    c.model = std::move(model);
    c.max_retries = 2;
    return c;
}

} // namespace

TEST(Triplet, EntryOrdersMatchFixtures)
{
    for (auto v : all_variants) {
        auto const fixture = read_file(fs::path(SENSEMAKER_SOURCE_DIR) / "tests" / "fixtures"
                                       / ("entries_" + std::string(to_string(v)) + ".txt"));
        ASSERT_FALSE(fixture.empty());
        EXPECT_EQ(render_entries(v), fixture) << to_string(v);
    }
}

TEST(Triplet, ParseEntries)
{
    auto const e = parse_entries("ENTRY1: ... \"QUESTIONSET_NUMBER\": 2\nentry2: QUESTIONSET_NUMBER 3\n"
                                 "ENTRY3: set 1\nENTRY4: {}\nENTRY5: QUESTIONSET_NUMBER: 7\nENTRY12: 1");
    EXPECT_EQ(e[0], 2);
    EXPECT_EQ(e[1], 3);
    EXPECT_EQ(e[2], 1);
    EXPECT_FALSE(e[3]);
    EXPECT_FALSE(e[4]);
    EXPECT_FALSE(e[5]);
    EXPECT_FALSE(e[7]);
}

TEST(Triplet, JudgeCategoriesAcrossVariants)
{
    std::array<std::string, 3> const ids{"x", "y", "z"};
    for (auto v : all_variants) {
        // the same underlying opinion expressed in each variant's order
        std::array<int, 9> by_statement{0, 1, 3, 2, 1, 3, 3, 2, 2};
        std::array<std::optional<int>, 8> entries;
        auto const order = entry_order(v);
        for (std::size_t pos = 0; pos < 8; ++pos) {
            entries[pos] = by_statement[static_cast<std::size_t>(order[pos])];
        }
        auto const c = judge_categories(entries, v, ids);
        EXPECT_TRUE(c[0].valid);
        EXPECT_EQ(c[0].best, "z");
        EXPECT_EQ(c[0].worst, "x");
        EXPECT_EQ(c[1].best, "x");
        EXPECT_EQ(c[1].worst, "y");
        EXPECT_FALSE(c[2].valid);
        EXPECT_FALSE(c[3].valid);
    }
}

TEST(Triplet, MockJudgeMatchesHandOracle)
{
    std::vector<corpus::QuestionSet> sets{qset("A", 1), qset("B", 2), qset("C", 3), qset("D", 4)};
    std::vector<std::string> const systems{"A", "B", "C", "D"};
    FunctionChatProvider judge(size_judge);
    for (auto v : all_variants) {
        std::vector<TripletJudgment> judgments;
        for (auto const & t : enumerate_triplets(systems)) {
            std::array<corpus::QuestionSet const *, 3> ptrs{};
            for (std::size_t k = 0; k < 3; ++k) {
                ptrs[k] = &sets[static_cast<std::size_t>(t[k][0] - 'A')];
            }
            auto const j = rank_triplet("doc", "material", ptrs, v, 5, judge, config());
            for (auto const & c : j.per_category) {
                ASSERT_TRUE(c.valid);
                std::multiset<int> ranks;
                for (auto const & id : j.set_ids) {
                    ranks.insert(id == c.best ? 3 : id == c.worst ? 1 : 2);
                }
                EXPECT_EQ(ranks, (std::multiset<int>{1, 2, 3}));
            }
            judgments.push_back(j);
        }
        ASSERT_EQ(judgments.size(), 4u);
        auto const table = aggregate_triplet_ranks(judgments, systems);
        // ABC: C>B>A, ABD: D>B>A, ACD: D>C>A, BCD: D>C>B
        std::map<std::string, double> const oracle{{"A", 1.0}, {"B", 5.0 / 3}, {"C", 7.0 / 3}, {"D", 3.0}};
        for (auto const & [id, mean] : oracle) {
            for (std::size_t c = 0; c < 4; ++c) {
                EXPECT_NEAR(table.per_category.at(id)[c].mean, mean, 1e-12) << id;
            }
            EXPECT_NEAR(table.overall.at(id).mean, mean, 1e-12);
            EXPECT_EQ(table.overall.at(id).n, 12u);
        }
    }
}

TEST(Triplet, PresentationIndependentOfVariantAndRetriesOnGarbage)
{
    auto const a = qset("A", 1);
    auto const b = qset("B", 2);
    auto const c = qset("C", 3);
    std::array<corpus::QuestionSet const *, 3> const ptrs{&a, &b, &c};
    auto const p1 = build_triplet_prompt("doc", "m", ptrs, PromptVariant::original, 9);
    auto const p2 = build_triplet_prompt("doc", "m", ptrs, PromptVariant::reversed, 9);
    EXPECT_EQ(p1.set_ids, p2.set_ids);
    EXPECT_NE(p1.text.find("ENTRY8"), std::string::npos);
    std::array<corpus::QuestionSet const *, 3> const dup{&a, &a, &c};
    EXPECT_THROW(build_triplet_prompt("doc", "m", dup, PromptVariant::original, 9), ArgumentError);

    int calls = 0;
    FunctionChatProvider flaky([&](ChatRequest const & r) {
        return ++calls < 3 ? std::string("I cannot decide") : size_judge(r);
    });
    auto const j = rank_triplet("doc", "m", ptrs, PromptVariant::original, 9, flaky, config());
    EXPECT_EQ(calls, 3);
    EXPECT_TRUE(j.per_category[0].valid);
    EXPECT_EQ(j.per_category[0].best, "C");

    FunctionChatProvider useless([](ChatRequest const &) { return std::string("nothing"); });
    auto const k = rank_triplet("doc", "m", ptrs, PromptVariant::original, 9, useless, config());
    EXPECT_EQ(useless.calls(), 3u);
    for (auto const & cat : k.per_category) {
        EXPECT_FALSE(cat.valid);
    }
}

TEST(Evaluator, ZeroToFiveScalesByTwenty)
{
    for (int r = 0; r <= 5; ++r) {
        FunctionChatProvider p([r](ChatRequest const &) { return "{\"rating\": " + std::to_string(r) + "}"; });
        EXPECT_EQ(evaluator_baseline("m", "q", "a", p, config()), r * 20);
    }
    FunctionChatProvider bare([](ChatRequest const &) { return std::string(" 4 "); });
    EXPECT_EQ(evaluator_baseline("m", "q", "a", bare, config()), 80);
    FunctionChatProvider out_of_range([](ChatRequest const &) { return std::string("{\"rating\": 6}"); });
    EXPECT_FALSE(evaluator_baseline("m", "q", "a", out_of_range, config()));
    EXPECT_EQ(out_of_range.calls(), 3u);
    EXPECT_THROW(evaluator_baseline("m", " ", "a", bare, config()), ArgumentError);
    EXPECT_FALSE(parse_rating_0_5("{\"rating\": 2.5}"));
    EXPECT_FALSE(parse_rating_0_5("five"));
}

TEST(Baselines, TeacherAndStudent)
{
    corpus::Section const section{"s1", "Plants make sugar from light. Roots take up water from the soil. "
                                        "Leaves release oxygen during the day.",
                                  "en"};
    SimulatedChatProvider sim;
    auto const t = teacher_baseline({"textbook", "s1"}, section, 3, 6, sim, config("gpt"));
    EXPECT_TRUE(t.warnings.empty());
    ASSERT_EQ(t.value.questions.size(), 3u);
    EXPECT_EQ(t.value.system_id, "baseline");
    for (auto const & q : t.value.questions) {
        EXPECT_TRUE(q.reference_answer);
    }
    auto const s = student_baseline(section, t.value, sim, config("gpt"));
    ASSERT_EQ(s.value.answers.size(), 3u);
    EXPECT_EQ(s.value.question_system_id, "baseline");

    FunctionChatProvider short_reply([](ChatRequest const &) { return std::string("{\"answers\": [\"x\"]}"); });
    auto const partial = student_baseline(section, t.value, short_reply, config());
    EXPECT_EQ(partial.value.answers[0], "x");
    EXPECT_FALSE(partial.value.answers[1]);
    EXPECT_EQ(partial.warnings.size(), 1u);

    FunctionChatProvider broken([](ChatRequest const &) -> std::string { throw ProviderError("down"); });
    auto const dropped = teacher_baseline({"textbook", "s1"}, section, 2, 6, broken, config());
    EXPECT_TRUE(dropped.value.questions.empty());
    EXPECT_EQ(dropped.warnings.size(), 2u);
}

TEST(Baselines, ExtractSpans)
{
    auto const spans = extract_spans("a b c d e f g h i j", 3, 4);
    ASSERT_EQ(spans.size(), 3u);
    EXPECT_EQ(spans[0].text, "a b c d");
    EXPECT_EQ(spans[1].start_token, 3u);
    EXPECT_EQ(spans[2].text, "g h i j");
    auto const short_text = extract_spans("a b", 2, 5);
    EXPECT_EQ(short_text[1].text, "a b");
    EXPECT_THROW(extract_spans("", 1, 1), ArgumentError);
}

TEST(Chat, WarmCacheMakesNoCalls)
{
    auto const dir = scratch_dir("chat_cache");
    auto inner = std::make_shared<FunctionChatProvider>([](ChatRequest const & r) { return "echo " + r.model; });
    ChatRequest req;
    req.model = "m";
    req.messages = {{"user", "hi"}};
    {
        CachingChatProvider cold(inner, dir);
        EXPECT_EQ(cold.complete(req), "echo m");
        req.attempt = 1;
        EXPECT_EQ(cold.complete(req), "echo m");
        EXPECT_EQ(cold.upstream_calls(), 2u);
    }
    CachingChatProvider warm(inner, dir);
    req.annotations = {{"ignored", true}};
    EXPECT_EQ(warm.complete(req), "echo m");
    req.attempt = 0;
    EXPECT_EQ(warm.complete(req), "echo m");
    EXPECT_EQ(warm.upstream_calls(), 0u);
    EXPECT_EQ(warm.hits(), 2u);
    EXPECT_EQ(inner->calls(), 2u);
}

TEST(Chat, HttpWireFormat)
{
    httplib::Server server;
    nlohmann::json seen;
    std::string auth;
    server.Post("/v1/chat/completions", [&](httplib::Request const & req, httplib::Response & res) {
        seen = nlohmann::json::parse(req.body);
        auth = req.get_header_value("Authorization");
        res.set_content(R"({"choices": [{"message": {"role": "assistant", "content": "{\"rating\": 3}"}}]})",
                        "application/json");
    });
    server.Post("/bad/chat/completions", [](httplib::Request const &, httplib::Response & res) {
        res.status = 500;
        res.set_content("oops", "text/plain");
    });
    int const port = server.bind_to_any_port("127.0.0.1");
    std::thread t([&] { server.listen_after_bind(); });
    server.wait_until_ready();
    auto const base = "http://127.0.0.1:" + std::to_string(port);

    HttpChatProvider chat(base + "/v1", "k3y", 5);
    auto const rating = evaluator_baseline("material", "question", "answer", chat, config("gpt-x"));
    HttpChatProvider bad(base + "/bad", "", 5);
    ChatRequest req;
    req.messages = {{"user", "x"}};
    EXPECT_THROW(bad.complete(req), ProviderError);
    server.stop();
    t.join();

    EXPECT_EQ(rating, 60);
    EXPECT_EQ(auth, "Bearer k3y");
    EXPECT_EQ(seen["model"], "gpt-x");
    EXPECT_EQ(seen["temperature"], 0.0);
    EXPECT_EQ(seen["messages"][0]["role"], "user");
    EXPECT_NE(seen["messages"][0]["content"].get<std::string>().find("question"), std::string::npos);
    EXPECT_EQ(seen["response_format"]["type"], "json_schema");
    EXPECT_EQ(seen["response_format"]["json_schema"]["schema"]["properties"]["rating"]["maximum"], 5);
    EXPECT_FALSE(seen.contains("annotations"));
}

TEST(Simulated, DeterministicReplies)
{
    SimulatedChatProvider sim;
    ChatRequest req;
    req.model = "m";
    req.messages = {{"user", "x"}};
    req.task = "evaluator";
    req.annotations = {{"material", "cats sit on mats"}, {"question", "where do cats sit"}, {"answer", "on mats"}};
    EXPECT_EQ(sim.complete(req), sim.complete(req));
    EXPECT_TRUE(parse_rating_0_5(sim.complete(req)));
    req.task = "nonsense";
    EXPECT_THROW(sim.complete(req), ProviderError);
    req.task = "mcq";
    req.annotations = {{"material", "the statement about pensions was rated as untrue"},
                       {"options", {"forests cover half", "pensions statement rated"}}};
    EXPECT_EQ(sim.complete(req), R"({"answer":"FALSE B"})");
}

TEST(Prompts, ShippedFilesMatchDefaults)
{
    auto const loaded = PromptSet::load(fs::path(SENSEMAKER_SOURCE_DIR) / "prompts");
    PromptSet const defaults;
    EXPECT_EQ(loaded.teacher, defaults.teacher);
    EXPECT_EQ(loaded.student, defaults.student);
    EXPECT_EQ(loaded.evaluator, defaults.evaluator);
    EXPECT_EQ(loaded.ranking, defaults.ranking);
    for (auto const * name : PromptSet::file_names) {
        EXPECT_TRUE(fs::exists(fs::path(SENSEMAKER_SOURCE_DIR) / "prompts" / (std::string(name) + ".v1.txt")));
    }

    auto const dir = scratch_dir("prompts");
    PromptSet custom;
    custom.teacher = "T {{material}}";
    custom.save(dir);
    EXPECT_EQ(PromptSet::load(dir).teacher, "T {{material}}");
    fs::remove(dir / "student.v1.txt");
    EXPECT_EQ(PromptSet::load(dir).student, defaults.student);
}
