#include "sensemaker/common/rng.hpp"
#include "sensemaker/embedmetrics/http_embedder.hpp"
#include "sensemaker/embedmetrics/provider.hpp"
#include "sensemaker/embedmetrics/ranks.hpp"
#include "sensemaker/embedmetrics/relevance.hpp"
#include "sensemaker/embedmetrics/score.hpp"
#include "sensemaker/embedmetrics/windows.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <thread>

using namespace sensemaker;
using namespace sensemaker::embedmetrics;
namespace fs = std::filesystem;

namespace {

std::vector<Vector> random_vectors(Rng & rng, std::size_t n, std::size_t dim)
{
    std::vector<Vector> out;
    while (out.size() < n) {
        Vector v(dim);
        bool nonzero = false;
        for (auto & x : v) {
            x = static_cast<double>(static_cast<int>(rng.below(5)) - 2);
            nonzero = nonzero || x != 0.0;
        }
        if (nonzero) {
            out.push_back(std::move(v));
        }
    }
    return out;
}

// Real coefficients over a fixed 4-dimensional basis; exact ties are
// improbable.
std::vector<Vector> basis_vectors(Rng & rng, std::size_t n)
{
    static Matrix const basis{{1, 0, 0, 0}, {0.6, 0.8, 0, 0}, {0, 0.5, 0.5, 0.7}, {0.1, 0.2, 0.3, 0.9}};
    std::vector<Vector> out(n, Vector(4, 0.0));
    for (auto & v : out) {
        for (std::size_t b = 0; b < 4; ++b) {
            double const c = rng.uniform() * 2 - 1;
            for (std::size_t d = 0; d < 4; ++d) {
                v[d] += c * basis(b, d);
            }
        }
    }
    return out;
}

std::string words(std::size_t n)
{
    std::string s;
    for (std::size_t i = 0; i < n; ++i) {
        s += (i ? " w" : "w") + std::to_string(i);
    }
    return s;
}

} // namespace

TEST(Cosine, Basics)
{
    Vector a{1, 0};
    Vector b{0, 2};
    Vector c{-3, 0};
    EXPECT_DOUBLE_EQ(cosine(a, a), 1.0);
    EXPECT_DOUBLE_EQ(cosine(a, b), 0.0);
    EXPECT_DOUBLE_EQ(cosine(a, c), -1.0);
    Vector zero{0, 0};
    EXPECT_THROW(cosine(a, zero), ArgumentError);
    Vector three{1, 2, 3};
    EXPECT_THROW(cosine(a, three), ArgumentError);
}

TEST(Quantile, LinearInterpolation)
{
    EXPECT_DOUBLE_EQ(quantile({4, 1, 3, 2}, 0.5), 2.5);
    EXPECT_NEAR(quantile({1, 2, 3, 4}, 0.95), 3.85, 1e-12);
    EXPECT_DOUBLE_EQ(quantile({7}, 0.95), 7.0);
    EXPECT_THROW(quantile({}, 0.5), ArgumentError);
}

TEST(Quantile, MatchesOracle)
{
    Rng rng(5);
    for (int i = 0; i < 500; ++i) {
        std::vector<double> xs(1 + rng.below(9));
        for (auto & x : xs) x = rng.uniform() * 2 - 1;
        for (double p : {0.0, 0.25, 0.5, 0.95, 1.0}) {
            EXPECT_NEAR(quantile(xs, p), oracle::quantile(xs, p), 1e-12);
        }
    }
}

TEST(RelevanceMatrix, HandExample)
{
    // One window, three questions: median 0.5, 0.95-quantile 0.86.
    Matrix sims{{0.1}, {0.5}, {0.9}};
    auto const r = relevance_matrix(sims);
    EXPECT_DOUBLE_EQ(r(0, 0), 0.0);
    EXPECT_DOUBLE_EQ(r(1, 0), 0.0);
    EXPECT_DOUBLE_EQ(r(2, 0), 1.4);
}

TEST(RelevanceMatrix, ThresholdIsStrict)
{
    Matrix sims{{0.3}, {0.3}};
    auto const r = relevance_matrix(sims);
    EXPECT_DOUBLE_EQ(r(0, 0), 0.0);
    EXPECT_DOUBLE_EQ(r(1, 0), 0.0);
    EXPECT_TRUE(joint_distribution(r).degenerate);
}

TEST(RelevanceMatrix, NegativeSumFloorsAtZero)
{
    // median -0.7, 0.95-quantile -0.14: -0.1 passes but -0.1 + -0.7 < 0
    Matrix sims{{-0.9}, {-0.7}, {-0.1}};
    auto const r = relevance_matrix(sims);
    EXPECT_EQ(r(2, 0), 0.0);
    EXPECT_TRUE(joint_distribution(r).degenerate);

    Rng rng(8);
    for (int rep = 0; rep < 200; ++rep) {
        Matrix s(1 + rng.below(5), 1 + rng.below(4));
        for (std::size_t i = 0; i < s.rows(); ++i) {
            for (std::size_t j = 0; j < s.cols(); ++j) s(i, j) = rng.uniform() * 2 - 1;
        }
        auto const rel = relevance_matrix(s);
        for (double v : rel.values()) {
            EXPECT_GE(v, 0.0);
        }
    }
}

TEST(TeacherScore, DegenerateScoresZero)
{
    auto const m = build_relevance_model({{1, 0}}, {{1, 0}, {0, 1}});
    EXPECT_TRUE(m.joint.degenerate);
    EXPECT_EQ(teacher_score(m, 1e-9), TeacherScore{});
    EXPECT_THROW(coverage_score(m.joint), DegenerateError);
    EXPECT_THROW(diversity_score(m.joint, 1e-9), DegenerateError);
}

TEST(TeacherScore, HandExample)
{
    // Two questions, two windows. Question 0 matches window 0, question 1
    // matches window 1, so each column keeps exactly its top entry.
    auto const m = build_relevance_model({{1, 0}, {0, 1}}, {{1, 0}, {0, 1}});
    ASSERT_FALSE(m.joint.degenerate);
    // column median 0.5, top similarity 1: r = 1.5 on the diagonal
    auto const s = teacher_score(m, 1e-9);
    EXPECT_NEAR(s.relevance, 3.0, 1e-12);
    EXPECT_NEAR(s.coverage, 1.0, 1e-12);
    double const e = 1e-9;
    double const hi = (1 + e) / (1 + 2 * e);
    double const lo = e / (1 + 2 * e);
    double const kl = hi * std::log2(hi / lo) + lo * std::log2(lo / hi);
    EXPECT_NEAR(s.diversity, 2 * kl, 1e-9);
}

TEST(Entropy, KnownValues)
{
    std::vector<double> uniform4(4, 0.25);
    EXPECT_DOUBLE_EQ(entropy_bits(uniform4), 2.0);
    std::vector<double> point{0, 1, 0};
    EXPECT_DOUBLE_EQ(entropy_bits(point), 0.0);
    std::vector<double> p{0.5, 0.5};
    std::vector<double> q{0.25, 0.75};
    EXPECT_NEAR(kl_divergence_bits(p, q), 0.5 * 1.0 + 0.5 * std::log2(0.5 / 0.75), 1e-12);
    EXPECT_DOUBLE_EQ(kl_divergence_bits(p, p), 0.0);
}

TEST(Diversity, DuplicatedQuestionsScoreZero)
{
    Rng rng(9);
    for (int i = 0; i < 200; ++i) {
        auto windows = random_vectors(rng, 1 + rng.below(4), 4);
        auto q = random_vectors(rng, 1, 4).front();
        auto const m = build_relevance_model({q, q, q}, windows);
        if (m.joint.degenerate) {
            continue;
        }
        EXPECT_NEAR(diversity_score(m.joint, 1e-9), 0.0, 1e-12);
    }
}

TEST(Metrics, MatchOracleOnSmallCases)
{
    Rng rng(2024);
    int nondegenerate = 0;
    for (int trial = 0; trial < 500; ++trial) {
        auto const nq = 1 + rng.below(4);
        auto const nw = 1 + rng.below(4);
        auto q = basis_vectors(rng, nq);
        auto w = basis_vectors(rng, nw);
        auto const s = teacher_score(build_relevance_model(q, w), 1e-9);
        auto const o = oracle::question_set_metrics(q, w, 1e-9);
        ASSERT_NEAR(s.relevance, o.relevance, 1e-9);
        ASSERT_NEAR(s.coverage, o.coverage, 1e-9);
        ASSERT_NEAR(s.diversity, o.diversity, 1e-9);
        nondegenerate += o.relevance > 0 ? 1 : 0;
    }
    EXPECT_GT(nondegenerate, 200);
}

TEST(Windows, Segmentation)
{
    auto const w = segment_windows(words(10), 4, 2);
    ASSERT_EQ(w.size(), 4u);
    EXPECT_EQ(w[0].text, "w0 w1 w2 w3");
    EXPECT_EQ(w[3].start_token, 6u);
    EXPECT_EQ(w[3].end_token, 10u);

    auto const tail = segment_windows(words(11), 4, 2);
    ASSERT_EQ(tail.size(), 5u);
    EXPECT_EQ(tail[4].start_token, 7u);
    EXPECT_EQ(tail[4].text, "w7 w8 w9 w10");

    auto const one = segment_windows("  a   b  ", 96, 48);
    ASSERT_EQ(one.size(), 1u);
    EXPECT_EQ(one[0].text, "a   b");

    EXPECT_THROW(segment_windows("a b", 2, 3), ArgumentError);
    EXPECT_THROW(segment_windows("a b", 0, 1), ArgumentError);
    EXPECT_THROW(segment_windows("   ", 2, 1), ArgumentError);
}

TEST(Windows, CoverEveryToken)
{
    Rng rng(1);
    for (int i = 0; i < 300; ++i) {
        auto const n = 1 + rng.below(60);
        auto const win = 1 + rng.below(12);
        auto const stride = 1 + rng.below(win);
        auto const ws = segment_windows(words(n), win, stride);
        std::vector<int> covered(n, 0);
        for (auto const & w : ws) {
            EXPECT_EQ(w.end_token - w.start_token, std::min<std::size_t>(win, n));
            for (auto t = w.start_token; t < w.end_token; ++t) covered[t] = 1;
        }
        EXPECT_EQ(std::accumulate(covered.begin(), covered.end(), 0), static_cast<int>(n));
        EXPECT_EQ(ws.back().end_token, n);
    }
}

TEST(HashingEmbedder, DeterministicAndNonZero)
{
    HashingEmbedder e(64);
    auto const a = e.embed({"The cat sat", "", "the CAT sat!"});
    ASSERT_EQ(a.size(), 3u);
    EXPECT_EQ(a[0], a[2]);
    EXPECT_EQ(a[0].size(), 64u);
    EXPECT_DOUBLE_EQ(a[1].back(), 0.1);
    EXPECT_EQ(HashingEmbedder(64).embed({"The cat sat"}).front(), a[0]);
    EXPECT_THROW(HashingEmbedder(1), ArgumentError);
}

TEST(CachingEmbedder, WarmCacheMakesNoUpstreamCalls)
{
    auto const dir = fs::temp_directory_path() / "sensemaker_embed_cache_test";
    fs::remove_all(dir);
    auto inner = std::make_shared<HashingEmbedder>(32);
    CachingEmbedder cold(inner, dir);
    auto const first = cold.embed({"alpha beta", "gamma"});
    EXPECT_EQ(cold.misses(), 2u);
    CachingEmbedder warm(inner, dir);
    auto const second = warm.embed({"gamma", "alpha beta"});
    EXPECT_EQ(warm.misses(), 0u);
    EXPECT_EQ(second[0], first[1]);
    EXPECT_EQ(second[1], first[0]);
    fs::remove_all(dir);
}

TEST(ScoreQuestionSet, EmptyAndDeterministic)
{
    HashingEmbedder e;
    ScoringConfig cfg{8, 4, 1e-9};
    auto const text = words(30);
    EXPECT_EQ(score_question_set(text, {}, e, cfg), TeacherScore{});
    auto const a = score_question_set(text, {"w1 w2", "w20 w21", "w28"}, e, cfg);
    auto const b = score_question_set(text, {"w1 w2", "w20 w21", "w28"}, e, cfg);
    EXPECT_EQ(a, b);
    EXPECT_GT(a.relevance, 0.0);
    EXPECT_THROW(score_question_set("  ", {"q"}, e, cfg), ArgumentError);
}

TEST(HttpEmbedder, WireFormat)
{
    httplib::Server server;
    nlohmann::json seen;
    std::string auth;
    server.Post("/v1/embeddings", [&](httplib::Request const & req, httplib::Response & res) {
        seen = nlohmann::json::parse(req.body);
        auth = req.get_header_value("Authorization");
        nlohmann::json data = nlohmann::json::array();
        // reply out of order to exercise the index field
        for (std::size_t i = seen["input"].size(); i-- > 0;) {
            data.push_back({{"index", i}, {"embedding", {static_cast<double>(i), 1.0}}});
        }
        res.set_content(nlohmann::json{{"data", data}}.dump(), "application/json");
    });
    int const port = server.bind_to_any_port("127.0.0.1");
    std::thread t([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    HttpEmbedder e("http://127.0.0.1:" + std::to_string(port) + "/v1", "emb-model", "secret", 2);
    auto const v = e.embed({"a", "b", "c"});
    server.stop();
    t.join();
    ASSERT_EQ(v.size(), 3u);
    EXPECT_EQ(v[1], (Vector{1.0, 1.0}));
    EXPECT_EQ(v[2], (Vector{0.0, 1.0}));
    EXPECT_EQ(seen["model"], "emb-model");
    EXPECT_EQ(seen["input"], (nlohmann::json{"c"}));
    EXPECT_EQ(auth, "Bearer secret");
}

TEST(HttpEmbedder, TransportFailureIsProviderError)
{
    HttpEmbedder e("http://127.0.0.1:1", "m");
    EXPECT_THROW(e.embed({"a"}), ProviderError);
}

// --- rank aggregation --------------------------------------------------------

namespace {

ScoreTable fixture()
{
    ScoreTable t;
    t["A"]["d1"] = {3, 1, 2};
    t["B"]["d1"] = {2, 2, 1};
    t["C"]["d1"] = {1, 3, 4};
    t["D"]["d1"] = {0.5, 4, 3};
    t["A"]["d2"] = {5, 2, 1};
    t["B"]["d2"] = {4, 1, 2};
    t["C"]["d2"] = {6, 3, 3};
    t["D"]["d2"] = {1, 4, 4};
    t["A"]["d3"] = {1, 1, 1};
    t["B"]["d3"] = {2, 2, 2};
    t["C"]["d3"] = {3, 3, 3};
    return t;
}

} // namespace

TEST(AggregateRanks, HandComputedFixture)
{
    auto const agg = aggregate_ranks(fixture(), {"d1", "d2", "d3"}, 7);
    auto expect = [&](char const * s, double rel, double cov, double div, double overall) {
        auto const & r = agg.per_system.at(s);
        EXPECT_NEAR(r[0].mean, rel, 1e-12) << s;
        EXPECT_NEAR(r[1].mean, cov, 1e-12) << s;
        EXPECT_NEAR(r[2].mean, div, 1e-12) << s;
        EXPECT_NEAR(agg.overall.at(s).mean, overall, 1e-12) << s;
        EXPECT_EQ(r[0].n, 3u);
    };
    expect("A", 3.0, 5.0 / 3, 5.0 / 3, 19.0 / 9);
    expect("B", 8.0 / 3, 2.0, 2.0, 20.0 / 9);
    expect("C", 10.0 / 3, 10.0 / 3, 11.0 / 3, 31.0 / 9);
    expect("D", 1.0, 3.0, 8.0 / 3, 20.0 / 9);
    // population std of A's relevance ranks {4, 3, 2}
    EXPECT_NEAR(agg.per_system.at("A")[0].std, std::sqrt(2.0 / 3.0), 1e-12);
}

TEST(AggregateRanks, RanksArePermutationsAndMissingIsWorst)
{
    Rng rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        ScoreTable t;
        auto const systems = 2 + rng.below(5);
        auto const docs = 1 + rng.below(4);
        for (std::size_t s = 0; s < systems; ++s) {
            for (std::size_t d = 0; d < docs; ++d) {
                if (rng.below(4) == 0) continue;
                // coarse values produce ties
                t["s" + std::to_string(s)]["d" + std::to_string(d)]
                    = {static_cast<double>(rng.below(3)), static_cast<double>(rng.below(3)), rng.uniform()};
            }
            t["s" + std::to_string(s)];
        }
        std::vector<std::string> documents;
        for (std::size_t d = 0; d < docs; ++d) documents.push_back("d" + std::to_string(d));
        auto const agg = aggregate_ranks(t, documents, trial);
        auto const again = aggregate_ranks(t, documents, trial);
        for (std::size_t i = 0; i < agg.per_document.size(); ++i) {
            auto const & dr = agg.per_document[i];
            EXPECT_EQ(dr.ranks, again.per_document[i].ranks);
            for (std::size_t q = 0; q < 3; ++q) {
                std::vector<int> ranks;
                int worst_present = static_cast<int>(systems) + 1;
                int best_missing = 0;
                for (auto const & [s, r] : dr.ranks) {
                    ranks.push_back(r[q]);
                    if (t.at(s).count(dr.document)) {
                        worst_present = std::min(worst_present, r[q]);
                    } else {
                        best_missing = std::max(best_missing, r[q]);
                    }
                }
                std::sort(ranks.begin(), ranks.end());
                for (std::size_t k = 0; k < ranks.size(); ++k) {
                    EXPECT_EQ(ranks[k], static_cast<int>(k + 1));
                }
                EXPECT_LT(best_missing, worst_present);
            }
        }
    }
}

TEST(AggregateRanks, IndependentOfInsertionAndDocumentOrder)
{
    auto const a = aggregate_ranks(fixture(), {"d3", "d1", "d2"}, 3);
    auto const b = aggregate_ranks(fixture(), {"d1", "d2", "d3"}, 3);
    EXPECT_EQ(a.per_system.at("C")[2], b.per_system.at("C")[2]);
    EXPECT_EQ(a.overall, b.overall);
}

TEST(AggregateRanks, Errors)
{
    ScoreTable one;
    one["A"]["d"] = {};
    EXPECT_THROW(aggregate_ranks(one, {}, 0), ArgumentError);
    ScoreTable empty_docs;
    empty_docs["A"];
    empty_docs["B"];
    EXPECT_THROW(aggregate_ranks(empty_docs, {}, 0), ArgumentError);
}
