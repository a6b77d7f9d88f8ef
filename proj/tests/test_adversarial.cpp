#include "sensemaker/adversarial/rescue.hpp"
#include "sensemaker/adversarial/suite.hpp"
#include "sensemaker/adversarial/transforms.hpp"

#include <gtest/gtest.h>

#include <algorithm>

using namespace sensemaker;
using namespace sensemaker::adversarial;

namespace {

std::vector<BaseItem> items(std::size_t per_kind, std::vector<std::string> const & kinds)
{
    std::vector<BaseItem> out;
    for (auto const & kind : kinds) {
        for (std::size_t i = 0; i < per_kind; ++i) {
            auto const tag = kind + std::to_string(i);
            out.push_back({tag, {kind, "sec" + std::to_string(i % 2)}, "qs", i, "student",
                           "material of " + tag + " with some words", "what about " + tag + " then ?",
                           "the answer for " + tag + " is here"});
        }
    }
    return out;
}

std::vector<std::string> sorted_tokens(std::string const & s)
{
    auto t = split_whitespace(s);
    std::sort(t.begin(), t.end());
    return t;
}

} // namespace

TEST(Rescue, Rule)
{
    EXPECT_EQ(rescue_rating(0.0)->value, 0);
    EXPECT_EQ(rescue_rating(0.5)->value, 50);
    EXPECT_EQ(rescue_rating(1.0)->value, 100);
    EXPECT_EQ(rescue_rating(1.5)->value, 1.5);
    EXPECT_EQ(rescue_rating(0.329)->value, 0.329 * 100.0);
    EXPECT_EQ(rescue_rating(100.0)->value, 100);
    EXPECT_FALSE(rescue_rating(100.5));
    EXPECT_FALSE(rescue_rating(-0.1));
    EXPECT_FALSE(rescue_rating(std::nan("")));
    for (int v = 2; v <= 100; ++v) {
        EXPECT_EQ(rescue_rating(static_cast<double>(v))->value, v);
    }
    auto const once = *rescue_rating(0.4);
    EXPECT_EQ(rescue_rating(once), once);
}

TEST(Transforms, ShuffleWordsPreservesMultiset)
{
    std::string const text = "a b c d e f g a b";
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        auto const s = shuffle_words(text, seed);
        EXPECT_EQ(sorted_tokens(s), sorted_tokens(text));
        EXPECT_EQ(shuffle_words(text, seed), s);
    }
}

TEST(Transforms, RandomTextLengthAndVocabulary)
{
    std::vector<std::string> const vocab{"x", "y", "z"};
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto const s = random_text("one two three four", vocab, seed);
        auto const toks = split_whitespace(s);
        EXPECT_EQ(toks.size(), 4u);
        for (auto const & t : toks) {
            EXPECT_TRUE(std::find(vocab.begin(), vocab.end(), t) != vocab.end());
        }
        EXPECT_EQ(random_text("one two three four", vocab, seed), s);
    }
    EXPECT_THROW(random_text("a", {}, 0), ArgumentError);
    EXPECT_EQ(build_vocabulary({"B a", "a, c!"}), (std::vector<std::string>{"a", "b", "c"}));
}

TEST(Transforms, DerangementHasNoFixedPoint)
{
    Rng rng(3);
    for (std::size_t n = 2; n < 12; ++n) {
        for (int rep = 0; rep < 50; ++rep) {
            auto const p = random_derangement(n, rng);
            std::vector<std::size_t> sorted = p;
            std::sort(sorted.begin(), sorted.end());
            for (std::size_t i = 0; i < n; ++i) {
                EXPECT_NE(p[i], i);
                EXPECT_EQ(sorted[i], i);
            }
        }
    }
    EXPECT_THROW(random_derangement(1, rng), ArgumentError);
}

TEST(Swap, FixedPointFreeAndScoped)
{
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        for (auto const & input :
             {items(3, {"k1", "k2", "k3"}), items(1, {"k1", "k2", "k3"}), items(2, {"k1"}),
              [] {
                  auto v = items(3, {"k1"});
                  auto w = items(1, {"k2"});
                  v.insert(v.end(), w.begin(), w.end());
                  return v;
              }()}) {
            for (auto scope : {SwapScope::corpus, SwapScope::same_kind, SwapScope::different_kind}) {
                for (auto field : {SwapField::answer, SwapField::material, SwapField::question}) {
                    auto const out = swap_within(input, field, seed, scope);
                    ASSERT_EQ(out.size(), input.size());
                    std::vector<std::string> donors;
                    for (std::size_t i = 0; i < out.size(); ++i) {
                        auto const & a = out[i];
                        ASSERT_EQ(a.provenance.size(), 1u);
                        EXPECT_NE(a.provenance[0], input[i].id);
                        donors.push_back(a.provenance[0]);
                        auto const & donor = *std::find_if(input.begin(), input.end(), [&](auto const & b) {
                            return b.id == a.provenance[0];
                        });
                        EXPECT_EQ(a.base, input[i]);
                        EXPECT_EQ(a.answer, field == SwapField::answer ? donor.answer : input[i].answer);
                        EXPECT_EQ(a.material, field == SwapField::material ? donor.material : input[i].material);
                        EXPECT_EQ(a.question, field == SwapField::question ? donor.question : input[i].question);
                        if (scope == SwapScope::same_kind && input.size() == 9) {
                            EXPECT_EQ(donor.section_ref.kind, input[i].section_ref.kind);
                        }
                        if (scope == SwapScope::different_kind && input.size() == 9) {
                            EXPECT_NE(donor.section_ref.kind, input[i].section_ref.kind);
                        }
                    }
                    std::sort(donors.begin(), donors.end());
                    EXPECT_EQ(std::unique(donors.begin(), donors.end()), donors.end());
                    EXPECT_EQ(swap_within(input, field, seed, scope), out);
                }
            }
        }
    }
    EXPECT_THROW(swap_within(items(1, {"k"}), SwapField::answer, 0), ArgumentError);
}

TEST(Suite, DeterministicAndOnlyTargetedFieldsChange)
{
    auto const input = items(3, {"k1", "k2"});
    std::set<Transform> all(std::begin(all_transforms), std::end(all_transforms));
    std::vector<std::string> texts;
    for (auto const & i : input) {
        texts.push_back(i.question);
        texts.push_back(i.answer);
    }
    auto const vocab = build_vocabulary(texts);
    auto const a = build_adversarial_suite(input, all, vocab, 42);
    auto const b = build_adversarial_suite(input, all, vocab, 42);
    auto const c = build_adversarial_suite(input, all, vocab, 43);
    ASSERT_EQ(a.size(), input.size() * all.size());
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);

    for (auto const & item : a) {
        auto const & base = item.base;
        bool const q = item.transform == Transform::question_random_text
                       || item.transform == Transform::question_words_shuffled
                       || item.transform == Transform::questions_swapped;
        bool const ans = item.transform == Transform::answer_random_text
                         || item.transform == Transform::answer_words_shuffled
                         || item.transform == Transform::answers_swapped;
        bool const mat = item.transform == Transform::material_swapped;
        if (!q) EXPECT_EQ(item.question, base.question);
        if (!ans) EXPECT_EQ(item.answer, base.answer);
        if (!mat) EXPECT_EQ(item.material, base.material);
        if (item.transform == Transform::answer_words_shuffled) {
            EXPECT_EQ(sorted_tokens(item.answer), sorted_tokens(base.answer));
        }
        if (item.transform == Transform::question_words_shuffled) {
            EXPECT_EQ(sorted_tokens(item.question), sorted_tokens(base.question));
        }
        if (item.transform == Transform::answer_random_text) {
            EXPECT_EQ(split_whitespace(item.answer).size(), split_whitespace(base.answer).size());
        }
        auto const j = to_json(item);
        EXPECT_EQ(j["item_id"], base.id + "~" + to_string(item.transform));
        EXPECT_EQ(j["transform"], to_string(item.transform));
    }
}

TEST(Suite, TransformNames)
{
    for (auto t : all_transforms) {
        EXPECT_EQ(parse_transform(to_string(t)), t);
        EXPECT_STRNE(category_label(t), "");
    }
    EXPECT_FALSE(parse_transform("nope"));
}
