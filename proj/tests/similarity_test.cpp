#include <doctest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "trendlex/error.hpp"
#include "trendlex/similarity.hpp"

using namespace trendlex;

namespace {

TermEmbedding emb(std::string term, std::size_t w, Vector v) { return {std::move(term), w, std::move(v), 1}; }

}  // namespace

TEST_CASE("Cosine.Basics") {
    const Vector v{1, 2, 3}, w{-2, 0.5, 4};
    CHECK_NEAR(cosine(v, v), 1.0, 1e-15);
    CHECK_DOUBLE_EQ(cosine(v, w), cosine(w, v));
    const Vector scaled{3.5, 7, 10.5};
    CHECK_NEAR(cosine(scaled, w), cosine(v, w), 1e-15);
    CHECK_EQ(cosine(Vector{0, 0, 0}, v), 0.0);
    CHECK_EQ(cosine(Vector{1, 0}, Vector{0, 1}), 0.0);
    CHECK_THROWS_AS(cosine(Vector{1}, Vector{1, 2}), InvalidArgument);
}

TEST_CASE("ScoreTerms.Examples") {
    std::vector<TermEmbedding> seeds{emb("s1", 5, {1, 0}), emb("s2", 5, {0, 1})};
    std::vector<TermEmbedding> terms{emb("diag", 5, {1 / std::sqrt(2.0), 1 / std::sqrt(2.0)}),
                                     emb("orth", 5, {0, 0}), emb("x", 5, {3, 0})};
    auto s = score_terms(terms, seeds);
    CHECK_NEAR(s.at("diag"), std::sqrt(2.0) / 2, 1e-15);
    CHECK_EQ(s.at("orth"), 0.0);
    CHECK_NEAR(s.at("x"), 0.5, 1e-15);

    std::vector<TermEmbedding> same{emb("s", 5, {2, 2}), emb("t", 5, {2, 2})};
    CHECK_NEAR(score_terms(std::vector<TermEmbedding>{emb("u", 5, {1, 1})}, same).at("u"), 1.0, 1e-15);
}

TEST_CASE("ClassifyWindow.Examples") {
    auto odd = classify_window({{"a", 0.1}, {"b", 0.2}, {"c", 0.3}});
    CHECK_DOUBLE_EQ(odd.gamma, 0.2);
    CHECK_EQ(odd.labels, (std::map<std::string, int>{{"a", 0}, {"b", 0}, {"c", 1}}));

    auto flat = classify_window({{"a", 0.4}, {"b", 0.4}, {"c", 0.4}});
    CHECK_DOUBLE_EQ(flat.gamma, 0.4);
    for (const auto& [t, l] : flat.labels) CHECK_EQ(l, 0);

    auto even = classify_window({{"a", 0.1}, {"b", 0.4}, {"c", 0.6}, {"d", 0.9}});
    CHECK_DOUBLE_EQ(even.gamma, 0.5);
    CHECK_EQ(even.labels.at("c") + even.labels.at("d"), 2);
    CHECK_EQ(even.labels.at("a") + even.labels.at("b"), 0);
}

TEST_CASE("ClassifyWindow.MeanMode") {
    auto r = classify_window({{"a", 0.0}, {"b", 0.1}, {"c", 0.9}}, ThresholdMode::mean);
    CHECK_NEAR(r.gamma, 1.0 / 3, 1e-15);
    CHECK_EQ(r.labels.at("c"), 1);
    CHECK_EQ(r.labels.at("b"), 0);
    CHECK_EQ(parse_threshold_mode(to_string(ThresholdMode::mean)), ThresholdMode::mean);
    CHECK_THROWS_AS(parse_threshold_mode("mode"), InvalidArgument);
}

TEST_CASE("Median.Counts") {
    CHECK_DOUBLE_EQ(median({3, 1, 2}), 2);
    CHECK_DOUBLE_EQ(median({4, 1, 3, 2}), 2.5);
    CHECK_DOUBLE_EQ(median({7}), 7);
}

TEST_CASE("Vote.Examples") {
    std::map<std::size_t, int> seven, eight, zero;
    for (std::size_t w = 1; w <= 10; ++w) {
        seven[w] = w <= 7;
        eight[w] = w <= 8;
        zero[w] = 0;
    }
    CHECK_EQ(vote(seven, 7), Label::antisemitic);
    CHECK_EQ(vote(eight, 9), Label::not_antisemitic);
    for (std::size_t m = 1; m <= 10; ++m) CHECK_EQ(vote(zero, m), Label::not_antisemitic);
    CHECK_THROWS_AS(vote(zero, 0), InvalidArgument);
    CHECK_THROWS_AS(vote(zero, 11), InvalidArgument);
}

TEST_CASE("SimilarityProperties.MedianSplitWithDistinctScores") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int round = 0; round < 300; ++round) {
        const std::size_t n = 1 + rng() % 120;
        std::map<std::string, double> scores;
        std::set<double> used;
        while (scores.size() < n) {
            const double s = u(rng);
            if (used.insert(s).second) scores["t" + std::to_string(scores.size())] = s;
        }
        int ones = 0;
        for (const auto& [t, l] : classify_window(scores).labels) ones += l;
        { INFO(n); CHECK_EQ(static_cast<std::size_t>(ones), n / 2); }
    }
}

TEST_CASE("SimilarityProperties.VoteMonotone") {
    std::mt19937_64 rng(9);
    for (int round = 0; round < 300; ++round) {
        std::map<std::size_t, int> labels;
        for (std::size_t w = 1; w <= 10; ++w) labels[w] = static_cast<int>(rng() % 2);
        for (std::size_t m = 1; m < 10; ++m)
            if (vote(labels, m) == Label::not_antisemitic) CHECK_EQ(vote(labels, m + 1), Label::not_antisemitic);
        for (auto& [w, l] : labels) {
            if (l) continue;
            auto flipped = labels;
            flipped[w] = 1;
            for (std::size_t m = 1; m <= 10; ++m)
                if (vote(labels, m) == Label::antisemitic) CHECK_EQ(vote(flipped, m), Label::antisemitic);
        }
    }
}

TEST_CASE("SimilarityProperties.PositiveRescalingKeepsLabels") {
    std::mt19937_64 rng(10);
    std::uniform_real_distribution<double> u(-1, 1);
    auto random_vec = [&] {
        Vector v(6);
        for (auto& x : v) x = u(rng);
        return v;
    };
    for (int round = 0; round < 50; ++round) {
        std::vector<TermEmbedding> seeds, terms;
        for (int i = 0; i < 4; ++i) seeds.push_back(emb("s" + std::to_string(i), 3, random_vec()));
        for (int i = 0; i < 9; ++i) terms.push_back(emb("t" + std::to_string(i), 3, random_vec()));
        const auto base = classify_window(score_terms(terms, seeds)).labels;
        for (auto& x : terms[round % 9].vector) x *= 17.0;
        for (auto& x : seeds[round % 4].vector) x *= 0.01;
        CHECK_EQ(base, classify_window(score_terms(terms, seeds)).labels);
    }
}

TEST_CASE("JudgeTerms.VerdictShape") {
    EmbeddingTable seeds, terms;
    const std::vector<std::size_t> windows{1, 2, 3};
    for (auto w : windows) {
        seeds["s"][w] = emb("s", w, {1, 0});
        terms["close"][w] = emb("close", w, {1, 0.1});
        terms["mid"][w] = emb("mid", w, {1, 1});
        terms["far"][w] = emb("far", w, {0, 1});
    }
    terms["partial"][1] = emb("partial", 1, {1, 0});
    auto v = judge_terms(terms, seeds, windows, 2);
    REQUIRE_EQ(v.size(), 3u);
    for (const auto& s : v) {
        REQUIRE_EQ(s.windows.size(), 3u);
        std::size_t sum = 0;
        for (const auto& ws : s.windows) {
            CHECK_GE(ws.score, -1.0);
            CHECK_LE(ws.score, 1.0);
            sum += static_cast<std::size_t>(ws.label);
        }
        CHECK_EQ(s.vote_count, sum);
        CHECK_EQ(s.final_label == Label::antisemitic, s.vote_count >= 2);
        CHECK_EQ(s.final_label == Label::antisemitic, s.term == "close");
    }
}
