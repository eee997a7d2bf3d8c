#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "corpusrep/analysis.hpp"
#include "doctest.h"

using namespace corpusrep;

namespace {

const std::string kIII = "Berlin is the capital of Germany.";

using WordSet = std::set<std::string>;

// Context sets of one repeated sentence III, enumerated by hand per window.
std::map<std::string, WordSet> hand_contexts(std::size_t window) {
    const std::vector<std::string> s{"berlin", "is", "the", "capital", "of", "germany"};
    std::map<std::string, WordSet> out;
    if (window == 1) {
        out = {{"berlin", {"germany", "is"}}, {"is", {"berlin", "the"}},     {"the", {"is", "capital"}},
               {"capital", {"the", "of"}},    {"of", {"capital", "germany"}}, {"germany", {"of", "berlin"}}};
    } else if (window == 2) {
        out = {{"berlin", {"of", "germany", "is", "the"}},      {"is", {"germany", "berlin", "the", "capital"}},
               {"the", {"berlin", "is", "capital", "of"}},      {"capital", {"is", "the", "of", "germany"}},
               {"of", {"the", "capital", "germany", "berlin"}}, {"germany", {"capital", "of", "berlin", "is"}}};
    } else {
        for (const auto& w : s) {
            WordSet all(s.begin(), s.end());
            all.erase(w);
            out[w] = all;
        }
    }
    return out;
}

double jaccard(const WordSet& a, const WordSet& b) {
    std::size_t common = 0;
    for (const auto& x : a) common += b.count(x);
    return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

EmbeddingModel model_with(const std::vector<std::pair<std::string, std::vector<double>>>& rows) {
    Vocabulary vocab;
    for (const auto& [w, v] : rows) vocab.add(w);
    auto m = zero_model(vocab, rows.front().second.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t d = 0; d < rows[i].second.size(); ++d) m.input_vectors(i, d) = rows[i].second[d];
    }
    return m;
}

Corpus capital_corpus(std::size_t n) {
    return sample_corpus(
        {SentenceDistribution::uniform({kIII, "Germany has a capital.", "Berlin is the capital."}), n, 2017});
}

Corpus royalty_corpus(std::size_t n, double p) {
    return sample_corpus(
        {SentenceDistribution({{BaseSentence("A king is a man."), p}, {BaseSentence("A queen is a woman."), 1.0 - p}}),
         n, 2017});
}

}  // namespace

TEST_CASE("evaluate_expression") {
    const auto m = model_with({{"king", {1.5, -2.0}}, {"man", {0.25, 1.0}}});
    const auto zero = evaluate_expression(m, std::vector<Term>{{+1, "king"}, {-1, "king"}});
    CHECK(zero == std::vector<double>{0.0, 0.0});
    CHECK(evaluate_expression(m, std::vector<Term>{{+1, "king"}}) == std::vector<double>{1.5, -2.0});
    CHECK(evaluate_expression(m, std::vector<Term>{{+1, "king"}, {-1, "man"}}) == std::vector<double>{1.25, -3.0});
    CHECK_THROWS_WITH_AS(evaluate_expression(m, std::vector<Term>{{+1, "queen"}}), doctest::Contains("queen"),
                         std::out_of_range);
}

TEST_CASE("nearest_neighbors ranking, exclusion and tie-break") {
    const auto m = model_with({{"c", {1.0, 0.0}}, {"b", {0.0, 1.0}}, {"a", {-1.0, 0.0}}, {"berlin", {3.0, 4.0}}});
    const std::vector<double> origin{0.0, 0.0};
    const auto r = nearest_neighbors(m, origin, Metric::Euclidean);
    REQUIRE(r.size() == 4);
    CHECK(r[0] == Neighbor{"a", 1.0});
    CHECK(r[1] == Neighbor{"b", 1.0});
    CHECK(r[2] == Neighbor{"c", 1.0});
    CHECK(r[3] == Neighbor{"berlin", 5.0});

    const auto self = nearest_neighbors(m, m.vec("berlin"), Metric::Euclidean);
    CHECK(self.front() == Neighbor{"berlin", 0.0});
    CHECK(nearest_neighbors(m, m.vec("berlin"), Metric::Euclidean, {"berlin"}).size() == 3);

    const auto cos = nearest_neighbors(m, std::vector<double>{2.0, 0.0}, Metric::Cosine);
    CHECK(cos.front().word == "c");
    CHECK(cos.front().distance == doctest::Approx(0.0));
    CHECK(cos.back().word == "a");
    CHECK(cos.back().distance == doctest::Approx(2.0));

    CHECK_THROWS_AS(nearest_neighbors(m, origin, Metric::Cosine), std::invalid_argument);
    const auto with_zero = model_with({{"x", {1.0, 0.0}}, {"nil", {0.0, 0.0}}});
    CHECK_THROWS_WITH_AS(nearest_neighbors(with_zero, std::vector<double>{1.0, 1.0}, Metric::Cosine),
                         doctest::Contains("nil"), std::invalid_argument);
}

TEST_CASE("self match ranks first for every word of a trained model") {
    const auto corpus = capital_corpus(2000);
    const auto model = train(corpus, TrainingConfig{});
    for (const auto& w : corpus.vocabulary.tokens()) {
        const auto r = nearest_neighbors(model, model.vec(w), Metric::Euclidean);
        CHECK(r.front().word == w);
        CHECK(r.front().distance == 0.0);
    }
}

TEST_CASE("verify_relation on hand-built models") {
    const auto m = model_with({{"germany", {1.0, 0.0}}, {"capital", {0.0, 1.0}}, {"berlin", {1.1, 0.9}},
                               {"the", {-1.0, -1.0}}});
    const auto r = verify_relation(m, parse_relation("germany + capital ~= berlin"));
    CHECK(r.solved);
    CHECK(r.rhs_rank == std::size_t{1});
    CHECK(r.residual_euclidean == doctest::Approx(std::hypot(0.1, 0.1)));
    REQUIRE(r.residual_cosine.has_value());
    CHECK(*r.residual_cosine == doctest::Approx(2.0 / (std::sqrt(2.0) * std::hypot(1.1, 0.9))));
    CHECK(r.neighbor_ranking.size() == 2);

    // rhs = 0 uses the relative residual
    const auto z = model_with({{"k", {1.0, 0.0}}, {"m", {0.0, 1.0}}, {"q", {1.0, 0.05}}, {"w", {0.0, 1.0}}});
    const auto zr = verify_relation(z, parse_relation("k - m ~= q - w"));
    CHECK_FALSE(zr.residual_cosine.has_value());
    CHECK(zr.residual_euclidean == doctest::Approx(0.05));
    CHECK(zr.solved);
    CHECK_FALSE(verify_relation(z, parse_relation("k - m ~= q - w"), VerifyThresholds{0.01}).solved);

    CHECK_THROWS_AS(verify_relation(z, parse_relation("k ~= berlin")), std::out_of_range);
}

TEST_CASE("solved flag is invariant under positive scaling") {
    const auto corpus = royalty_corpus(2000, 0.5);
    const auto capital = capital_corpus(2000);
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        TrainingConfig cfg;
        cfg.seed = seed;
        for (const auto& [c, rel] : {std::pair{&corpus, "king - man ~= queen - woman"},
                                     std::pair{&capital, "germany + capital ~= berlin"}}) {
            const auto model = train(*c, cfg);
            const auto relation = parse_relation(rel);
            const bool base = verify_relation(model, relation).solved;
            for (double s : {0.01, 0.5, 3.0, 250.0}) {
                auto scaled = model;
                for (std::size_t r = 0; r < scaled.input_vectors.rows(); ++r) {
                    for (double& x : scaled.input_vectors.row(r)) x *= s;
                }
                CHECK(verify_relation(scaled, relation).solved == base);
            }
        }
    }
}

TEST_CASE("trained presets solve their relations") {
    TrainingConfig cfg;
    const auto royalty = train(royalty_corpus(10000, 0.5), cfg);
    CHECK(verify_relation(royalty, parse_relation("king - man ~= queen - woman")).solved);

    const auto capital = train(capital_corpus(10000), cfg);
    const std::vector<Term> query{{+1, "germany"}, {+1, "capital"}};
    const auto ranking = nearest_neighbors(capital, evaluate_expression(capital, query), Metric::Euclidean,
                                           {"germany", "capital"});
    CHECK(ranking.front().word == "berlin");
    CHECK(verify_relation(capital, parse_relation("germany + capital ~= berlin")).solved);
}

TEST_CASE("pairwise_angles") {
    const auto m = model_with({{"x", {1.0, 0.0}}, {"y", {0.0, 1.0}}, {"d", {-1.0, -1.0}}, {"nil", {0.0, 0.0}}});
    const std::vector<std::string> same{"x", "x"};
    const auto a = pairwise_angles(m, same);
    CHECK(a(0, 1) == 0.0);
    const std::vector<std::string> xy{"x", "y", "d"};
    const auto b = pairwise_angles(m, xy);
    CHECK(b(0, 1) == doctest::Approx(90.0));
    CHECK(b(0, 2) == doctest::Approx(135.0));
    CHECK(b(1, 0) == b(0, 1));
    const std::vector<std::string> bad{"x", "nil"};
    CHECK_THROWS_WITH_AS(pairwise_angles(m, bad), doctest::Contains("nil"), std::invalid_argument);
}

TEST_CASE("pairwise_angles is symmetric, zero on the diagonal and within [0, 180]") {
    Vocabulary vocab;
    for (int i = 0; i < 8; ++i) vocab.add("w" + std::to_string(i));
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto m = random_model(vocab, 2 + s % 3, 1.0, s);
        const auto angles = pairwise_angles(m, vocab.tokens());
        for (std::size_t i = 0; i < 8; ++i) {
            CHECK(angles(i, i) == 0.0);
            for (std::size_t j = 0; j < 8; ++j) {
                CHECK(angles(i, j) == angles(j, i));
                CHECK(angles(i, j) >= 0.0);
                CHECK(angles(i, j) <= 180.0);
            }
        }
    }
}

TEST_CASE("trained single-sentence model spreads the three context sets 120 degrees apart") {
    const auto model = train(repeated_sentence_corpus(kIII, 10000), TrainingConfig{});
    const std::vector<std::string> reps{"berlin", "is", "the"};
    const auto a = pairwise_angles(model, reps);
    CHECK(a(0, 1) == doctest::Approx(120.0).epsilon(0.05));
    CHECK(a(0, 2) == doctest::Approx(120.0).epsilon(0.05));
    CHECK(a(1, 2) == doctest::Approx(120.0).epsilon(0.05));
}

TEST_CASE("context profiles match hand enumeration for sentence III") {
    const auto corpus = repeated_sentence_corpus(kIII, 10000);
    for (std::size_t n : {1u, 2u, 3u}) {
        const auto profiles = context_profiles(corpus, n);
        const auto expected = hand_contexts(n);
        for (std::size_t id = 0; id < profiles.size(); ++id) {
            WordSet got;
            for (auto c : profiles[id]) got.insert(corpus.vocabulary.token_of(c));
            CHECK(got == expected.at(corpus.vocabulary.token_of(static_cast<TokenId>(id))));
        }
    }
}

TEST_CASE("context_partition on sentence III") {
    const auto corpus = repeated_sentence_corpus(kIII, 10000);
    using Groups = std::vector<std::vector<std::string>>;
    CHECK(context_partition(corpus, 2) == Groups{{"berlin", "capital"}, {"is", "of"}, {"germany", "the"}});
    CHECK(context_partition(corpus, 1) == Groups{{"berlin"}, {"is"}, {"the"}, {"capital"}, {"of"}, {"germany"}});
    CHECK(context_partition(corpus, 3) == Groups{{"berlin"}, {"is"}, {"the"}, {"capital"}, {"of"}, {"germany"}});
}

TEST_CASE("context_overlap on sentence III against hand-enumerated Jaccard") {
    const auto corpus = repeated_sentence_corpus(kIII, 10000);
    for (std::size_t n : {1u, 2u, 3u}) {
        const auto overlap = context_overlap(corpus, n);
        const auto expected = hand_contexts(n);
        for (std::size_t i = 0; i < overlap.words.size(); ++i) {
            CHECK(overlap.jaccard(i, i) == 1.0);
            for (std::size_t j = 0; j < overlap.words.size(); ++j) {
                if (i == j) continue;
                CHECK(overlap.jaccard(i, j) == jaccard(expected.at(overlap.words[i]), expected.at(overlap.words[j])));
            }
        }
    }
    const auto& v = corpus.vocabulary;
    CHECK(context_overlap(corpus, 2).jaccard(v.id_of("berlin"), v.id_of("capital")) == 1.0);
    CHECK(context_overlap(corpus, 3).jaccard(v.id_of("berlin"), v.id_of("is")) == 4.0 / 6.0);
    CHECK(context_overlap(corpus, 1).jaccard(v.id_of("berlin"), v.id_of("capital")) == 0.0);
}

TEST_CASE("partition is a true partition and agrees with unit overlap") {
    Rng rng(404);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<std::string> words;
        const auto len = 2 + rng.below(60);
        for (std::size_t i = 0; i < len; ++i) words.push_back("w" + std::to_string(rng.below(5)));
        const auto corpus = corpus_from_words(words);
        const std::size_t n = 1 + rng.below(3);
        const auto groups = context_partition(corpus, n);
        const auto overlap = context_overlap(corpus, n);

        std::map<std::string, std::size_t> group_of;
        for (std::size_t g = 0; g < groups.size(); ++g) {
            CHECK(std::is_sorted(groups[g].begin(), groups[g].end()));
            for (const auto& w : groups[g]) {
                CHECK(group_of.count(w) == 0);
                group_of[w] = g;
            }
        }
        CHECK(group_of.size() == corpus.vocabulary.size());
        for (std::size_t i = 0; i < overlap.words.size(); ++i) {
            for (std::size_t j = 0; j < overlap.words.size(); ++j) {
                CHECK((group_of[overlap.words[i]] == group_of[overlap.words[j]]) == (overlap.jaccard(i, j) == 1.0));
            }
        }
    }
}

TEST_CASE("words that never occur are flagged with empty contexts") {
    const auto corpus = royalty_corpus(20, 1.0);
    const auto overlap = context_overlap(corpus, 2);
    CHECK(overlap.empty_context_words == std::vector<std::string>{"queen", "woman"});
    CHECK_THROWS_AS(context_partition(Corpus{}, 2), std::invalid_argument);
}
