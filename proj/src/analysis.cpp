#include "corpusrep/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

namespace corpusrep {

std::vector<double> evaluate_expression(const EmbeddingModel& model, std::span<const Term> terms) {
    std::vector<double> sum(model.dim(), 0.0);
    for (const auto& term : terms) {
        const auto v = model.vec(term.word);
        for (std::size_t d = 0; d < sum.size(); ++d) sum[d] += term.sign * v[d];
    }
    return sum;
}

double vector_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d += a[i] * b[i];
    return std::clamp(d / (vector_norm(a) * vector_norm(b)), -1.0, 1.0);
}

double mean_input_norm(const EmbeddingModel& model) {
    const std::size_t rows = model.input_vectors.rows();
    if (rows == 0) return 0.0;
    double total = 0.0;
    for (std::size_t r = 0; r < rows; ++r) total += vector_norm(model.input_vectors.row(r));
    return total / static_cast<double>(rows);
}

std::vector<Neighbor> nearest_neighbors(const EmbeddingModel& model, std::span<const double> query,
                                        Metric metric, const std::set<std::string>& excluded) {
    if (query.size() != model.dim()) {
        throw std::invalid_argument("query has dimension " + std::to_string(query.size()) +
                                    ", model has " + std::to_string(model.dim()));
    }
    const double query_norm = vector_norm(query);
    if (metric == Metric::Cosine && query_norm == 0.0) {
        throw std::invalid_argument("cosine distance is undefined for a zero-norm query");
    }

    std::vector<Neighbor> ranking;
    const auto& vocab = model.vocabulary;
    for (std::size_t id = 0; id < vocab.size(); ++id) {
        const auto& word = vocab.token_of(static_cast<TokenId>(id));
        if (excluded.contains(word)) continue;
        const auto v = model.input_vectors.row(id);
        double distance = 0.0;
        if (metric == Metric::Euclidean) {
            double s = 0.0;
            for (std::size_t d = 0; d < v.size(); ++d) s += (v[d] - query[d]) * (v[d] - query[d]);
            distance = std::sqrt(s);
        } else {
            if (vector_norm(v) == 0.0) {
                throw std::invalid_argument("cosine distance is undefined for zero-norm vector of \"" + word + "\"");
            }
            distance = 1.0 - cosine_similarity(v, query);
        }
        ranking.push_back({word, distance});
    }
    std::sort(ranking.begin(), ranking.end(), [](const Neighbor& a, const Neighbor& b) {
        if (a.distance != b.distance) return a.distance < b.distance;
        return a.word < b.word;
    });
    return ranking;
}

namespace {

std::optional<std::size_t> rank_of(const std::vector<Neighbor>& ranking, const std::string& word) {
    for (std::size_t i = 0; i < ranking.size(); ++i) {
        if (ranking[i].word == word) return i + 1;
    }
    return std::nullopt;
}

bool has_zero_row(const EmbeddingModel& model) {
    for (std::size_t r = 0; r < model.input_vectors.rows(); ++r) {
        if (vector_norm(model.input_vectors.row(r)) == 0.0) return true;
    }
    return false;
}

}  // namespace

VerificationResult verify_relation(const EmbeddingModel& model, const Relation& relation,
                                   const VerifyThresholds& thresholds) {
    const auto lhs = evaluate_expression(model, relation.lhs);
    std::set<std::string> operands;
    for (const auto& t : relation.lhs) operands.insert(t.word);

    VerificationResult result;
    result.mean_norm = mean_input_norm(model);
    result.neighbor_ranking = nearest_neighbors(model, lhs, Metric::Euclidean, operands);
    const bool cosine_defined = vector_norm(lhs) > 0.0 && !has_zero_row(model);
    if (cosine_defined) result.cosine_ranking = nearest_neighbors(model, lhs, Metric::Cosine, operands);

    if (relation.rhs) {
        const auto target = model.vec(*relation.rhs);
        std::vector<double> diff(lhs.size());
        for (std::size_t d = 0; d < diff.size(); ++d) diff[d] = lhs[d] - target[d];
        result.residual_euclidean = vector_norm(diff);
        if (cosine_defined) {
            result.residual_cosine = cosine_similarity(lhs, target);
            result.rhs_rank_cosine = rank_of(result.cosine_ranking, *relation.rhs);
        }
        result.rhs_rank = rank_of(result.neighbor_ranking, *relation.rhs);
    } else {
        result.residual_euclidean = vector_norm(lhs);
    }
    result.relative_residual =
        result.mean_norm > 0.0 ? result.residual_euclidean / result.mean_norm
                               : (result.residual_euclidean == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());

    if (relation.rhs) {
        result.solved = result.rhs_rank == std::size_t{1};
    } else {
        result.solved = result.residual_euclidean <= thresholds.zero_rhs_theta * result.mean_norm;
    }
    return result;
}

Matrix pairwise_angles(const EmbeddingModel& model, std::span<const std::string> words) {
    std::vector<std::span<const double>> vecs;
    for (const auto& w : words) {
        auto v = model.vec(w);
        if (vector_norm(v) == 0.0) throw std::invalid_argument("angle undefined for zero-norm vector of \"" + w + "\"");
        vecs.push_back(v);
    }
    Matrix angles(words.size(), words.size());
    for (std::size_t i = 0; i < words.size(); ++i) {
        for (std::size_t j = i + 1; j < words.size(); ++j) {
            const double a = std::acos(cosine_similarity(vecs[i], vecs[j])) * 180.0 / std::numbers::pi;
            angles(i, j) = a;
            angles(j, i) = a;
        }
    }
    return angles;
}

std::vector<std::set<TokenId>> context_profiles(const Corpus& corpus, std::size_t window) {
    if (corpus.tokens.empty()) throw std::invalid_argument("context analysis needs a non-empty corpus");
    if (window < 1) throw std::invalid_argument("window must be >= 1");
    const std::size_t vocab = corpus.vocabulary.size();
    std::vector<std::vector<bool>> seen(vocab, std::vector<bool>(vocab, false));
    const auto& tokens = corpus.tokens;
    const std::size_t len = tokens.size();
    for (std::size_t t = 0; t < len; ++t) {
        const std::size_t lo = t >= window ? t - window : 0;
        const std::size_t hi = std::min(len - 1, t + window);
        for (std::size_t c = lo; c <= hi; ++c) {
            if (c != t) seen[tokens[t]][tokens[c]] = true;
        }
    }
    std::vector<std::set<TokenId>> profiles(vocab);
    for (std::size_t w = 0; w < vocab; ++w) {
        for (std::size_t c = 0; c < vocab; ++c) {
            if (seen[w][c]) profiles[w].insert(static_cast<TokenId>(c));
        }
    }
    return profiles;
}

std::vector<std::vector<std::string>> context_partition(const Corpus& corpus, std::size_t window) {
    const auto profiles = context_profiles(corpus, window);
    // Groups keyed by context set; ids are visited in order, so the first id
    // of a group is its smallest member.
    std::map<std::set<TokenId>, std::size_t> group_of;
    std::vector<std::vector<std::string>> groups;
    for (std::size_t id = 0; id < profiles.size(); ++id) {
        auto [it, inserted] = group_of.try_emplace(profiles[id], groups.size());
        if (inserted) groups.emplace_back();
        groups[it->second].push_back(corpus.vocabulary.token_of(static_cast<TokenId>(id)));
    }
    for (auto& g : groups) std::sort(g.begin(), g.end());
    return groups;
}

ContextOverlap context_overlap(const Corpus& corpus, std::size_t window) {
    const auto profiles = context_profiles(corpus, window);
    const std::size_t vocab = profiles.size();
    ContextOverlap out;
    out.words = corpus.vocabulary.tokens();
    out.jaccard = Matrix(vocab, vocab);
    for (std::size_t i = 0; i < vocab; ++i) {
        if (profiles[i].empty()) out.empty_context_words.push_back(out.words[i]);
        out.jaccard(i, i) = 1.0;
        for (std::size_t j = i + 1; j < vocab; ++j) {
            std::size_t common = 0;
            for (TokenId c : profiles[i]) common += profiles[j].count(c);
            const std::size_t uni = profiles[i].size() + profiles[j].size() - common;
            const double value = uni == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(uni);
            out.jaccard(i, j) = value;
            out.jaccard(j, i) = value;
        }
    }
    return out;
}

}  // namespace corpusrep
