#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "corpusrep/corpus.hpp"
#include "corpusrep/relation.hpp"
#include "corpusrep/skipgram.hpp"

namespace corpusrep {

enum class Metric { Euclidean, Cosine };

struct Neighbor {
    std::string word;
    double distance;

    friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

/// Signed sum of input vectors. Throws std::out_of_range naming an unknown word.
std::vector<double> evaluate_expression(const EmbeddingModel& model, std::span<const Term> terms);

/// Full ranking of the vocabulary minus `excluded`, ascending by distance and
/// then by word. Cosine distance is 1 - cos; it rejects zero-norm vectors.
std::vector<Neighbor> nearest_neighbors(const EmbeddingModel& model, std::span<const double> query,
                                        Metric metric, const std::set<std::string>& excluded = {});

struct VerifyThresholds {
    /// rhs = 0 relations pass when |lhs| <= zero_rhs_theta * mean |vec(w)|.
    double zero_rhs_theta = 0.2;
};

struct VerificationResult {
    double residual_euclidean = 0.0;        // |lhs - rhs|, rhs = 0 gives |lhs|
    std::optional<double> residual_cosine;  // cos(lhs, rhs); absent for rhs = 0 or zero vectors
    double mean_norm = 0.0;                 // mean input-vector norm over the vocabulary
    double relative_residual = 0.0;         // residual_euclidean / mean_norm
    std::vector<Neighbor> neighbor_ranking;  // euclidean, operands excluded
    std::vector<Neighbor> cosine_ranking;    // empty when lhs is the zero vector
    std::optional<std::size_t> rhs_rank;         // 1-based, euclidean
    std::optional<std::size_t> rhs_rank_cosine;  // 1-based
    bool solved = false;
};

/// rhs word: solved iff the rhs is the rank-1 euclidean neighbor of the lhs
/// sum with the lhs words excluded. rhs = 0: solved iff the relative residual
/// is within the threshold.
VerificationResult verify_relation(const EmbeddingModel& model, const Relation& relation,
                                   const VerifyThresholds& thresholds = {});

double vector_norm(std::span<const double> v);
double cosine_similarity(std::span<const double> a, std::span<const double> b);
double mean_input_norm(const EmbeddingModel& model);

/// Angles in degrees between the input vectors of `words`. Symmetric, zero
/// diagonal, entries in [0, 180]. Throws naming a zero-norm word.
Matrix pairwise_angles(const EmbeddingModel& model, std::span<const std::string> words);

/// Context set of every vocabulary id: ids seen within `window` positions of
/// any occurrence, own position excluded, windows truncated at the ends.
std::vector<std::set<TokenId>> context_profiles(const Corpus& corpus, std::size_t window);

/// Words grouped by identical context sets. Groups are ordered by their
/// smallest id; words inside a group are sorted lexicographically.
std::vector<std::vector<std::string>> context_partition(const Corpus& corpus, std::size_t window);

struct ContextOverlap {
    std::vector<std::string> words;  // row/column labels, by id
    Matrix jaccard;
    std::vector<std::string> empty_context_words;  // their off-diagonal entries are 0
};

ContextOverlap context_overlap(const Corpus& corpus, std::size_t window);

}  // namespace corpusrep
