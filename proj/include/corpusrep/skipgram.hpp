#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "corpusrep/corpus.hpp"
#include "corpusrep/random.hpp"

namespace corpusrep {

/// Dense row-major matrix of doubles; one row per vocabulary id.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<const double> data() const noexcept { return data_; }
    bool all_finite() const noexcept;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

enum class Objective { FullSoftmax, NegativeSampling };

std::string_view to_string(Objective objective);
/// Accepts "full-softmax" and "negative-sampling".
Objective parse_objective(std::string_view text);

struct TrainingConfig {
    std::size_t dim = 2;
    std::size_t window = 2;
    std::size_t epochs = 15;
    double initial_lr = 0.025;
    double final_lr = 1e-4;
    Objective objective = Objective::FullSoftmax;
    std::size_t negative_samples = 5;
    bool dynamic_window = false;
    std::optional<double> subsample_threshold;
    std::uint64_t seed = 1;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;

    friend bool operator==(const TrainingConfig&, const TrainingConfig&) = default;
};

struct EmbeddingModel {
    Matrix input_vectors;   // vec(w): what every query reads
    Matrix output_vectors;  // context-side weights
    Vocabulary vocabulary;
    TrainingConfig config_echo;
    std::vector<double> epoch_losses;  // mean online pair loss per epoch

    std::size_t dim() const noexcept { return input_vectors.cols(); }
    std::span<const double> vec(std::string_view word) const {
        return input_vectors.row(vocabulary.id_of(word));
    }
};

/// All-zero model over `vocabulary`; the starting point for several oracles.
EmbeddingModel zero_model(const Vocabulary& vocabulary, std::size_t dim);

/// Model with both tables drawn uniformly from [-scale, scale].
EmbeddingModel random_model(const Vocabulary& vocabulary, std::size_t dim, double scale,
                            std::uint64_t seed);

struct TrainingPair {
    TokenId center;
    TokenId context;

    friend bool operator==(const TrainingPair&, const TrainingPair&) = default;
};

/// (w_t, w_{t+j}) for j in [-n, n] \ {0}, truncated at the stream ends. With
/// `dynamic` the half-width at each position is drawn uniformly from 1..n.
/// Throws std::invalid_argument for streams shorter than two tokens.
std::vector<TrainingPair> training_pairs(std::span<const TokenId> tokens, std::size_t window,
                                         bool dynamic, std::uint64_t seed);
std::vector<TrainingPair> training_pairs(const Corpus& corpus, std::size_t window, bool dynamic,
                                         std::uint64_t seed);

std::vector<double> forward_softmax(const EmbeddingModel& model, TokenId center);

/// -log p(context | center) under the full softmax.
double pair_nll(const EmbeddingModel& model, const TrainingPair& pair);
/// Mean of pair_nll over `pairs`.
double nll_loss(const EmbeddingModel& model, std::span<const TrainingPair> pairs);

/// Negative-sampling pair loss: -log s(u_o.v) - sum_k log s(-u_k.v).
double negative_sampling_loss(const EmbeddingModel& model, const TrainingPair& pair,
                              std::span<const TokenId> noise);

struct OutputRowGradient {
    TokenId row;
    std::vector<double> grad;
};

struct PairGradient {
    std::vector<double> input;              // d loss / d input_vectors[center]
    std::vector<OutputRowGradient> output;  // one entry per touched output row
    double loss = 0.0;
};

/// Analytic gradient of the pair loss. Full softmax touches every output row;
/// negative sampling touches the positive row plus one row per noise draw
/// (repeated draws are merged). Throws if negative sampling is asked for with
/// k >= V.
PairGradient pair_gradient(const EmbeddingModel& model, const TrainingPair& pair,
                           Objective objective, std::span<const TokenId> noise = {});

/// Unigram^0.75 noise table; draws that hit the positive context are redrawn.
class NoiseSampler {
public:
    explicit NoiseSampler(const Vocabulary& vocabulary, double power = 0.75);

    /// `k` noise ids, none equal to `positive`.
    std::vector<TokenId> draw(Rng& rng, std::size_t k, TokenId positive) const;

private:
    std::vector<double> cumulative_;
};

/// Max relative error between pair_gradient and central differences of the
/// pair loss over the touched coordinates (both input and output rows).
/// Coordinates where both gradients are below 1e-12 in magnitude count as 0.
double gradient_check(const EmbeddingModel& model, const TrainingPair& pair, double eps,
                      Objective objective = Objective::FullSoftmax,
                      std::span<const TokenId> noise = {});

/// Input vectors uniform in [-0.5/dim, 0.5/dim] from the config seed; output vectors zero.
EmbeddingModel initial_model(const Vocabulary& vocabulary, const TrainingConfig& config);

/// Plain SGD over training_pairs in corpus order, `epochs` passes, learning
/// rate decaying linearly from initial_lr to final_lr across all updates.
/// Deterministic for a fixed (corpus, config).
EmbeddingModel train(const Corpus& corpus, const TrainingConfig& config);

}  // namespace corpusrep
