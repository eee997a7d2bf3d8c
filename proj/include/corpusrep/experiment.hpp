#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "corpusrep/analysis.hpp"
#include "corpusrep/corpus.hpp"
#include "corpusrep/relation.hpp"
#include "corpusrep/skipgram.hpp"

namespace corpusrep {

/// Bad configuration: malformed file, unknown key or an invalid value. The
/// message names the offending field (or line, for syntax errors).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct WeightedSentence {
    std::string text;
    double weight = 1.0;

    friend bool operator==(const WeightedSentence&, const WeightedSentence&) = default;
};

struct AnalysisFlags {
    bool partition = false;
    bool overlap = false;
    bool angles = false;
    bool neighbors = false;

    friend bool operator==(const AnalysisFlags&, const AnalysisFlags&) = default;
};

struct ExperimentConfig {
    std::string name;
    std::vector<WeightedSentence> sentences;
    std::size_t num_sentences = 1000;
    std::uint64_t corpus_seed = 2017;
    TrainingConfig training;
    std::vector<std::string> relations;
    AnalysisFlags analyses;
    std::optional<std::vector<std::string>> angle_words;
    std::vector<std::uint64_t> seeds;  // empty: just training.seed
    double zero_rhs_theta = 0.2;

    std::vector<std::uint64_t> effective_seeds() const;
    /// Throws ConfigError naming the field.
    void validate() const;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Strict JSON schema: unknown keys are rejected.
ExperimentConfig config_from_json_text(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_to_json_text(const ExperimentConfig& config);

struct SeedRun {
    std::uint64_t seed = 0;
    EmbeddingModel model;
    std::vector<VerificationResult> verifications;  // one per relation
};

struct WordNeighbors {
    std::string word;
    std::vector<Neighbor> ranking;  // euclidean, the word itself excluded
};

struct AngleTable {
    std::vector<std::string> words;
    Matrix degrees;
};

struct ExperimentReport {
    ExperimentConfig config;
    Vocabulary vocabulary;  // counts over the sampled corpus
    std::size_t corpus_length = 0;
    std::vector<Relation> relations;
    std::vector<SeedRun> runs;            // one per seed, in seed-list order
    std::vector<double> solved_fraction;  // one per relation
    std::optional<std::vector<std::vector<std::string>>> partition;
    std::optional<ContextOverlap> overlap;
    std::optional<AngleTable> angles;                    // first seed
    std::optional<std::vector<WordNeighbors>> neighbors;  // first seed
    double duration_seconds = 0.0;  // wall clock; kept out of emitted files
};

/// Samples the corpus, trains once per seed, verifies every relation per
/// seed and runs the requested analyses. Errors are rethrown as
/// std::runtime_error prefixed with the experiment name.
ExperimentReport run_experiment(const ExperimentConfig& config);

enum class Figure { Fig2, Fig3, Fig4, Sec2b };

Figure parse_figure(std::string_view text);
std::string_view to_string(Figure figure);

/// Configs behind a figure replication (runnable without executing them).
std::vector<ExperimentConfig> figure_configs(Figure figure);
std::vector<ExperimentReport> replicate_figure(Figure figure);

namespace presets {

inline constexpr std::string_view kSentenceI = "A king is a man.";
inline constexpr std::string_view kSentenceII = "A queen is a woman.";
inline constexpr std::string_view kSentenceIII = "Berlin is the capital of Germany.";
inline constexpr std::string_view kSentenceIV = "Germany has a capital.";
inline constexpr std::string_view kSentenceV = "Berlin is the capital.";

inline constexpr std::string_view kRoyaltyRelation = "king - man ~= queen - woman";
inline constexpr std::string_view kCapitalRelation = "germany + capital ~= berlin";

inline constexpr std::uint64_t kCorpusSeed = 2017;

std::vector<std::uint64_t> default_seeds();  // 1..5

/// Sentences I/II with P(I) = p.
ExperimentConfig royalty(std::size_t num_sentences, double p);
/// Sentences III-V, uniform.
ExperimentConfig capital(std::size_t num_sentences);
/// Copies of sentence III at the given window, with partition/overlap/angles.
ExperimentConfig single_sentence(std::size_t copies, std::size_t window);

}  // namespace presets

}  // namespace corpusrep
