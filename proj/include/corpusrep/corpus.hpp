#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace corpusrep {

using TokenId = std::uint32_t;

/// Splits on whitespace, trims non-alphanumeric characters from both ends of
/// each piece and lowercases it. Pieces that trim to nothing are dropped.
std::vector<std::string> tokenize(std::string_view raw);

class BaseSentence {
public:
    /// Throws std::invalid_argument if `raw` has no tokens.
    explicit BaseSentence(std::string raw);

    const std::string& raw_text() const noexcept { return raw_; }
    const std::vector<std::string>& tokens() const noexcept { return tokens_; }

    friend bool operator==(const BaseSentence& a, const BaseSentence& b) { return a.raw_ == b.raw_; }

private:
    std::string raw_;
    std::vector<std::string> tokens_;
};

/// Categorical distribution over base sentences. Weights are normalized on
/// construction; zero-weight entries are kept but never drawn.
class SentenceDistribution {
public:
    struct Entry {
        BaseSentence sentence;
        double weight;  // normalized
    };

    explicit SentenceDistribution(std::vector<std::pair<BaseSentence, double>> entries);

    static SentenceDistribution uniform(const std::vector<std::string>& raw_sentences);

    const std::vector<Entry>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }

    /// Inverse-CDF lookup for u in [0, 1).
    std::size_t draw(double u) const noexcept;

    std::vector<BaseSentence> sentences() const;

    friend bool operator==(const SentenceDistribution& a, const SentenceDistribution& b);

private:
    std::vector<Entry> entries_;
    std::vector<double> cumulative_;
};

struct CorpusSpec {
    SentenceDistribution distribution;
    std::size_t num_sentences = 1;
    std::uint64_t seed = 0;
};

class Vocabulary {
public:
    Vocabulary() = default;

    /// Returns the id of `token`, adding it if unseen.
    TokenId add(const std::string& token);

    std::optional<TokenId> find(std::string_view token) const;
    /// Throws std::out_of_range naming the token.
    TokenId id_of(std::string_view token) const;
    const std::string& token_of(TokenId id) const { return tokens_.at(id); }
    std::uint64_t count_of(TokenId id) const { return counts_.at(id); }

    std::size_t size() const noexcept { return tokens_.size(); }
    const std::vector<std::string>& tokens() const noexcept { return tokens_; }
    const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }

    void reset_counts() { counts_.assign(tokens_.size(), 0); }
    void bump(TokenId id) { ++counts_.at(id); }

    friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
        return a.tokens_ == b.tokens_ && a.counts_ == b.counts_;
    }

private:
    std::unordered_map<std::string, TokenId> ids_;
    std::vector<std::string> tokens_;
    std::vector<std::uint64_t> counts_;
};

/// Ids in first-occurrence order over the sentence list; counts are zero.
Vocabulary build_vocabulary(std::span<const BaseSentence> sentences);

/// A flat token stream. Sentence copies are concatenated without separators,
/// so context windows run across copy boundaries.
struct Corpus {
    std::vector<TokenId> tokens;
    Vocabulary vocabulary;
    std::optional<CorpusSpec> spec_echo;

    std::size_t size() const noexcept { return tokens.size(); }
    std::string_view word_at(std::size_t pos) const { return vocabulary.token_of(tokens.at(pos)); }
};

Corpus sample_corpus(const CorpusSpec& spec);

/// Builds a corpus from a literal word sequence (vocabulary in first-occurrence order).
Corpus corpus_from_words(std::span<const std::string> words);

/// `copies` back-to-back repetitions of one sentence.
Corpus repeated_sentence_corpus(std::string_view raw, std::size_t copies);

}  // namespace corpusrep
