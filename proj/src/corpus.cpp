#include "corpusrep/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include "corpusrep/random.hpp"

namespace corpusrep {

namespace {

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::vector<std::string> tokenize(std::string_view raw) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < raw.size()) {
        while (i < raw.size() && is_space(raw[i])) ++i;
        std::size_t j = i;
        while (j < raw.size() && !is_space(raw[j])) ++j;
        std::string_view piece = raw.substr(i, j - i);
        while (!piece.empty() && !is_alnum(piece.front())) piece.remove_prefix(1);
        while (!piece.empty() && !is_alnum(piece.back())) piece.remove_suffix(1);
        if (!piece.empty()) {
            std::string token(piece);
            for (char& c : token) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            out.push_back(std::move(token));
        }
        i = j;
    }
    return out;
}

BaseSentence::BaseSentence(std::string raw) : raw_(std::move(raw)), tokens_(tokenize(raw_)) {
    if (tokens_.empty()) {
        throw std::invalid_argument("sentence \"" + raw_ + "\" contains no tokens");
    }
}

SentenceDistribution::SentenceDistribution(std::vector<std::pair<BaseSentence, double>> entries) {
    if (entries.empty()) throw std::invalid_argument("sentence distribution needs at least one entry");
    double total = 0.0;
    for (const auto& [sentence, weight] : entries) {
        if (!std::isfinite(weight) || weight < 0.0) {
            throw std::invalid_argument("weight must be finite and non-negative for sentence \"" +
                                        sentence.raw_text() + "\"");
        }
        total += weight;
    }
    if (!(total > 0.0)) throw std::invalid_argument("at least one weight must be positive");

    entries_.reserve(entries.size());
    cumulative_.reserve(entries.size());
    double running = 0.0;
    for (auto& [sentence, weight] : entries) {
        const double w = weight / total;
        running += w;
        entries_.push_back({std::move(sentence), w});
        cumulative_.push_back(running);
    }
    // Guard against the last partial sum landing a hair below 1.
    for (std::size_t i = entries_.size(); i-- > 0;) {
        if (entries_[i].weight > 0.0) {
            std::fill(cumulative_.begin() + static_cast<std::ptrdiff_t>(i), cumulative_.end(), 1.0);
            break;
        }
    }
}

SentenceDistribution SentenceDistribution::uniform(const std::vector<std::string>& raw_sentences) {
    std::vector<std::pair<BaseSentence, double>> entries;
    for (const auto& raw : raw_sentences) entries.emplace_back(BaseSentence(raw), 1.0);
    return SentenceDistribution(std::move(entries));
}

std::size_t SentenceDistribution::draw(double u) const noexcept {
    // First index whose cumulative weight exceeds u; zero-weight entries share
    // their predecessor's cumulative value and can never satisfy the strict test.
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) {
        // u >= 1: the last entry with positive weight.
        return static_cast<std::size_t>(std::lower_bound(cumulative_.begin(), cumulative_.end(), 1.0) -
                                        cumulative_.begin());
    }
    return static_cast<std::size_t>(it - cumulative_.begin());
}

std::vector<BaseSentence> SentenceDistribution::sentences() const {
    std::vector<BaseSentence> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.sentence);
    return out;
}

bool operator==(const SentenceDistribution& a, const SentenceDistribution& b) {
    if (a.entries_.size() != b.entries_.size()) return false;
    for (std::size_t i = 0; i < a.entries_.size(); ++i) {
        if (!(a.entries_[i].sentence == b.entries_[i].sentence) ||
            a.entries_[i].weight != b.entries_[i].weight) {
            return false;
        }
    }
    return true;
}

TokenId Vocabulary::add(const std::string& token) {
    if (auto it = ids_.find(token); it != ids_.end()) return it->second;
    const auto id = static_cast<TokenId>(tokens_.size());
    ids_.emplace(token, id);
    tokens_.push_back(token);
    counts_.push_back(0);
    return id;
}

std::optional<TokenId> Vocabulary::find(std::string_view token) const {
    if (auto it = ids_.find(std::string(token)); it != ids_.end()) return it->second;
    return std::nullopt;
}

TokenId Vocabulary::id_of(std::string_view token) const {
    if (auto id = find(token)) return *id;
    throw std::out_of_range("unknown word \"" + std::string(token) + "\"");
}

Vocabulary build_vocabulary(std::span<const BaseSentence> sentences) {
    Vocabulary vocab;
    for (const auto& sentence : sentences) {
        for (const auto& token : sentence.tokens()) vocab.add(token);
    }
    return vocab;
}

Corpus sample_corpus(const CorpusSpec& spec) {
    if (spec.num_sentences < 1) throw std::invalid_argument("num_sentences must be at least 1");
    const auto& entries = spec.distribution.entries();

    Corpus corpus;
    const auto sentences = spec.distribution.sentences();
    corpus.vocabulary = build_vocabulary(sentences);

    std::vector<std::vector<TokenId>> encoded;
    encoded.reserve(entries.size());
    for (const auto& e : entries) {
        std::vector<TokenId> ids;
        for (const auto& t : e.sentence.tokens()) ids.push_back(corpus.vocabulary.id_of(t));
        encoded.push_back(std::move(ids));
    }

    Rng rng(spec.seed);
    for (std::size_t i = 0; i < spec.num_sentences; ++i) {
        const auto& ids = encoded[spec.distribution.draw(rng.uniform())];
        corpus.tokens.insert(corpus.tokens.end(), ids.begin(), ids.end());
    }
    if (corpus.tokens.empty()) throw std::invalid_argument("sampled corpus is empty");
    for (TokenId id : corpus.tokens) corpus.vocabulary.bump(id);
    corpus.spec_echo = spec;
    return corpus;
}

Corpus corpus_from_words(std::span<const std::string> words) {
    Corpus corpus;
    corpus.tokens.reserve(words.size());
    for (const auto& w : words) corpus.tokens.push_back(corpus.vocabulary.add(w));
    for (TokenId id : corpus.tokens) corpus.vocabulary.bump(id);
    return corpus;
}

Corpus repeated_sentence_corpus(std::string_view raw, std::size_t copies) {
    CorpusSpec spec{SentenceDistribution({{BaseSentence(std::string(raw)), 1.0}}), copies, 0};
    return sample_corpus(spec);
}

}  // namespace corpusrep
