#include "corpusrep/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace corpusrep {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& field, const std::string& message) {
    throw ConfigError("field '" + field + "': " + message);
}

void reject_unknown_keys(const json& object, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& [key, value] : object.items()) {
        if (!allowed.contains(key)) {
            throw ConfigError("unknown key \"" + key + "\"" + (where.empty() ? "" : " in " + where) +
                              " (allowed: " + [&] {
                                  std::string list;
                                  for (const auto& k : allowed) list += (list.empty() ? "" : ", ") + k;
                                  return list;
                              }() + ")");
        }
    }
}

const json& require(const json& object, const std::string& key, const std::string& field) {
    auto it = object.find(key);
    if (it == object.end()) fail(field, "is required");
    return *it;
}

std::uint64_t as_uint(const json& v, const std::string& field) {
    if (!v.is_number_unsigned()) fail(field, "expected a non-negative integer");
    return v.get<std::uint64_t>();
}

std::size_t as_positive(const json& v, const std::string& field) {
    const auto x = as_uint(v, field);
    if (x < 1) fail(field, "must be at least 1");
    return static_cast<std::size_t>(x);
}

double as_real(const json& v, const std::string& field) {
    if (!v.is_number()) fail(field, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(field, "must be finite");
    return x;
}

bool as_bool(const json& v, const std::string& field) {
    if (!v.is_boolean()) fail(field, "expected true or false");
    return v.get<bool>();
}

std::string as_string(const json& v, const std::string& field) {
    if (!v.is_string()) fail(field, "expected a string");
    return v.get<std::string>();
}

std::vector<std::string> as_string_list(const json& v, const std::string& field) {
    if (!v.is_array()) fail(field, "expected a list of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_string(v[i], field + "[" + std::to_string(i) + "]"));
    return out;
}

TrainingConfig training_from_json(const json& j) {
    if (!j.is_object()) fail("training", "expected an object");
    reject_unknown_keys(j,
                        {"dim", "window", "epochs", "initial_lr", "final_lr", "objective", "negative_samples",
                         "dynamic_window", "subsample_threshold", "seed"},
                        "training");
    TrainingConfig t;
    if (j.contains("dim")) t.dim = as_positive(j["dim"], "training.dim");
    if (j.contains("window")) t.window = as_positive(j["window"], "training.window");
    if (j.contains("epochs")) t.epochs = as_positive(j["epochs"], "training.epochs");
    if (j.contains("initial_lr")) t.initial_lr = as_real(j["initial_lr"], "training.initial_lr");
    if (j.contains("final_lr")) t.final_lr = as_real(j["final_lr"], "training.final_lr");
    if (j.contains("objective")) {
        try {
            t.objective = parse_objective(as_string(j["objective"], "training.objective"));
        } catch (const ConfigError&) {
            throw;
        } catch (const std::invalid_argument& e) {
            fail("training.objective", e.what());
        }
    }
    if (j.contains("negative_samples")) t.negative_samples = as_positive(j["negative_samples"], "training.negative_samples");
    if (j.contains("dynamic_window")) t.dynamic_window = as_bool(j["dynamic_window"], "training.dynamic_window");
    if (j.contains("subsample_threshold") && !j["subsample_threshold"].is_null()) {
        t.subsample_threshold = as_real(j["subsample_threshold"], "training.subsample_threshold");
    }
    if (j.contains("seed")) t.seed = as_uint(j["seed"], "training.seed");
    return t;
}

ordered_json training_to_json(const TrainingConfig& t) {
    ordered_json j;
    j["dim"] = t.dim;
    j["window"] = t.window;
    j["epochs"] = t.epochs;
    j["initial_lr"] = t.initial_lr;
    j["final_lr"] = t.final_lr;
    j["objective"] = std::string(to_string(t.objective));
    j["negative_samples"] = t.negative_samples;
    j["dynamic_window"] = t.dynamic_window;
    j["subsample_threshold"] = t.subsample_threshold ? ordered_json(*t.subsample_threshold) : ordered_json(nullptr);
    j["seed"] = t.seed;
    return j;
}

std::pair<std::size_t, std::size_t> line_and_column(std::string_view text, std::size_t byte) {
    const std::size_t end = std::min(byte == 0 ? 0 : byte - 1, text.size());
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < end; ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

}  // namespace

std::vector<std::uint64_t> ExperimentConfig::effective_seeds() const {
    return seeds.empty() ? std::vector<std::uint64_t>{training.seed} : seeds;
}

void ExperimentConfig::validate() const {
    if (name.empty()) fail("name", "must not be empty");
    if (sentences.empty()) fail("sentences", "needs at least one sentence");
    std::set<std::string> words;
    bool any_positive = false;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        const std::string field = "sentences[" + std::to_string(i) + "]";
        const auto& s = sentences[i];
        if (!std::isfinite(s.weight) || s.weight < 0.0) fail(field + ".weight", "weight must be non-negative");
        if (s.weight > 0.0) any_positive = true;
        const auto tokens = tokenize(s.text);
        if (tokens.empty()) fail(field + ".text", "sentence contains no tokens");
        words.insert(tokens.begin(), tokens.end());
    }
    if (!any_positive) fail("sentences", "at least one weight must be positive");
    if (num_sentences < 1) fail("num_sentences", "must be at least 1");

    try {
        training.validate();
    } catch (const std::invalid_argument& e) {
        fail("training", e.what());
    }
    if (training.objective == Objective::NegativeSampling && training.negative_samples >= words.size()) {
        fail("training.negative_samples", "must be below the vocabulary size " + std::to_string(words.size()));
    }

    for (std::size_t i = 0; i < relations.size(); ++i) {
        const std::string field = "relations[" + std::to_string(i) + "]";
        Relation rel;
        try {
            rel = parse_relation(relations[i]);
        } catch (const RelationSyntaxError& e) {
            fail(field, e.what());
        }
        for (const auto& w : rel.words()) {
            if (!words.contains(w)) fail(field, "word \"" + w + "\" does not occur in any sentence");
        }
    }
    if (angle_words) {
        for (std::size_t i = 0; i < angle_words->size(); ++i) {
            if (!words.contains((*angle_words)[i])) {
                fail("angle_words[" + std::to_string(i) + "]",
                     "word \"" + (*angle_words)[i] + "\" does not occur in any sentence");
            }
        }
    }
    if (!(zero_rhs_theta > 0.0) || !std::isfinite(zero_rhs_theta)) fail("zero_rhs_theta", "must be positive");
}

ExperimentConfig config_from_json_text(std::string_view text) {
    json j;
    try {
        j = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const auto [line, column] = line_and_column(text, e.byte);
        throw ConfigError("parse error at line " + std::to_string(line) + ", column " + std::to_string(column) +
                          ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    reject_unknown_keys(j,
                        {"name", "sentences", "num_sentences", "corpus_seed", "training", "relations", "analyses",
                         "angle_words", "seeds", "zero_rhs_theta"},
                        "");

    ExperimentConfig c;
    c.name = as_string(require(j, "name", "name"), "name");
    const auto& sentences = require(j, "sentences", "sentences");
    if (!sentences.is_array()) fail("sentences", "expected a list");
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        const std::string field = "sentences[" + std::to_string(i) + "]";
        const auto& s = sentences[i];
        WeightedSentence ws;
        if (s.is_string()) {
            ws.text = s.get<std::string>();
        } else if (s.is_object()) {
            reject_unknown_keys(s, {"text", "weight"}, field);
            ws.text = as_string(require(s, "text", field + ".text"), field + ".text");
            if (s.contains("weight")) ws.weight = as_real(s["weight"], field + ".weight");
        } else {
            fail(field, "expected a string or {\"text\", \"weight\"} object");
        }
        c.sentences.push_back(std::move(ws));
    }
    c.num_sentences = as_positive(require(j, "num_sentences", "num_sentences"), "num_sentences");
    if (j.contains("corpus_seed")) c.corpus_seed = as_uint(j["corpus_seed"], "corpus_seed");
    if (j.contains("training")) c.training = training_from_json(j["training"]);
    if (j.contains("relations")) c.relations = as_string_list(j["relations"], "relations");
    if (j.contains("analyses")) {
        const auto& a = j["analyses"];
        if (!a.is_object()) fail("analyses", "expected an object");
        reject_unknown_keys(a, {"partition", "overlap", "angles", "neighbors"}, "analyses");
        if (a.contains("partition")) c.analyses.partition = as_bool(a["partition"], "analyses.partition");
        if (a.contains("overlap")) c.analyses.overlap = as_bool(a["overlap"], "analyses.overlap");
        if (a.contains("angles")) c.analyses.angles = as_bool(a["angles"], "analyses.angles");
        if (a.contains("neighbors")) c.analyses.neighbors = as_bool(a["neighbors"], "analyses.neighbors");
    }
    if (j.contains("angle_words") && !j["angle_words"].is_null()) {
        c.angle_words = as_string_list(j["angle_words"], "angle_words");
    }
    if (j.contains("seeds")) {
        const auto& s = j["seeds"];
        if (!s.is_array()) fail("seeds", "expected a list of integers");
        for (std::size_t i = 0; i < s.size(); ++i) c.seeds.push_back(as_uint(s[i], "seeds[" + std::to_string(i) + "]"));
    }
    if (j.contains("zero_rhs_theta")) c.zero_rhs_theta = as_real(j["zero_rhs_theta"], "zero_rhs_theta");
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return config_from_json_text(buffer.str());
}

std::string config_to_json_text(const ExperimentConfig& c) {
    ordered_json j;
    j["name"] = c.name;
    j["sentences"] = ordered_json::array();
    for (const auto& s : c.sentences) j["sentences"].push_back({{"text", s.text}, {"weight", s.weight}});
    j["num_sentences"] = c.num_sentences;
    j["corpus_seed"] = c.corpus_seed;
    j["training"] = training_to_json(c.training);
    j["relations"] = c.relations;
    j["analyses"] = {{"partition", c.analyses.partition},
                     {"overlap", c.analyses.overlap},
                     {"angles", c.analyses.angles},
                     {"neighbors", c.analyses.neighbors}};
    j["angle_words"] = c.angle_words ? ordered_json(*c.angle_words) : ordered_json(nullptr);
    j["seeds"] = c.seeds;
    j["zero_rhs_theta"] = c.zero_rhs_theta;
    return j.dump(2) + "\n";
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
    const auto started = std::chrono::steady_clock::now();
    try {
        config.validate();

        std::vector<std::pair<BaseSentence, double>> entries;
        for (const auto& s : config.sentences) entries.emplace_back(BaseSentence(s.text), s.weight);
        const Corpus corpus =
            sample_corpus(CorpusSpec{SentenceDistribution(std::move(entries)), config.num_sentences, config.corpus_seed});

        ExperimentReport report;
        report.config = config;
        report.vocabulary = corpus.vocabulary;
        report.corpus_length = corpus.size();
        for (const auto& r : config.relations) report.relations.push_back(parse_relation(r));
        const VerifyThresholds thresholds{config.zero_rhs_theta};

        for (std::uint64_t seed : config.effective_seeds()) {
            TrainingConfig training = config.training;
            training.seed = seed;
            SeedRun run;
            run.seed = seed;
            run.model = train(corpus, training);
            for (const auto& rel : report.relations) run.verifications.push_back(verify_relation(run.model, rel, thresholds));
            report.runs.push_back(std::move(run));
        }

        for (std::size_t r = 0; r < report.relations.size(); ++r) {
            std::size_t solved = 0;
            for (const auto& run : report.runs) solved += run.verifications[r].solved ? 1 : 0;
            report.solved_fraction.push_back(static_cast<double>(solved) / static_cast<double>(report.runs.size()));
        }

        if (config.analyses.partition) report.partition = context_partition(corpus, config.training.window);
        if (config.analyses.overlap) report.overlap = context_overlap(corpus, config.training.window);
        const EmbeddingModel& first = report.runs.front().model;
        if (config.analyses.angles) {
            AngleTable table;
            table.words = config.angle_words ? *config.angle_words : corpus.vocabulary.tokens();
            table.degrees = pairwise_angles(first, table.words);
            report.angles = std::move(table);
        }
        if (config.analyses.neighbors) {
            std::vector<WordNeighbors> all;
            for (const auto& word : corpus.vocabulary.tokens()) {
                all.push_back({word, nearest_neighbors(first, first.vec(word), Metric::Euclidean, {word})});
            }
            report.neighbors = std::move(all);
        }

        report.duration_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        return report;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw std::runtime_error("experiment '" + config.name + "': " + e.what());
    }
}

Figure parse_figure(std::string_view text) {
    if (text == "fig2") return Figure::Fig2;
    if (text == "fig3") return Figure::Fig3;
    if (text == "fig4") return Figure::Fig4;
    if (text == "sec2b") return Figure::Sec2b;
    throw std::invalid_argument("unknown figure \"" + std::string(text) + "\" (expected fig2, fig3, fig4 or sec2b)");
}

std::string_view to_string(Figure figure) {
    switch (figure) {
        case Figure::Fig2: return "fig2";
        case Figure::Fig3: return "fig3";
        case Figure::Fig4: return "fig4";
        case Figure::Sec2b: return "sec2b";
    }
    return "";
}

std::vector<ExperimentConfig> figure_configs(Figure figure) {
    std::vector<ExperimentConfig> out;
    switch (figure) {
        case Figure::Fig2:
            for (std::size_t n : {1000u, 10000u, 100000u}) {
                out.push_back(presets::royalty(n, 0.5));
                out.back().name = "fig2-n" + std::to_string(n);
            }
            break;
        case Figure::Fig3:
            for (std::size_t n : {1000u, 10000u, 100000u}) {
                out.push_back(presets::capital(n));
                out.back().name = "fig3-n" + std::to_string(n);
            }
            break;
        case Figure::Fig4: {
            const std::pair<double, const char*> probabilities[] = {{0.002, "0.002"}, {0.005, "0.005"}, {0.01, "0.01"}};
            for (const auto& [p, label] : probabilities) {
                out.push_back(presets::royalty(10000, p));
                out.back().name = std::string("fig4-p") + label;
            }
            break;
        }
        case Figure::Sec2b:
            for (std::size_t window : {1u, 2u, 3u}) {
                out.push_back(presets::single_sentence(10000, window));
                out.back().name = "sec2b-w" + std::to_string(window);
            }
            break;
    }
    return out;
}

std::vector<ExperimentReport> replicate_figure(Figure figure) {
    std::vector<ExperimentReport> reports;
    for (const auto& config : figure_configs(figure)) reports.push_back(run_experiment(config));
    return reports;
}

namespace presets {

std::vector<std::uint64_t> default_seeds() { return {1, 2, 3, 4, 5}; }

ExperimentConfig royalty(std::size_t num_sentences, double p) {
    ExperimentConfig c;
    c.name = "royalty";
    c.sentences = {{std::string(kSentenceI), p}, {std::string(kSentenceII), 1.0 - p}};
    c.num_sentences = num_sentences;
    c.corpus_seed = kCorpusSeed;
    c.relations = {std::string(kRoyaltyRelation)};
    c.analyses.angles = true;
    c.analyses.neighbors = true;
    c.angle_words = std::vector<std::string>{"king", "queen", "man", "woman"};
    c.seeds = default_seeds();
    return c;
}

ExperimentConfig capital(std::size_t num_sentences) {
    ExperimentConfig c;
    c.name = "capital";
    c.sentences = {{std::string(kSentenceIII), 1.0}, {std::string(kSentenceIV), 1.0}, {std::string(kSentenceV), 1.0}};
    c.num_sentences = num_sentences;
    c.corpus_seed = kCorpusSeed;
    c.relations = {std::string(kCapitalRelation)};
    c.analyses.neighbors = true;
    c.seeds = default_seeds();
    return c;
}

ExperimentConfig single_sentence(std::size_t copies, std::size_t window) {
    ExperimentConfig c;
    c.name = "single-sentence";
    c.sentences = {{std::string(kSentenceIII), 1.0}};
    c.num_sentences = copies;
    c.corpus_seed = kCorpusSeed;
    c.training.window = window;
    c.analyses = {true, true, true, false};
    c.angle_words = std::vector<std::string>{"berlin", "capital", "is", "of", "the", "germany"};
    c.seeds = default_seeds();
    return c;
}

}  // namespace presets

}  // namespace corpusrep
