#include "corpusrep/emit.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace corpusrep {

namespace {

using nlohmann::ordered_json;

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    out.close();
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

// Fixed two-decimal rendering for SVG coordinates; snprintf keeps the C locale.
std::string fixed2(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", value);
    std::string s(buf);
    if (s == "-0.00") s = "0.00";
    return s;
}

std::string xml_escape(std::string_view text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::vector<std::size_t> ids_by_word(const Vocabulary& vocab) {
    std::vector<std::size_t> order(vocab.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return vocab.token_of(static_cast<TokenId>(a)) < vocab.token_of(static_cast<TokenId>(b));
    });
    return order;
}

ordered_json ranking_json(const std::vector<Neighbor>& ranking) {
    ordered_json out = ordered_json::array();
    for (const auto& n : ranking) out.push_back({{"word", n.word}, {"distance", n.distance}});
    return out;
}

ordered_json matrix_json(const Matrix& m) {
    ordered_json out = ordered_json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const auto row = m.row(r);
        out.push_back(std::vector<double>(row.begin(), row.end()));
    }
    return out;
}

template <class T>
ordered_json optional_json(const std::optional<T>& value) {
    return value ? ordered_json(*value) : ordered_json(nullptr);
}

ordered_json verification_json(const Relation& relation, const VerificationResult& v) {
    ordered_json j;
    j["relation"] = unparse(relation);
    j["solved"] = v.solved;
    j["residual_euclidean"] = v.residual_euclidean;
    j["residual_cosine"] = optional_json(v.residual_cosine);
    j["mean_norm"] = v.mean_norm;
    j["relative_residual"] = v.relative_residual;
    j["rhs_rank"] = optional_json(v.rhs_rank);
    j["rhs_rank_cosine"] = optional_json(v.rhs_rank_cosine);
    j["neighbor_ranking"] = ranking_json(v.neighbor_ranking);
    j["cosine_ranking"] = ranking_json(v.cosine_ranking);
    return j;
}

}  // namespace

std::string format_real(double value, int digits) {
    char buf[64];
    const auto result = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, digits);
    return std::string(buf, result.ptr);
}

std::string vectors_csv(const ExperimentReport& report) {
    if (report.runs.empty()) throw std::invalid_argument("report has no seeds to emit");
    const std::size_t dim = report.runs.front().model.dim();
    std::string out = "seed,word";
    for (std::size_t d = 0; d < dim; ++d) out += ",dim" + std::to_string(d);
    out += '\n';

    std::vector<const SeedRun*> runs;
    for (const auto& run : report.runs) runs.push_back(&run);
    std::stable_sort(runs.begin(), runs.end(), [](const SeedRun* a, const SeedRun* b) { return a->seed < b->seed; });
    for (const SeedRun* run : runs) {
        const auto& vocab = run->model.vocabulary;
        for (std::size_t id : ids_by_word(vocab)) {
            out += std::to_string(run->seed) + ',' + vocab.token_of(static_cast<TokenId>(id));
            for (double x : run->model.input_vectors.row(id)) out += ',' + format_real(x, 9);
            out += '\n';
        }
    }
    return out;
}

void emit_vectors_csv(const ExperimentReport& report, const std::filesystem::path& path) {
    write_file(path, vectors_csv(report));
}

std::string scatter_svg(const ExperimentReport& report, std::size_t seed_index, const ScatterOptions& options) {
    if (seed_index >= report.runs.size()) {
        throw std::out_of_range("seed index " + std::to_string(seed_index) + " out of range (report has " +
                                std::to_string(report.runs.size()) + " seeds)");
    }
    const SeedRun& run = report.runs[seed_index];
    const EmbeddingModel& model = run.model;
    if (model.dim() != 2) {
        throw std::invalid_argument("scatter plots need 2-D vectors but the model has dim=" +
                                    std::to_string(model.dim()) +
                                    "; retrain with dim=2 or project the vectors to two dimensions first");
    }

    // Bounding box of the data and the origin, padded 10% on every side.
    double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;
    for (std::size_t r = 0; r < model.input_vectors.rows(); ++r) {
        xmin = std::min(xmin, model.input_vectors(r, 0));
        xmax = std::max(xmax, model.input_vectors(r, 0));
        ymin = std::min(ymin, model.input_vectors(r, 1));
        ymax = std::max(ymax, model.input_vectors(r, 1));
    }
    const double rx = xmax - xmin > 0.0 ? xmax - xmin : 1.0;
    const double ry = ymax - ymin > 0.0 ? ymax - ymin : 1.0;
    xmin -= 0.1 * rx;
    xmax += 0.1 * rx;
    ymin -= 0.1 * ry;
    ymax += 0.1 * ry;

    const double w = options.width, h = options.height;
    const double scale = std::min(w / (xmax - xmin), h / (ymax - ymin));
    const double ox = (w - (xmax - xmin) * scale) / 2.0;
    const double oy = (h - (ymax - ymin) * scale) / 2.0;
    auto px = [&](double x) { return ox + (x - xmin) * scale; };
    auto py = [&](double y) { return h - (oy + (y - ymin) * scale); };

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed2(w) + "\" height=\"" + fixed2(h) +
           "\" viewBox=\"0 0 " + fixed2(w) + " " + fixed2(h) + "\">\n";
    svg += "<title>" + xml_escape(report.config.name) + " seed " + std::to_string(run.seed) + "</title>\n";
    if (options.arrows) {
        svg += "<defs><marker id=\"arrow\" viewBox=\"0 0 10 10\" refX=\"9\" refY=\"5\" markerWidth=\"6\" "
               "markerHeight=\"6\" orient=\"auto\"><path d=\"M0,0 L10,5 L0,10 z\" fill=\"#4a6fa5\"/></marker></defs>\n";
    }
    svg += "<rect x=\"0\" y=\"0\" width=\"" + fixed2(w) + "\" height=\"" + fixed2(h) + "\" fill=\"white\"/>\n";
    svg += "<g class=\"axes\" stroke=\"#999999\" stroke-width=\"1\">\n";
    svg += "<line x1=\"0.00\" y1=\"" + fixed2(py(0.0)) + "\" x2=\"" + fixed2(w) + "\" y2=\"" + fixed2(py(0.0)) + "\"/>\n";
    svg += "<line x1=\"" + fixed2(px(0.0)) + "\" y1=\"0.00\" x2=\"" + fixed2(px(0.0)) + "\" y2=\"" + fixed2(h) + "\"/>\n";
    svg += "</g>\n";

    const std::string origin_x = fixed2(px(0.0)), origin_y = fixed2(py(0.0));
    for (std::size_t id : ids_by_word(model.vocabulary)) {
        const std::string word = xml_escape(model.vocabulary.token_of(static_cast<TokenId>(id)));
        const std::string cx = fixed2(px(model.input_vectors(id, 0)));
        const std::string cy = fixed2(py(model.input_vectors(id, 1)));
        svg += "<g class=\"word\" id=\"w-" + word + "\">\n";
        if (options.arrows) {
            svg += "<line x1=\"" + origin_x + "\" y1=\"" + origin_y + "\" x2=\"" + cx + "\" y2=\"" + cy +
                   "\" stroke=\"#4a6fa5\" stroke-width=\"1\" marker-end=\"url(#arrow)\"/>\n";
        }
        svg += "<circle cx=\"" + cx + "\" cy=\"" + cy + "\" r=\"3\" fill=\"#c0392b\"/>\n";
        svg += "<text x=\"" + fixed2(px(model.input_vectors(id, 0)) + 5.0) + "\" y=\"" +
               fixed2(py(model.input_vectors(id, 1)) - 5.0) +
               "\" font-family=\"sans-serif\" font-size=\"12\">" + word + "</text>\n";
        svg += "</g>\n";
    }
    svg += "</svg>\n";
    return svg;
}

void emit_scatter_svg(const ExperimentReport& report, std::size_t seed_index, const std::filesystem::path& path,
                      const ScatterOptions& options) {
    write_file(path, scatter_svg(report, seed_index, options));
}

ordered_json report_to_json(const ExperimentReport& report) {
    ordered_json j;
    j["name"] = report.config.name;
    j["config"] = ordered_json::parse(config_to_json_text(report.config));
    j["corpus_length"] = report.corpus_length;

    ordered_json vocab = ordered_json::array();
    for (std::size_t id = 0; id < report.vocabulary.size(); ++id) {
        vocab.push_back({{"id", id},
                         {"word", report.vocabulary.token_of(static_cast<TokenId>(id))},
                         {"count", report.vocabulary.count_of(static_cast<TokenId>(id))}});
    }
    j["vocabulary"] = std::move(vocab);

    ordered_json relations = ordered_json::array();
    for (std::size_t r = 0; r < report.relations.size(); ++r) {
        const auto& rel = report.relations[r];
        ordered_json lhs = ordered_json::array();
        for (const auto& t : rel.lhs) lhs.push_back({{"sign", t.sign}, {"word", t.word}});
        relations.push_back({{"text", unparse(rel)},
                             {"lhs", std::move(lhs)},
                             {"rhs", optional_json(rel.rhs)},
                             {"solved_fraction", report.solved_fraction.at(r)}});
    }
    j["relations"] = std::move(relations);

    ordered_json seeds = ordered_json::array();
    for (const auto& run : report.runs) {
        ordered_json s;
        s["seed"] = run.seed;
        s["epoch_losses"] = run.model.epoch_losses;
        ordered_json vectors;
        for (std::size_t id = 0; id < run.model.vocabulary.size(); ++id) {
            const auto row = run.model.input_vectors.row(id);
            vectors[run.model.vocabulary.token_of(static_cast<TokenId>(id))] = std::vector<double>(row.begin(), row.end());
        }
        s["input_vectors"] = std::move(vectors);
        ordered_json verifications = ordered_json::array();
        for (std::size_t r = 0; r < run.verifications.size(); ++r) {
            verifications.push_back(verification_json(report.relations.at(r), run.verifications[r]));
        }
        s["verifications"] = std::move(verifications);
        seeds.push_back(std::move(s));
    }
    j["seeds"] = std::move(seeds);

    j["partition"] = report.partition ? ordered_json(*report.partition) : ordered_json(nullptr);
    if (report.overlap) {
        j["overlap"] = {{"words", report.overlap->words},
                        {"jaccard", matrix_json(report.overlap->jaccard)},
                        {"empty_context_words", report.overlap->empty_context_words}};
    } else {
        j["overlap"] = nullptr;
    }
    if (report.angles) {
        j["angles"] = {{"words", report.angles->words}, {"degrees", matrix_json(report.angles->degrees)}};
    } else {
        j["angles"] = nullptr;
    }
    if (report.neighbors) {
        ordered_json all = ordered_json::array();
        for (const auto& n : *report.neighbors) all.push_back({{"word", n.word}, {"ranking", ranking_json(n.ranking)}});
        j["neighbors"] = std::move(all);
    } else {
        j["neighbors"] = nullptr;
    }
    return j;
}

void emit_report_json(const ExperimentReport& report, const std::filesystem::path& path) {
    write_file(path, report_to_json(report).dump(2) + "\n");
}

}  // namespace corpusrep
