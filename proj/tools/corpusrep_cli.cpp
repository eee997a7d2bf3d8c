// corpusrep: build synthetic corpora, train 2-D skip-gram embeddings on them
// and check whether the target word relations come out.
//
//   corpusrep run presets/royalty.json --out-dir out
//   corpusrep replicate fig2 --format csv
//   corpusrep parse-relation "king - man ~= queen - woman"
//
// Exit codes: 0 success, 1 validation error, 2 runtime error.

#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "corpusrep/emit.hpp"
#include "corpusrep/experiment.hpp"
#include "corpusrep/relation.hpp"

namespace fs = std::filesystem;
using namespace corpusrep;

namespace {

struct OutputOptions {
    std::string out_dir = "out";
    std::string format = "all";
    bool arrows = false;
};

void emit(const ExperimentReport& report, const OutputOptions& opts) {
    const fs::path dir(opts.out_dir);
    fs::create_directories(dir);
    const bool all = opts.format == "all";
    const std::string& name = report.config.name;
    if (all || opts.format == "csv") emit_vectors_csv(report, dir / (name + ".vectors.csv"));
    if (all || opts.format == "json") emit_report_json(report, dir / (name + ".report.json"));
    if ((all || opts.format == "svg") && report.runs.front().model.dim() == 2) {
        ScatterOptions scatter;
        scatter.arrows = opts.arrows;
        for (std::size_t i = 0; i < report.runs.size(); ++i) {
            emit_scatter_svg(report, i, dir / (name + ".seed" + std::to_string(report.runs[i].seed) + ".svg"), scatter);
        }
    } else if (opts.format == "svg") {
        throw std::invalid_argument("--format svg needs dim=2 models; retrain with training.dim = 2");
    }
}

void summarize(const ExperimentReport& report) {
    std::cout << report.config.name << ": " << report.corpus_length << " tokens, " << report.vocabulary.size()
              << " words, " << report.runs.size() << " seed(s), " << std::fixed << std::setprecision(2)
              << report.duration_seconds << " s\n";
    for (std::size_t r = 0; r < report.relations.size(); ++r) {
        std::cout << "  " << unparse(report.relations[r]) << "  solved in " << std::setprecision(0)
                  << report.solved_fraction[r] * static_cast<double>(report.runs.size()) << "/" << report.runs.size()
                  << " seeds\n";
    }
    if (report.partition) {
        std::cout << "  partition:";
        for (const auto& group : *report.partition) {
            std::cout << " {";
            for (std::size_t i = 0; i < group.size(); ++i) std::cout << (i ? ", " : "") << group[i];
            std::cout << "}";
        }
        std::cout << "\n";
    }
    std::cout.unsetf(std::ios::fixed);
    std::cout << std::setprecision(6);
}

void apply_seed(ExperimentConfig& config, const std::optional<std::uint64_t>& seed) {
    if (seed) {
        config.seeds = {*seed};
        config.training.seed = *seed;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Synthetic corpora for skip-gram word relations"};
    app.require_subcommand(1);

    OutputOptions output;
    std::optional<std::uint64_t> seed;
    auto add_output_flags = [&](CLI::App* cmd) {
        cmd->add_option("--out-dir", output.out_dir, "Directory for emitted files")->capture_default_str();
        cmd->add_option("--seed", seed, "Train with this single seed instead of the configured list");
        cmd->add_option("--format", output.format, "Which artifacts to write")
            ->check(CLI::IsMember({"csv", "svg", "json", "all"}))
            ->capture_default_str();
        cmd->add_flag("--arrows", output.arrows, "Draw arrows from the origin in scatter plots");
    };

    std::string config_path;
    auto* run = app.add_subcommand("run", "Run the experiment described by a JSON config");
    run->add_option("config", config_path, "Experiment config file")->required();
    add_output_flags(run);

    std::string figure_name;
    auto* replicate = app.add_subcommand("replicate", "Run a canned figure replication");
    replicate->add_option("figure", figure_name, "fig2, fig3, fig4 or sec2b")
        ->required()
        ->check(CLI::IsMember({"fig2", "fig3", "fig4", "sec2b"}));
    add_output_flags(replicate);

    std::string relation_text;
    auto* parse = app.add_subcommand("parse-relation", "Parse and normalize a relation");
    parse->add_option("relation", relation_text, "e.g. \"germany + capital ~= berlin\"")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*parse) {
            const Relation rel = parse_relation(relation_text);
            std::cout << unparse(rel) << "\n";
            for (const auto& t : rel.lhs) std::cout << "  lhs " << (t.sign > 0 ? '+' : '-') << t.word << "\n";
            std::cout << "  rhs " << (rel.rhs ? *rel.rhs : std::string("0")) << "\n";
            return 0;
        }

        std::vector<ExperimentConfig> configs;
        if (*run) {
            configs.push_back(load_config(config_path));
        } else {
            configs = figure_configs(parse_figure(figure_name));
        }
        for (auto& config : configs) {
            apply_seed(config, seed);
            const ExperimentReport report = run_experiment(config);
            summarize(report);
            emit(report, output);
        }
        return 0;
    } catch (const RelationSyntaxError& e) {
        std::cerr << "error: " << e.what() << "\n  " << relation_text << "\n  "
                  << std::string(std::min(e.position(), relation_text.size()), ' ') << "^\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
