#include "corpusrep/skipgram.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace corpusrep {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// log(sigmoid(x)) without overflow for large |x|.
double log_sigmoid(double x) {
    if (x >= 0.0) return -std::log1p(std::exp(-x));
    return x - std::log1p(std::exp(x));
}

// In-place softmax of `logits`; returns log of the partition function.
double softmax_inplace(std::vector<double>& logits) {
    const double peak = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    for (double& l : logits) {
        l = std::exp(l - peak);
        z += l;
    }
    for (double& l : logits) l /= z;
    return peak + std::log(z);
}

void check_id(const EmbeddingModel& model, TokenId id) {
    if (id >= model.input_vectors.rows()) {
        throw std::out_of_range("token id " + std::to_string(id) + " outside vocabulary of size " +
                                std::to_string(model.input_vectors.rows()));
    }
}

void validate_noise(const EmbeddingModel& model, std::span<const TokenId> noise) {
    const std::size_t vocab = model.vocabulary.size();
    if (noise.size() >= vocab) {
        throw std::invalid_argument("negative sampling needs k < V (k=" + std::to_string(noise.size()) +
                                    ", V=" + std::to_string(vocab) + ")");
    }
    if (noise.empty()) throw std::invalid_argument("negative sampling needs at least one noise id");
    for (TokenId id : noise) check_id(model, id);
}

}  // namespace

bool Matrix::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

std::string_view to_string(Objective objective) {
    return objective == Objective::FullSoftmax ? "full-softmax" : "negative-sampling";
}

Objective parse_objective(std::string_view text) {
    if (text == "full-softmax") return Objective::FullSoftmax;
    if (text == "negative-sampling") return Objective::NegativeSampling;
    throw std::invalid_argument("objective must be \"full-softmax\" or \"negative-sampling\", got \"" +
                                std::string(text) + "\"");
}

void TrainingConfig::validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument(msg); };
    if (dim < 1) fail("dim must be >= 1");
    if (window < 1) fail("window must be >= 1");
    if (epochs < 1) fail("epochs must be >= 1");
    if (!(initial_lr > 0.0) || !std::isfinite(initial_lr)) fail("initial_lr must be positive");
    if (!(final_lr >= 0.0)) fail("final_lr must be non-negative");
    if (final_lr > initial_lr) fail("final_lr must not exceed initial_lr");
    if (negative_samples < 1) fail("negative_samples must be >= 1");
    if (subsample_threshold && !(*subsample_threshold > 0.0)) fail("subsample_threshold must be positive");
}

EmbeddingModel zero_model(const Vocabulary& vocabulary, std::size_t dim) {
    EmbeddingModel model;
    model.input_vectors = Matrix(vocabulary.size(), dim);
    model.output_vectors = Matrix(vocabulary.size(), dim);
    model.vocabulary = vocabulary;
    model.config_echo.dim = dim;
    return model;
}

EmbeddingModel random_model(const Vocabulary& vocabulary, std::size_t dim, double scale,
                            std::uint64_t seed) {
    EmbeddingModel model = zero_model(vocabulary, dim);
    Rng rng(seed);
    for (std::size_t r = 0; r < vocabulary.size(); ++r) {
        for (double& x : model.input_vectors.row(r)) x = rng.uniform(-scale, scale);
        for (double& x : model.output_vectors.row(r)) x = rng.uniform(-scale, scale);
    }
    return model;
}

std::vector<TrainingPair> training_pairs(std::span<const TokenId> tokens, std::size_t window,
                                         bool dynamic, std::uint64_t seed) {
    if (window < 1) throw std::invalid_argument("window must be >= 1");
    if (tokens.size() < 2) {
        throw std::invalid_argument("corpus of length " + std::to_string(tokens.size()) +
                                    " yields no training pairs");
    }
    std::vector<TrainingPair> pairs;
    pairs.reserve(tokens.size() * 2 * window);
    Rng rng(seed);
    const std::size_t len = tokens.size();
    for (std::size_t t = 0; t < len; ++t) {
        const std::size_t reach = dynamic ? 1 + rng.below(window) : window;
        const std::size_t lo = t >= reach ? t - reach : 0;
        const std::size_t hi = std::min(len - 1, t + reach);
        for (std::size_t c = lo; c <= hi; ++c) {
            if (c != t) pairs.push_back({tokens[t], tokens[c]});
        }
    }
    return pairs;
}

std::vector<TrainingPair> training_pairs(const Corpus& corpus, std::size_t window, bool dynamic,
                                         std::uint64_t seed) {
    return training_pairs(std::span<const TokenId>(corpus.tokens), window, dynamic, seed);
}

std::vector<double> forward_softmax(const EmbeddingModel& model, TokenId center) {
    check_id(model, center);
    const auto v = model.input_vectors.row(center);
    std::vector<double> logits(model.output_vectors.rows());
    for (std::size_t w = 0; w < logits.size(); ++w) logits[w] = dot(model.output_vectors.row(w), v);
    softmax_inplace(logits);
    return logits;
}

double pair_nll(const EmbeddingModel& model, const TrainingPair& pair) {
    check_id(model, pair.center);
    check_id(model, pair.context);
    const auto v = model.input_vectors.row(pair.center);
    std::vector<double> logits(model.output_vectors.rows());
    for (std::size_t w = 0; w < logits.size(); ++w) logits[w] = dot(model.output_vectors.row(w), v);
    const double target = logits[pair.context];
    const double log_z = softmax_inplace(logits);
    return log_z - target;
}

double nll_loss(const EmbeddingModel& model, std::span<const TrainingPair> pairs) {
    if (pairs.empty()) throw std::invalid_argument("nll_loss needs at least one pair");
    double total = 0.0;
    for (const auto& p : pairs) total += pair_nll(model, p);
    return total / static_cast<double>(pairs.size());
}

double negative_sampling_loss(const EmbeddingModel& model, const TrainingPair& pair,
                              std::span<const TokenId> noise) {
    check_id(model, pair.center);
    check_id(model, pair.context);
    validate_noise(model, noise);
    const auto v = model.input_vectors.row(pair.center);
    double loss = -log_sigmoid(dot(model.output_vectors.row(pair.context), v));
    for (TokenId n : noise) loss -= log_sigmoid(-dot(model.output_vectors.row(n), v));
    return loss;
}

PairGradient pair_gradient(const EmbeddingModel& model, const TrainingPair& pair,
                           Objective objective, std::span<const TokenId> noise) {
    check_id(model, pair.center);
    check_id(model, pair.context);
    const std::size_t dim = model.dim();
    const auto v = model.input_vectors.row(pair.center);

    PairGradient g;
    g.input.assign(dim, 0.0);

    // Each touched output row u_w contributes coef * v to its own gradient and
    // coef * u_w to the input gradient.
    auto touch = [&](TokenId w, double coef) {
        const auto u = model.output_vectors.row(w);
        for (std::size_t d = 0; d < dim; ++d) g.input[d] += coef * u[d];
        auto it = std::find_if(g.output.begin(), g.output.end(),
                               [w](const OutputRowGradient& r) { return r.row == w; });
        if (it == g.output.end()) {
            g.output.push_back({w, std::vector<double>(dim, 0.0)});
            it = std::prev(g.output.end());
        }
        for (std::size_t d = 0; d < dim; ++d) it->grad[d] += coef * v[d];
    };

    if (objective == Objective::FullSoftmax) {
        std::vector<double> probs(model.output_vectors.rows());
        for (std::size_t w = 0; w < probs.size(); ++w) probs[w] = dot(model.output_vectors.row(w), v);
        const double target = probs[pair.context];
        g.loss = softmax_inplace(probs) - target;
        g.output.reserve(probs.size());
        for (std::size_t w = 0; w < probs.size(); ++w) {
            touch(static_cast<TokenId>(w), probs[w] - (w == pair.context ? 1.0 : 0.0));
        }
    } else {
        validate_noise(model, noise);
        const double pos = dot(model.output_vectors.row(pair.context), v);
        g.loss = -log_sigmoid(pos);
        touch(pair.context, sigmoid(pos) - 1.0);
        for (TokenId n : noise) {
            const double neg = dot(model.output_vectors.row(n), v);
            g.loss -= log_sigmoid(-neg);
            touch(n, sigmoid(neg));
        }
    }
    return g;
}

NoiseSampler::NoiseSampler(const Vocabulary& vocabulary, double power) {
    cumulative_.reserve(vocabulary.size());
    double running = 0.0;
    for (auto c : vocabulary.counts()) {
        running += std::pow(static_cast<double>(c), power);
        cumulative_.push_back(running);
    }
    if (!(running > 0.0)) throw std::invalid_argument("noise distribution needs non-zero counts");
    for (double& c : cumulative_) c /= running;
}

std::vector<TokenId> NoiseSampler::draw(Rng& rng, std::size_t k, TokenId positive) const {
    if (k >= cumulative_.size()) {
        throw std::invalid_argument("negative sampling needs k < V (k=" + std::to_string(k) +
                                    ", V=" + std::to_string(cumulative_.size()) + ")");
    }
    // Positive id alone carrying all the mass would loop forever.
    const double positive_mass =
        cumulative_[positive] - (positive == 0 ? 0.0 : cumulative_[positive - 1]);
    if (positive_mass >= 1.0) throw std::invalid_argument("noise distribution has no mass off the positive id");

    std::vector<TokenId> out;
    out.reserve(k);
    while (out.size() < k) {
        const double u = rng.uniform();
        auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        if (it == cumulative_.end()) --it;
        const auto id = static_cast<TokenId>(it - cumulative_.begin());
        if (id != positive) out.push_back(id);
    }
    return out;
}

double gradient_check(const EmbeddingModel& model, const TrainingPair& pair, double eps,
                      Objective objective, std::span<const TokenId> noise) {
    if (!(eps > 0.0)) throw std::invalid_argument("gradient_check step must be positive");
    const PairGradient analytic = pair_gradient(model, pair, objective, noise);

    EmbeddingModel probe = model;
    auto loss = [&]() {
        return objective == Objective::FullSoftmax ? pair_nll(probe, pair)
                                                   : negative_sampling_loss(probe, pair, noise);
    };
    auto central = [&](double& x) {
        const double saved = x;
        x = saved + eps;
        const double up = loss();
        x = saved - eps;
        const double down = loss();
        x = saved;
        return (up - down) / (2.0 * eps);
    };
    // Floor on the denominator so coordinates whose true gradient is ~0 are
    // judged on absolute error instead of amplified rounding noise.
    constexpr double kFloor = 1e-6;
    auto rel = [&](double a, double n) {
        if (std::abs(a) < 1e-12 && std::abs(n) < 1e-12) return 0.0;
        return std::abs(a - n) / std::max({std::abs(a), std::abs(n), kFloor});
    };

    double worst = 0.0;
    for (std::size_t d = 0; d < analytic.input.size(); ++d) {
        worst = std::max(worst, rel(analytic.input[d], central(probe.input_vectors(pair.center, d))));
    }
    for (const auto& row : analytic.output) {
        for (std::size_t d = 0; d < row.grad.size(); ++d) {
            worst = std::max(worst, rel(row.grad[d], central(probe.output_vectors(row.row, d))));
        }
    }
    return worst;
}

namespace {

std::vector<TokenId> subsample(std::span<const TokenId> tokens, const Vocabulary& vocab,
                               double threshold, Rng& rng) {
    const auto total = static_cast<double>(tokens.size());
    std::vector<double> keep(vocab.size(), 1.0);
    for (std::size_t id = 0; id < vocab.size(); ++id) {
        const double f = static_cast<double>(vocab.count_of(static_cast<TokenId>(id))) / total;
        if (f > 0.0) keep[id] = std::min(1.0, (std::sqrt(f / threshold) + 1.0) * threshold / f);
    }
    std::vector<TokenId> out;
    out.reserve(tokens.size());
    for (TokenId id : tokens) {
        if (rng.uniform() < keep[id]) out.push_back(id);
    }
    return out;
}

}  // namespace

EmbeddingModel initial_model(const Vocabulary& vocabulary, const TrainingConfig& config) {
    config.validate();
    EmbeddingModel model = zero_model(vocabulary, config.dim);
    model.config_echo = config;
    Rng init(derive_seed(config.seed, 0));
    const double half = 0.5 / static_cast<double>(config.dim);
    for (std::size_t r = 0; r < vocabulary.size(); ++r) {
        for (double& x : model.input_vectors.row(r)) x = init.uniform(-half, half);
    }
    return model;
}

EmbeddingModel train(const Corpus& corpus, const TrainingConfig& config) {
    config.validate();
    const std::size_t vocab = corpus.vocabulary.size();
    const std::size_t dim = config.dim;
    const bool per_epoch_pairs = config.dynamic_window || config.subsample_threshold.has_value();

    EmbeddingModel model = initial_model(corpus.vocabulary, config);

    std::optional<NoiseSampler> noise_sampler;
    if (config.objective == Objective::NegativeSampling) {
        if (config.negative_samples >= vocab) {
            throw std::invalid_argument("negative_samples must be below the vocabulary size " +
                                        std::to_string(vocab));
        }
        noise_sampler.emplace(corpus.vocabulary);
    }
    Rng noise_rng(derive_seed(config.seed, 1));

    std::vector<TrainingPair> pairs;
    if (!per_epoch_pairs) pairs = training_pairs(corpus, config.window, false, 0);

    std::vector<double> scores(vocab);
    std::vector<double> input_grad(dim);
    std::vector<double> v_old(dim);

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        if (per_epoch_pairs) {
            Rng epoch_rng(derive_seed(config.seed, 100 + epoch));
            std::vector<TokenId> stream = corpus.tokens;
            if (config.subsample_threshold) {
                stream = subsample(corpus.tokens, corpus.vocabulary, *config.subsample_threshold, epoch_rng);
            }
            if (stream.size() < 2) stream = corpus.tokens;
            pairs = training_pairs(stream, config.window, config.dynamic_window, epoch_rng.next());
        }

        const double span = static_cast<double>(config.epochs * pairs.size() - 1);
        double epoch_loss = 0.0;
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            const double progress =
                span > 0.0 ? std::min(1.0, static_cast<double>(epoch * pairs.size() + i) / span) : 1.0;
            const double lr = config.initial_lr - (config.initial_lr - config.final_lr) * progress;
            const auto [center, context] = pairs[i];

            auto v = model.input_vectors.row(center);
            std::copy(v.begin(), v.end(), v_old.begin());
            std::fill(input_grad.begin(), input_grad.end(), 0.0);

            auto apply = [&](std::size_t w, double coef) {
                auto u = model.output_vectors.row(w);
                for (std::size_t d = 0; d < dim; ++d) {
                    input_grad[d] += coef * u[d];
                    u[d] -= lr * coef * v_old[d];
                }
            };

            if (config.objective == Objective::FullSoftmax) {
                for (std::size_t w = 0; w < vocab; ++w) scores[w] = dot(model.output_vectors.row(w), v_old);
                const double target = scores[context];
                epoch_loss += softmax_inplace(scores) - target;
                for (std::size_t w = 0; w < vocab; ++w) apply(w, scores[w] - (w == context ? 1.0 : 0.0));
            } else {
                const auto noise = noise_sampler->draw(noise_rng, config.negative_samples, context);
                const double pos = dot(model.output_vectors.row(context), v_old);
                epoch_loss -= log_sigmoid(pos);
                apply(context, sigmoid(pos) - 1.0);
                for (TokenId n : noise) {
                    const double neg = dot(model.output_vectors.row(n), v_old);
                    epoch_loss -= log_sigmoid(-neg);
                    apply(n, sigmoid(neg));
                }
            }
            for (std::size_t d = 0; d < dim; ++d) v[d] -= lr * input_grad[d];
        }
        model.epoch_losses.push_back(epoch_loss / static_cast<double>(pairs.size()));
    }

    if (!model.input_vectors.all_finite() || !model.output_vectors.all_finite()) {
        throw std::runtime_error("training diverged: non-finite embedding values");
    }
    return model;
}

}  // namespace corpusrep
