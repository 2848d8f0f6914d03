#include "opa2vec/embed.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <ostream>
#include <thread>

namespace opa2vec {

void TrainingConfig::validate() const {
    if (size <= 0) throw ConfigError("embedding size must be > 0");
    if (window < 1) throw ConfigError("window must be >= 1");
    if (negative < 0) throw ConfigError("negative must be >= 0");
    if (iter < 1) throw ConfigError("iter must be >= 1");
    if (!(alpha > 0.0)) throw ConfigError("alpha must be > 0");
    if (workers < 1) throw ConfigError("workers must be >= 1");
}

namespace {

std::map<std::string, std::uint64_t> count_tokens(const Corpus& corpus) {
    std::map<std::string, std::uint64_t> counts;
    for (const auto& s : corpus.sentences)
        for (const auto& t : s.tokens) ++counts[t];
    return counts;
}

struct CountedToken {
    std::string token;
    std::uint64_t count;
};

void sort_by_frequency(std::vector<CountedToken>& v) {
    std::sort(v.begin(), v.end(), [](const CountedToken& a, const CountedToken& b) {
        if (a.count != b.count) return a.count > b.count;
        return a.token < b.token;
    });
}

} // namespace

void Vocabulary::push(std::string token, std::uint64_t count) {
    index_.emplace(token, tokens_.size());
    tokens_.push_back(std::move(token));
    counts_.push_back(count);
}

void Vocabulary::finish() {
    noise_items_.clear();
    noise_cdf_.clear();
    double cum = 0.0;
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
        if (counts_[i] == 0) continue;
        cum += std::pow(static_cast<double>(counts_[i]), 0.75);
        noise_items_.push_back(i);
        noise_cdf_.push_back(cum);
    }
}

Vocabulary Vocabulary::build(const Corpus& corpus, int min_count) {
    std::vector<CountedToken> kept;
    for (auto& [token, count] : count_tokens(corpus))
        if (count >= static_cast<std::uint64_t>(std::max(min_count, 1)))
            kept.push_back({token, count});
    if (kept.empty()) throw EmptyVocabulary();
    sort_by_frequency(kept);

    Vocabulary vocab;
    for (auto& ct : kept) vocab.push(std::move(ct.token), ct.count);
    vocab.finish();
    return vocab;
}

Vocabulary Vocabulary::extend(const Vocabulary& base, const Corpus& corpus, int min_count) {
    auto counts = count_tokens(corpus);

    Vocabulary vocab;
    for (std::size_t i = 0; i < base.size(); ++i) {
        auto it = counts.find(base.token_at(i));
        vocab.push(base.token_at(i), it == counts.end() ? 0 : it->second);
    }
    std::vector<CountedToken> fresh;
    for (auto& [token, count] : counts)
        if (!base.index_of(token) && count >= static_cast<std::uint64_t>(std::max(min_count, 1)))
            fresh.push_back({token, count});
    sort_by_frequency(fresh);
    for (auto& ct : fresh) vocab.push(std::move(ct.token), ct.count);
    if (vocab.size() == 0) throw EmptyVocabulary();
    vocab.finish();
    return vocab;
}

std::optional<std::size_t> Vocabulary::index_of(std::string_view token) const {
    auto it = index_.find(std::string(token));
    return it == index_.end() ? std::nullopt : std::optional<std::size_t>(it->second);
}

std::size_t Vocabulary::sample_noise(Rng& rng) const {
    double u = rng.next_unit() * noise_cdf_.back();
    auto it = std::lower_bound(noise_cdf_.begin(), noise_cdf_.end(), u);
    std::size_t slot = static_cast<std::size_t>(it - noise_cdf_.begin());
    if (slot >= noise_items_.size()) slot = noise_items_.size() - 1;
    return noise_items_[slot];
}

std::span<const double> EmbeddingModel::vector_of(std::string_view token) const {
    auto idx = vocab.index_of(token);
    if (!idx) throw UnknownToken(std::string(token));
    return input_vectors.row(*idx);
}

bool EmbeddingModel::same_weights(const EmbeddingModel& other) const {
    auto same = [](const Matrix& a, const Matrix& b) {
        return a.rows() == b.rows() && a.cols() == b.cols() &&
               std::memcmp(a.data().data(), b.data().data(),
                           a.data().size() * sizeof(double)) == 0;
    };
    return vocab == other.vocab && same(input_vectors, other.input_vectors) &&
           same(output_vectors, other.output_vectors);
}

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// -log s(x) computed stably
inline double softplus_neg(double x) {
    return x > 0.0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x));
}

} // namespace

SgnsGradient sgns_gradient(const Matrix& input, const Matrix& output, std::size_t center,
                           std::size_t positive, std::span<const std::size_t> negatives) {
    const std::size_t dim = input.cols();
    SgnsGradient g;
    g.center.assign(dim, 0.0);
    g.targets.reserve(1 + negatives.size());

    auto v_w = input.row(center);
    auto accumulate = [&](std::size_t target, bool is_positive) {
        auto v_t = output.row(target);
        double d = dot(v_t, v_w);
        double s = sigmoid(d);
        double coeff = is_positive ? s - 1.0 : s; // d loss / d (v_t . v_w)
        g.loss += is_positive ? softplus_neg(d) : softplus_neg(-d);
        std::vector<double> gt(dim);
        for (std::size_t j = 0; j < dim; ++j) {
            gt[j] = coeff * v_w[j];
            g.center[j] += coeff * v_t[j];
        }
        g.targets.push_back(std::move(gt));
    };

    accumulate(positive, true);
    for (std::size_t n : negatives) accumulate(n, false);
    return g;
}

double sgns_loss(const Matrix& input, const Matrix& output, std::size_t center,
                 std::size_t positive, std::span<const std::size_t> negatives) {
    auto v_w = input.row(center);
    double loss = softplus_neg(dot(output.row(positive), v_w));
    for (std::size_t n : negatives) loss += softplus_neg(-dot(output.row(n), v_w));
    return loss;
}

namespace {

// Applies one SGD step for a (center, context) pair; returns the pair loss.
// Center gradient is accumulated against pre-update output rows.
double train_pair(Matrix& input, Matrix& output, std::size_t center, std::size_t positive,
                  std::span<const std::size_t> negatives, double lr,
                  std::vector<double>& center_grad) {
    const std::size_t dim = input.cols();
    auto v_w = input.row(center);
    center_grad.assign(dim, 0.0);
    double loss = 0.0;

    auto step_target = [&](std::size_t target, bool is_positive) {
        auto v_t = output.row(target);
        double d = dot(v_t, v_w);
        double s = sigmoid(d);
        double coeff = is_positive ? s - 1.0 : s;
        loss += is_positive ? softplus_neg(d) : softplus_neg(-d);
        for (std::size_t j = 0; j < dim; ++j) {
            center_grad[j] += coeff * v_t[j];
            v_t[j] -= lr * coeff * v_w[j];
        }
    };

    step_target(positive, true);
    for (std::size_t n : negatives) step_target(n, false);
    for (std::size_t j = 0; j < dim; ++j) v_w[j] -= lr * center_grad[j];
    return loss;
}

std::vector<std::vector<std::size_t>> encode_corpus(const Corpus& corpus, const Vocabulary& vocab) {
    std::vector<std::vector<std::size_t>> encoded;
    encoded.reserve(corpus.sentences.size());
    for (const auto& s : corpus.sentences) {
        std::vector<std::size_t> ids;
        ids.reserve(s.tokens.size());
        for (const auto& t : s.tokens)
            if (auto idx = vocab.index_of(t)) ids.push_back(*idx);
        if (!ids.empty()) encoded.push_back(std::move(ids));
    }
    return encoded;
}

struct EpochStats {
    double loss_sum = 0.0;
    std::uint64_t pairs = 0;
};

void train_sentences(std::span<const std::vector<std::size_t>> sentences, Matrix& input,
                     Matrix& output, const Vocabulary& vocab, const TrainingConfig& cfg,
                     Rng& rng, std::atomic<std::uint64_t>& processed, std::uint64_t words_budget,
                     EpochStats& stats, std::vector<double>& scratch,
                     std::vector<std::size_t>& negatives) {
    const std::uint64_t window = static_cast<std::uint64_t>(cfg.window);
    for (const auto& sent : sentences) {
        for (std::size_t pos = 0; pos < sent.size(); ++pos) {
            std::uint64_t done = processed.fetch_add(1, std::memory_order_relaxed);
            double remaining = 1.0 - static_cast<double>(done) / static_cast<double>(words_budget + 1);
            double lr = cfg.alpha * std::max(remaining, 1e-4);

            std::size_t w = sent[pos];
            std::uint64_t span = 1 + rng.next_below(window);
            std::size_t lo = pos > span ? pos - span : 0;
            std::size_t hi = std::min(sent.size() - 1, pos + span);
            for (std::size_t q = lo; q <= hi; ++q) {
                if (q == pos) continue;
                std::size_t c = sent[q];
                negatives.clear();
                if (vocab.can_sample_noise()) {
                    for (int k = 0; k < cfg.negative; ++k) {
                        std::size_t n = vocab.sample_noise(rng);
                        if (n == c) continue; // skip draws that hit the positive target
                        negatives.push_back(n);
                    }
                }
                stats.loss_sum += train_pair(input, output, w, c, negatives, lr, scratch);
                ++stats.pairs;
            }
        }
    }
}

} // namespace

EmbeddingModel train(const Corpus& corpus, TrainingConfig config, const EmbeddingModel* init) {
    config.validate();
    if (!config.skip_gram)
        throw NotImplemented("CBOW (sg=0) is not implemented; this trainer is skip-gram only");
    if (init && init->config.size != config.size)
        throw ConfigMismatch("embedding size " + std::to_string(config.size) +
                             " does not match the initial model size " +
                             std::to_string(init->config.size));

    EmbeddingModel model;
    model.config = config;
    model.vocab = init ? Vocabulary::extend(init->vocab, corpus, config.min_count)
                       : Vocabulary::build(corpus, config.min_count);

    const std::size_t vsize = model.vocab.size();
    const std::size_t dim = static_cast<std::size_t>(config.size);
    const std::size_t carried = init ? init->vocab.size() : 0;

    model.input_vectors = Matrix(vsize, dim);
    model.output_vectors = Matrix(vsize, dim, 0.0);

    Rng rng(config.seed);
    double bound = 0.5 / static_cast<double>(dim);
    for (std::size_t i = 0; i < vsize; ++i) {
        if (i < carried) {
            auto src_in = init->input_vectors.row(i);
            auto src_out = init->output_vectors.row(i);
            std::copy(src_in.begin(), src_in.end(), model.input_vectors.row(i).begin());
            std::copy(src_out.begin(), src_out.end(), model.output_vectors.row(i).begin());
        } else {
            auto row = model.input_vectors.row(i);
            for (std::size_t j = 0; j < dim; ++j) row[j] = rng.next_range(-bound, bound);
        }
    }

    auto encoded = encode_corpus(corpus, model.vocab);
    std::uint64_t total_words = 0;
    for (const auto& s : encoded) total_words += s.size();
    std::uint64_t words_budget = total_words * static_cast<std::uint64_t>(config.iter);

    std::atomic<std::uint64_t> processed{0};
    model.epoch_losses.reserve(config.iter);

    if (config.workers == 1) {
        std::vector<double> scratch;
        std::vector<std::size_t> negatives;
        for (int epoch = 0; epoch < config.iter; ++epoch) {
            EpochStats stats;
            train_sentences(encoded, model.input_vectors, model.output_vectors, model.vocab,
                            config, rng, processed, words_budget, stats, scratch, negatives);
            model.epoch_losses.push_back(stats.pairs ? stats.loss_sum / stats.pairs : 0.0);
        }
        return model;
    }

    // hogwild: unsynchronized updates on shared matrices
    std::size_t nworkers = std::min<std::size_t>(config.workers, std::max<std::size_t>(encoded.size(), 1));
    for (int epoch = 0; epoch < config.iter; ++epoch) {
        std::vector<EpochStats> stats(nworkers);
        std::vector<std::thread> threads;
        std::size_t chunk = (encoded.size() + nworkers - 1) / nworkers;
        for (std::size_t wkr = 0; wkr < nworkers; ++wkr) {
            threads.emplace_back([&, wkr] {
                std::size_t begin = wkr * chunk;
                std::size_t end = std::min(encoded.size(), begin + chunk);
                if (begin >= end) return;
                Rng worker_rng(config.seed + 0x1000003 * (wkr + 1) + epoch);
                std::vector<double> scratch;
                std::vector<std::size_t> negatives;
                train_sentences(std::span(encoded).subspan(begin, end - begin),
                                model.input_vectors, model.output_vectors, model.vocab, config,
                                worker_rng, processed, words_budget, stats[wkr], scratch,
                                negatives);
            });
        }
        for (auto& t : threads) t.join();
        EpochStats total;
        for (const auto& s : stats) {
            total.loss_sum += s.loss_sum;
            total.pairs += s.pairs;
        }
        model.epoch_losses.push_back(total.pairs ? total.loss_sum / total.pairs : 0.0);
    }
    return model;
}

namespace {

constexpr char kMagic[8] = {'O', 'P', 'A', '2', 'V', 'E', 'C', '\x01'};

template <typename T>
void write_raw(std::ostream& out, const T& value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_raw(std::istream& in) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw FormatError("model file truncated");
    return value;
}

} // namespace

void EmbeddingModel::save(std::ostream& out) const {
    out.write(kMagic, sizeof(kMagic));
    write_raw<std::uint32_t>(out, 1); // version
    write_raw<std::uint8_t>(out, config.skip_gram ? 1 : 0);
    write_raw<std::int32_t>(out, config.size);
    write_raw<std::int32_t>(out, config.min_count);
    write_raw<std::int32_t>(out, config.window);
    write_raw<std::int32_t>(out, config.iter);
    write_raw<std::int32_t>(out, config.negative);
    write_raw<double>(out, config.alpha);
    write_raw<std::uint64_t>(out, config.seed);
    write_raw<std::uint64_t>(out, vocab.size());
    for (std::size_t i = 0; i < vocab.size(); ++i) {
        const std::string& token = vocab.token_at(i);
        write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(token.size()));
        out.write(token.data(), static_cast<std::streamsize>(token.size()));
        write_raw<std::uint64_t>(out, vocab.count_at(i));
    }
    auto write_matrix = [&](const Matrix& m) {
        out.write(reinterpret_cast<const char*>(m.data().data()),
                  static_cast<std::streamsize>(m.data().size() * sizeof(double)));
    };
    write_matrix(input_vectors);
    write_matrix(output_vectors);
    if (!out) throw Error("failed writing model");
}

EmbeddingModel EmbeddingModel::load(std::istream& in) {
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw FormatError("not a model file (bad magic)");
    if (read_raw<std::uint32_t>(in) != 1) throw FormatError("unsupported model version");

    EmbeddingModel model;
    model.config.skip_gram = read_raw<std::uint8_t>(in) != 0;
    model.config.size = read_raw<std::int32_t>(in);
    model.config.min_count = read_raw<std::int32_t>(in);
    model.config.window = read_raw<std::int32_t>(in);
    model.config.iter = read_raw<std::int32_t>(in);
    model.config.negative = read_raw<std::int32_t>(in);
    model.config.alpha = read_raw<double>(in);
    model.config.seed = read_raw<std::uint64_t>(in);

    std::uint64_t vsize = read_raw<std::uint64_t>(in);
    if (model.config.size <= 0) throw FormatError("corrupt model: non-positive size");
    if (vsize > (1ULL << 32)) throw FormatError("corrupt model: implausible vocabulary size");
    for (std::uint64_t i = 0; i < vsize; ++i) {
        std::uint32_t len = read_raw<std::uint32_t>(in);
        if (len > (1U << 20)) throw FormatError("corrupt model: implausible token length");
        std::string token(len, '\0');
        in.read(token.data(), len);
        if (!in) throw FormatError("model file truncated");
        std::uint64_t count = read_raw<std::uint64_t>(in);
        model.vocab.push(std::move(token), count);
    }
    model.vocab.finish();

    auto read_matrix = [&](Matrix& m) {
        m = Matrix(vsize, static_cast<std::size_t>(model.config.size));
        in.read(reinterpret_cast<char*>(m.data().data()),
                static_cast<std::streamsize>(m.data().size() * sizeof(double)));
        if (!in) throw FormatError("model file truncated");
    };
    read_matrix(model.input_vectors);
    read_matrix(model.output_vectors);
    return model;
}

void EmbeddingModel::save_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + path);
    save(out);
}

EmbeddingModel EmbeddingModel::load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open: " + path);
    return load(in);
}

void EmbeddingModel::export_text(std::ostream& out) const {
    out << vocab.size() << ' ' << config.size << '\n';
    char buf[64];
    for (std::size_t i = 0; i < vocab.size(); ++i) {
        out << vocab.token_at(i);
        for (double v : input_vectors.row(i)) {
            std::snprintf(buf, sizeof(buf), " %.17g", v);
            out << buf;
        }
        out << '\n';
    }
}

} // namespace opa2vec
