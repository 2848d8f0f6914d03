#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "opa2vec/corpus.hpp"
#include "opa2vec/errors.hpp"
#include "opa2vec/matrix.hpp"
#include "opa2vec/rng.hpp"

namespace opa2vec {

struct TrainingConfig {
    bool skip_gram = true; // sg=1; CBOW is rejected at train time
    int size = 200;
    int min_count = 1;
    int window = 5;
    int iter = 5;
    int negative = 5;
    double alpha = 0.025;
    std::uint64_t seed = 1;
    int workers = 1;

    void validate() const; // throws ConfigError on an invariant violation
    bool operator==(const TrainingConfig&) const = default;
};

// Token inventory with frequency counts and the negative-sampling noise
// distribution (unigram frequency raised to 0.75).
class Vocabulary {
public:
    Vocabulary() = default;

    // Tokens with frequency < min_count are dropped; the rest are ordered by
    // descending count, ties broken by token. Throws EmptyVocabulary.
    static Vocabulary build(const Corpus& corpus, int min_count);

    // Vocabulary extension for continued training: base tokens keep their
    // indices; unseen tokens meeting min_count are appended. Counts and the
    // noise distribution reflect only the new corpus, so base tokens absent
    // from it are never sampled.
    static Vocabulary extend(const Vocabulary& base, const Corpus& corpus, int min_count);

    std::size_t size() const { return tokens_.size(); }
    std::optional<std::size_t> index_of(std::string_view token) const;
    const std::string& token_at(std::size_t i) const { return tokens_[i]; }
    std::uint64_t count_at(std::size_t i) const { return counts_[i]; }

    bool can_sample_noise() const { return !noise_items_.empty(); }
    std::size_t sample_noise(Rng& rng) const;

    bool operator==(const Vocabulary& other) const {
        return tokens_ == other.tokens_ && counts_ == other.counts_;
    }

    // for serialization
    void push(std::string token, std::uint64_t count);
    void finish(); // rebuilds the noise distribution

private:
    std::vector<std::string> tokens_;
    std::vector<std::uint64_t> counts_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::size_t> noise_items_; // indices with count > 0
    std::vector<double> noise_cdf_;        // cumulative freq^0.75 over noise_items_
};

struct EmbeddingModel {
    Vocabulary vocab;
    Matrix input_vectors;  // |V| x size; the embeddings
    Matrix output_vectors; // |V| x size; context (negative-sampling) weights
    TrainingConfig config;
    std::vector<double> epoch_losses; // mean pair loss per epoch; not serialized

    std::span<const double> vector_of(std::string_view token) const; // throws UnknownToken

    // Bit-exact over vocabulary and both weight matrices.
    bool same_weights(const EmbeddingModel& other) const;

    void save(std::ostream& out) const;
    static EmbeddingModel load(std::istream& in); // throws FormatError
    void save_file(const std::string& path) const;
    static EmbeddingModel load_file(const std::string& path);

    // `|V| size` header, then `token f1 ... fsize` per line.
    void export_text(std::ostream& out) const;
};

// Loss and analytic gradients of the skip-gram negative-sampling objective
// for one (center, positive context, negatives) interaction:
//   loss = -log s(v'_pos . v_w) - sum_k log s(-v'_negk . v_w)
// with v_w = input_vectors[center], v'_t = output_vectors[target].
struct SgnsGradient {
    double loss = 0.0;
    std::vector<double> center;               // d loss / d input_vectors[center]
    std::vector<std::vector<double>> targets;  // d loss / d output_vectors[t]: positive first, then negatives
};

SgnsGradient sgns_gradient(const Matrix& input, const Matrix& output, std::size_t center,
                           std::size_t positive, std::span<const std::size_t> negatives);
double sgns_loss(const Matrix& input, const Matrix& output, std::size_t center,
                 std::size_t positive, std::span<const std::size_t> negatives);

// Trains skip-gram embeddings on the corpus. When `init` is given its
// vocabulary is extended with the corpus tokens: overlapping tokens start
// from the init vectors and keep training, new tokens are seeded uniformly
// in [-0.5/size, 0.5/size], and init tokens absent from the corpus come out
// bit-identical. Single-worker runs with a fixed seed are bit-reproducible;
// multi-worker runs use unsynchronized (hogwild) updates.
EmbeddingModel train(const Corpus& corpus, TrainingConfig config,
                     const EmbeddingModel* init = nullptr);

} // namespace opa2vec
