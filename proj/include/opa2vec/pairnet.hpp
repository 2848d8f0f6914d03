#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "opa2vec/embed.hpp"
#include "opa2vec/errors.hpp"
#include "opa2vec/kb.hpp"
#include "opa2vec/matrix.hpp"

namespace opa2vec {

enum class Split { Train, Test };
enum class SplitMode { ByEntity, ByPair };

struct DatasetPair {
    Iri a;
    Iri b;
    int label = 0;
    Split split = Split::Train;
};

struct PairDataset {
    std::vector<DatasetPair> pairs;

    std::vector<DatasetPair> of_split(Split split) const;
    std::size_t count(Split split, int label) const;
};

// Builds a balanced labeled dataset. Positive pairs are canonicalized
// ((a,b) == (b,a)) and de-duplicated; negatives are drawn uniformly without
// replacement from entity pairs that are neither positive nor self-pairs,
// one negative per positive within each split.
//
// ByEntity splits the entity universe first (train fraction, then test) and
// keeps only pairs with both ends inside one side, so no test entity ever
// appears in a training pair. ByPair splits the positive pair list itself.
// Throws CannotBalance when not enough negative candidates exist.
PairDataset build_pair_dataset(const std::vector<std::pair<Iri, Iri>>& positives,
                               const std::vector<Iri>& universe, std::uint64_t seed,
                               double split_fraction, SplitMode mode);

struct MlpConfig {
    int input_units = 400; // 2 x embedding size; checked at train time
    int hidden1 = 800;
    int hidden2 = 200;
    int epochs = 100;
    int batch_size = 32;
    double learning_rate = 0.01;
    std::uint64_t seed = 1;
};

// Four-layer feed-forward pair scorer: input -> rectified 800 -> rectified
// 200 -> logistic output, optimized with mini-batch gradient descent on
// binary cross entropy.
class PairClassifier {
public:
    PairClassifier() = default;
    explicit PairClassifier(const MlpConfig& cfg); // seeded uniform +-sqrt(6/(fan_in+fan_out))

    double score(std::span<const double> features) const; // in (0, 1)
    int input_units() const { return cfg_.input_units; }
    const MlpConfig& config() const { return cfg_; }

    // Mean binary cross entropy over a batch (rows of x, one label per row).
    double loss(const Matrix& x, std::span<const int> y) const;

    struct Gradients {
        double loss = 0.0;
        Matrix w1, w2, w3;
        std::vector<double> b1, b2, b3;
    };
    Gradients gradients(const Matrix& x, std::span<const int> y) const;
    void apply(const Gradients& g, double lr);

    void save(std::ostream& out) const;
    static PairClassifier load(std::istream& in); // throws FormatError

    // Weights are exposed for gradient verification.
    Matrix w1, w2, w3; // [h1 x in], [h2 x h1], [1 x h2]
    std::vector<double> b1, b2, b3;

    std::vector<double> epoch_losses;

private:
    MlpConfig cfg_;
};

// Trains the classifier on the Train split of `ds` using concatenated
// entity vectors as features. Throws UnknownToken when an entity has no
// embedding and ConfigMismatch when cfg.input_units != 2 x embedding size.
PairClassifier train_mlp(const PairDataset& ds, const EmbeddingModel& model, MlpConfig cfg);

struct ScoredPair {
    Iri a;
    Iri b;
    std::optional<int> label;
    double score = 0.0;
};

// Scores pairs with the classifier. With `symmetric` the score is the mean
// of score(a,b) and score(b,a).
std::vector<ScoredPair> score_pairs(const PairClassifier& clf,
                                    const std::vector<DatasetPair>& pairs,
                                    const EmbeddingModel& model, bool symmetric = true);

// Concatenated feature vector for one pair.
std::vector<double> pair_features(const EmbeddingModel& model, const Iri& a, const Iri& b);

} // namespace opa2vec
