#include "opa2vec/pairnet.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <set>

namespace opa2vec {

std::vector<DatasetPair> PairDataset::of_split(Split split) const {
    std::vector<DatasetPair> out;
    for (const auto& p : pairs)
        if (p.split == split) out.push_back(p);
    return out;
}

std::size_t PairDataset::count(Split split, int label) const {
    std::size_t n = 0;
    for (const auto& p : pairs)
        if (p.split == split && p.label == label) ++n;
    return n;
}

namespace {

using IriPair = std::pair<Iri, Iri>;

IriPair canonical(Iri a, Iri b) {
    if (b < a) std::swap(a, b);
    return {std::move(a), std::move(b)};
}

// k distinct negatives from entities^2 minus `excluded` (positives plus any
// negatives already taken by another split) minus self-pairs. Candidate
// spaces small enough to enumerate are shuffled exactly; larger ones use
// rejection sampling. Both paths are seed-deterministic.
std::vector<IriPair> sample_negatives(const std::vector<Iri>& entities,
                                      const std::set<IriPair>& excluded, std::size_t k, Rng& rng) {
    if (k == 0) return {};
    if (entities.size() < 2) throw CannotBalance("fewer than two entities to draw negatives from");
    const std::size_t n = entities.size();
    const std::size_t all_pairs = n * (n - 1) / 2;
    std::size_t within = 0;
    for (const auto& p : excluded)
        if (p.first != p.second && std::binary_search(entities.begin(), entities.end(), p.first) &&
            std::binary_search(entities.begin(), entities.end(), p.second))
            ++within;
    if (all_pairs - within < k)
        throw CannotBalance("need " + std::to_string(k) + " negatives but only " +
                            std::to_string(all_pairs - within) + " candidate pairs exist");

    constexpr std::size_t kEnumerationLimit = 2'000'000;
    std::vector<IriPair> negatives;
    negatives.reserve(k);
    if (all_pairs <= kEnumerationLimit) {
        std::vector<IriPair> candidates;
        candidates.reserve(all_pairs - within);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                IriPair p{entities[i], entities[j]};
                if (!excluded.contains(p)) candidates.push_back(std::move(p));
            }
        rng.shuffle(candidates);
        negatives.assign(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k));
    } else {
        std::set<IriPair> chosen;
        std::size_t attempts = 0, cap = 1000 * k;
        while (chosen.size() < k) {
            if (++attempts > cap) throw CannotBalance("negative sampling did not converge");
            std::size_t i = rng.next_below(n);
            std::size_t j = rng.next_below(n);
            if (i == j) continue;
            IriPair p = canonical(entities[i], entities[j]);
            if (excluded.contains(p) || chosen.contains(p)) continue;
            chosen.insert(p);
            negatives.push_back(std::move(p));
        }
    }
    return negatives;
}

} // namespace

PairDataset build_pair_dataset(const std::vector<std::pair<Iri, Iri>>& positives,
                               const std::vector<Iri>& universe, std::uint64_t seed,
                               double split_fraction, SplitMode mode) {
    if (!(split_fraction > 0.0 && split_fraction < 1.0))
        throw ConfigError("split_fraction must be in (0, 1)");

    std::vector<Iri> entities(universe.begin(), universe.end());
    std::sort(entities.begin(), entities.end());
    entities.erase(std::unique(entities.begin(), entities.end()), entities.end());
    std::set<Iri> known(entities.begin(), entities.end());

    std::set<IriPair> pos_set;
    std::vector<IriPair> pos;
    for (const auto& [a, b] : positives) {
        if (!known.contains(a)) throw Error("positive pair entity not in universe: " + a.str());
        if (!known.contains(b)) throw Error("positive pair entity not in universe: " + b.str());
        if (a == b) continue;
        IriPair p = canonical(a, b);
        if (pos_set.insert(p).second) pos.push_back(std::move(p));
    }
    if (pos.empty()) throw CannotBalance("no usable positive pairs");

    Rng rng(seed);
    PairDataset ds;

    // grows with each split's negatives so no pair lands in both splits
    std::set<IriPair> excluded = pos_set;
    auto emit = [&](const std::vector<IriPair>& positives_in, const std::vector<Iri>& pool,
                    Split split) {
        auto negatives = sample_negatives(pool, excluded, positives_in.size(), rng);
        for (const auto& [a, b] : positives_in) ds.pairs.push_back({a, b, 1, split});
        for (const auto& [a, b] : negatives) {
            excluded.insert({a, b});
            ds.pairs.push_back({a, b, 0, split});
        }
    };

    if (mode == SplitMode::ByEntity) {
        std::vector<Iri> shuffled = entities;
        rng.shuffle(shuffled);
        std::size_t n_train = static_cast<std::size_t>(
            std::ceil(split_fraction * static_cast<double>(shuffled.size())));
        n_train = std::clamp<std::size_t>(n_train, 1, shuffled.size() - 1);
        std::vector<Iri> train_entities(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(n_train));
        std::vector<Iri> test_entities(shuffled.begin() + static_cast<std::ptrdiff_t>(n_train), shuffled.end());
        std::sort(train_entities.begin(), train_entities.end());
        std::sort(test_entities.begin(), test_entities.end());

        auto both_in = [](const IriPair& p, const std::vector<Iri>& side) {
            return std::binary_search(side.begin(), side.end(), p.first) &&
                   std::binary_search(side.begin(), side.end(), p.second);
        };
        std::vector<IriPair> train_pos, test_pos;
        for (const auto& p : pos) {
            if (both_in(p, train_entities)) train_pos.push_back(p);
            else if (both_in(p, test_entities)) test_pos.push_back(p);
            // pairs straddling the entity split are dropped
        }
        if (train_pos.empty() || test_pos.empty())
            throw CannotBalance("entity split left a side without positive pairs");
        emit(train_pos, train_entities, Split::Train);
        emit(test_pos, test_entities, Split::Test);
    } else {
        std::vector<IriPair> shuffled = pos;
        rng.shuffle(shuffled);
        std::size_t n_train = static_cast<std::size_t>(
            std::ceil(split_fraction * static_cast<double>(shuffled.size())));
        n_train = std::clamp<std::size_t>(n_train, 1, shuffled.size() - 1);
        std::vector<IriPair> train_pos(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(n_train));
        std::vector<IriPair> test_pos(shuffled.begin() + static_cast<std::ptrdiff_t>(n_train), shuffled.end());
        emit(train_pos, entities, Split::Train);
        emit(test_pos, entities, Split::Test);
    }
    return ds;
}

namespace {

inline double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void init_layer(Matrix& w, std::vector<double>& b, std::size_t fan_out, std::size_t fan_in,
                Rng& rng) {
    w = Matrix(fan_out, fan_in);
    double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (std::size_t i = 0; i < fan_out; ++i)
        for (std::size_t j = 0; j < fan_in; ++j) w.at(i, j) = rng.next_range(-bound, bound);
    b.assign(fan_out, 0.0);
}

void affine(const Matrix& w, const std::vector<double>& b, std::span<const double> x,
            std::vector<double>& out) {
    out.resize(w.rows());
    for (std::size_t i = 0; i < w.rows(); ++i) out[i] = b[i] + dot(w.row(i), x);
}

struct Forward {
    std::vector<double> h1, h2; // post-rectifier activations
    double logit = 0.0;
    double prob = 0.5;
};

void forward_pass(const PairClassifier& net, std::span<const double> x, Forward& f) {
    affine(net.w1, net.b1, x, f.h1);
    for (double& v : f.h1) v = std::max(v, 0.0);
    affine(net.w2, net.b2, f.h1, f.h2);
    for (double& v : f.h2) v = std::max(v, 0.0);
    f.logit = net.b3[0] + dot(net.w3.row(0), f.h2);
    f.prob = logistic(f.logit);
}

// -(y log p + (1-y) log(1-p)) via the logit, stable for saturated outputs
inline double bce_from_logit(double logit, int y) {
    double soft = logit > 0.0 ? std::log1p(std::exp(-logit)) : -logit + std::log1p(std::exp(logit));
    return y ? soft : soft + logit;
}

} // namespace

PairClassifier::PairClassifier(const MlpConfig& cfg) : cfg_(cfg) {
    if (cfg.input_units <= 0 || cfg.hidden1 <= 0 || cfg.hidden2 <= 0)
        throw ConfigError("MLP layer sizes must be positive");
    if (cfg.epochs < 1 || cfg.batch_size < 1 || !(cfg.learning_rate > 0.0))
        throw ConfigError("MLP training parameters must be positive");
    Rng rng(cfg.seed);
    init_layer(w1, b1, static_cast<std::size_t>(cfg.hidden1), static_cast<std::size_t>(cfg.input_units), rng);
    init_layer(w2, b2, static_cast<std::size_t>(cfg.hidden2), static_cast<std::size_t>(cfg.hidden1), rng);
    init_layer(w3, b3, 1, static_cast<std::size_t>(cfg.hidden2), rng);
}

double PairClassifier::score(std::span<const double> features) const {
    if (features.size() != static_cast<std::size_t>(cfg_.input_units))
        throw DimMismatch("classifier expects " + std::to_string(cfg_.input_units) +
                          " inputs, got " + std::to_string(features.size()));
    Forward f;
    forward_pass(*this, features, f);
    return f.prob;
}

double PairClassifier::loss(const Matrix& x, std::span<const int> y) const {
    Forward f;
    double sum = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) {
        forward_pass(*this, x.row(r), f);
        sum += bce_from_logit(f.logit, y[r]);
    }
    return sum / static_cast<double>(x.rows());
}

PairClassifier::Gradients PairClassifier::gradients(const Matrix& x, std::span<const int> y) const {
    Gradients g;
    g.w1 = Matrix(w1.rows(), w1.cols());
    g.w2 = Matrix(w2.rows(), w2.cols());
    g.w3 = Matrix(w3.rows(), w3.cols());
    g.b1.assign(b1.size(), 0.0);
    g.b2.assign(b2.size(), 0.0);
    g.b3.assign(b3.size(), 0.0);

    Forward f;
    std::vector<double> d2(w2.rows()), d1(w1.rows());
    const double inv = 1.0 / static_cast<double>(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) {
        auto xr = x.row(r);
        forward_pass(*this, xr, f);
        g.loss += bce_from_logit(f.logit, y[r]) * inv;

        double dlogit = (f.prob - static_cast<double>(y[r])) * inv;
        g.b3[0] += dlogit;
        for (std::size_t j = 0; j < w3.cols(); ++j) g.w3.at(0, j) += dlogit * f.h2[j];

        for (std::size_t i = 0; i < w2.rows(); ++i)
            d2[i] = f.h2[i] > 0.0 ? dlogit * w3.at(0, i) : 0.0;
        for (std::size_t i = 0; i < w2.rows(); ++i) {
            if (d2[i] == 0.0) continue;
            g.b2[i] += d2[i];
            auto row = g.w2.row(i);
            for (std::size_t j = 0; j < w2.cols(); ++j) row[j] += d2[i] * f.h1[j];
        }

        for (std::size_t i = 0; i < w1.rows(); ++i) {
            if (f.h1[i] <= 0.0) { d1[i] = 0.0; continue; }
            double acc = 0.0;
            for (std::size_t k = 0; k < w2.rows(); ++k) acc += d2[k] * w2.at(k, i);
            d1[i] = acc;
        }
        for (std::size_t i = 0; i < w1.rows(); ++i) {
            if (d1[i] == 0.0) continue;
            g.b1[i] += d1[i];
            auto row = g.w1.row(i);
            for (std::size_t j = 0; j < w1.cols(); ++j) row[j] += d1[i] * xr[j];
        }
    }
    return g;
}

void PairClassifier::apply(const Gradients& g, double lr) {
    auto step_matrix = [lr](Matrix& w, const Matrix& gw) {
        auto& dst = w.data();
        const auto& src = gw.data();
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] -= lr * src[i];
    };
    auto step_vector = [lr](std::vector<double>& b, const std::vector<double>& gb) {
        for (std::size_t i = 0; i < b.size(); ++i) b[i] -= lr * gb[i];
    };
    step_matrix(w1, g.w1);
    step_matrix(w2, g.w2);
    step_matrix(w3, g.w3);
    step_vector(b1, g.b1);
    step_vector(b2, g.b2);
    step_vector(b3, g.b3);
}

std::vector<double> pair_features(const EmbeddingModel& model, const Iri& a, const Iri& b) {
    auto va = model.vector_of(a.str());
    auto vb = model.vector_of(b.str());
    std::vector<double> x;
    x.reserve(va.size() + vb.size());
    x.insert(x.end(), va.begin(), va.end());
    x.insert(x.end(), vb.begin(), vb.end());
    return x;
}

PairClassifier train_mlp(const PairDataset& ds, const EmbeddingModel& model, MlpConfig cfg) {
    if (cfg.input_units != 2 * model.config.size)
        throw ConfigMismatch("MLP input units (" + std::to_string(cfg.input_units) +
                             ") must equal twice the embedding size (" +
                             std::to_string(model.config.size) + ")");

    auto train_split = ds.of_split(Split::Train);
    if (train_split.empty()) throw Error("training split is empty");

    // pairs are undirected: present each one in both orders
    const std::size_t dim = static_cast<std::size_t>(cfg.input_units);
    Matrix features(2 * train_split.size(), dim);
    std::vector<int> labels(2 * train_split.size());
    for (std::size_t i = 0; i < train_split.size(); ++i) {
        auto fwd = pair_features(model, train_split[i].a, train_split[i].b);
        auto rev = pair_features(model, train_split[i].b, train_split[i].a);
        std::copy(fwd.begin(), fwd.end(), features.row(2 * i).begin());
        std::copy(rev.begin(), rev.end(), features.row(2 * i + 1).begin());
        labels[2 * i] = train_split[i].label;
        labels[2 * i + 1] = train_split[i].label;
    }

    PairClassifier net(cfg);
    Rng rng(cfg.seed ^ 0x5DEECE66DULL);
    std::vector<std::size_t> order(features.rows());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    Matrix batch_x;
    std::vector<int> batch_y;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_loss = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            std::size_t count = std::min<std::size_t>(cfg.batch_size, order.size() - start);
            batch_x = Matrix(count, dim);
            batch_y.resize(count);
            for (std::size_t i = 0; i < count; ++i) {
                auto src = features.row(order[start + i]);
                std::copy(src.begin(), src.end(), batch_x.row(i).begin());
                batch_y[i] = labels[order[start + i]];
            }
            auto g = net.gradients(batch_x, batch_y);
            net.apply(g, cfg.learning_rate);
            epoch_loss += g.loss;
            ++batches;
        }
        net.epoch_losses.push_back(batches ? epoch_loss / static_cast<double>(batches) : 0.0);
    }
    return net;
}

std::vector<ScoredPair> score_pairs(const PairClassifier& clf, const std::vector<DatasetPair>& pairs,
                                    const EmbeddingModel& model, bool symmetric) {
    std::vector<ScoredPair> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) {
        double s = clf.score(pair_features(model, p.a, p.b));
        if (symmetric) {
            double s2 = clf.score(pair_features(model, p.b, p.a));
            s = 0.5 * (s + s2);
        }
        out.push_back({p.a, p.b, p.label, s});
    }
    return out;
}

namespace {

constexpr char kMlpMagic[8] = {'O', 'P', 'A', '2', 'M', 'L', 'P', '\x01'};

template <typename T>
void put(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T take(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw FormatError("classifier checkpoint truncated");
    return v;
}

void put_doubles(std::ostream& out, const std::vector<double>& v) {
    put<std::uint64_t>(out, v.size());
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
}

std::vector<double> take_doubles(std::istream& in) {
    std::uint64_t n = take<std::uint64_t>(in);
    if (n > (1ULL << 32)) throw FormatError("classifier checkpoint corrupt");
    std::vector<double> v(n);
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
    if (!in) throw FormatError("classifier checkpoint truncated");
    return v;
}

} // namespace

void PairClassifier::save(std::ostream& out) const {
    out.write(kMlpMagic, sizeof(kMlpMagic));
    put<std::uint32_t>(out, 1);
    put<std::int32_t>(out, cfg_.input_units);
    put<std::int32_t>(out, cfg_.hidden1);
    put<std::int32_t>(out, cfg_.hidden2);
    put<std::int32_t>(out, cfg_.epochs);
    put<std::int32_t>(out, cfg_.batch_size);
    put<double>(out, cfg_.learning_rate);
    put<std::uint64_t>(out, cfg_.seed);
    put_doubles(out, w1.data());
    put_doubles(out, w2.data());
    put_doubles(out, w3.data());
    put_doubles(out, b1);
    put_doubles(out, b2);
    put_doubles(out, b3);
}

PairClassifier PairClassifier::load(std::istream& in) {
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMlpMagic, sizeof(kMlpMagic)) != 0)
        throw FormatError("not a classifier checkpoint (bad magic)");
    if (take<std::uint32_t>(in) != 1) throw FormatError("unsupported checkpoint version");

    MlpConfig cfg;
    cfg.input_units = take<std::int32_t>(in);
    cfg.hidden1 = take<std::int32_t>(in);
    cfg.hidden2 = take<std::int32_t>(in);
    cfg.epochs = take<std::int32_t>(in);
    cfg.batch_size = take<std::int32_t>(in);
    cfg.learning_rate = take<double>(in);
    cfg.seed = take<std::uint64_t>(in);

    PairClassifier net;
    net.cfg_ = cfg;
    auto read_matrix = [&](Matrix& m, std::size_t rows, std::size_t cols) {
        auto data = take_doubles(in);
        if (data.size() != rows * cols) throw FormatError("classifier checkpoint corrupt");
        m = Matrix(rows, cols);
        m.data() = std::move(data);
    };
    read_matrix(net.w1, static_cast<std::size_t>(cfg.hidden1), static_cast<std::size_t>(cfg.input_units));
    read_matrix(net.w2, static_cast<std::size_t>(cfg.hidden2), static_cast<std::size_t>(cfg.hidden1));
    read_matrix(net.w3, 1, static_cast<std::size_t>(cfg.hidden2));
    net.b1 = take_doubles(in);
    net.b2 = take_doubles(in);
    net.b3 = take_doubles(in);
    if (net.b1.size() != static_cast<std::size_t>(cfg.hidden1) ||
        net.b2.size() != static_cast<std::size_t>(cfg.hidden2) || net.b3.size() != 1)
        throw FormatError("classifier checkpoint corrupt");
    return net;
}

} // namespace opa2vec
