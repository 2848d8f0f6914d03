#include <doctest.h>

#include <set>
#include <sstream>

#include "opa2vec/eval.hpp"
#include "opa2vec/pairnet.hpp"
#include "testutil.hpp"

using namespace opa2vec;
using testutil::ent;

namespace {

std::vector<Iri> make_universe(int n) {
    std::vector<Iri> out;
    for (int i = 0; i < n; ++i) out.push_back(ent(i));
    return out;
}

std::vector<std::pair<Iri, Iri>> ring_positives(int n_entities, int n_pairs) {
    std::vector<std::pair<Iri, Iri>> out;
    for (int i = 0; i < n_pairs; ++i) out.emplace_back(ent(i), ent((i + 1) % n_entities));
    return out;
}

// two seeded gaussian-ish clusters in embedding space
EmbeddingModel clustered_model(int n_entities, int dim, std::uint64_t seed) {
    Corpus dummy;
    Sentence s;
    for (int i = 0; i < n_entities; ++i) s.tokens.push_back(ent(i).str());
    dummy.add(s, SourceTag::Logical);

    TrainingConfig cfg;
    cfg.size = dim;
    cfg.iter = 1;
    cfg.seed = seed;
    auto model = train(dummy, cfg); // structure only; we overwrite the vectors

    Rng rng(seed);
    for (int i = 0; i < n_entities; ++i) {
        auto row = model.input_vectors.row(*model.vocab.index_of(ent(i).str()));
        double center = (i % 2 == 0) ? 1.0 : -1.0;
        for (auto& v : row) v = center + rng.next_range(-0.3, 0.3);
    }
    return model;
}

PairDataset cluster_dataset(int n_entities, std::uint64_t seed, SplitMode mode) {
    // positives are exactly the equal-parity pairs, so sampled negatives are
    // forced across clusters and the task is separable
    std::vector<std::pair<Iri, Iri>> positives;
    for (int i = 0; i < n_entities; ++i)
        for (int j = i + 2; j < n_entities; j += 2) positives.emplace_back(ent(i), ent(j));
    return build_pair_dataset(positives, make_universe(n_entities), seed, 0.6, mode);
}

} // namespace

TEST_CASE("negatives are balanced and disjoint from positives") {
    auto positives = ring_positives(100, 10);
    auto ds = build_pair_dataset(positives, make_universe(100), 5, 0.5, SplitMode::ByPair);

    CHECK(ds.count(Split::Train, 1) == ds.count(Split::Train, 0));
    CHECK(ds.count(Split::Test, 1) == ds.count(Split::Test, 0));
    CHECK(ds.count(Split::Train, 1) + ds.count(Split::Test, 1) == 10);

    std::set<std::pair<Iri, Iri>> pos_set;
    for (auto [a, b] : positives) pos_set.insert(b < a ? std::pair{b, a} : std::pair{a, b});
    std::set<std::pair<Iri, Iri>> seen;
    for (const auto& p : ds.pairs) {
        auto key = p.b < p.a ? std::pair{p.b, p.a} : std::pair{p.a, p.b};
        CHECK(seen.insert(key).second); // no duplicates across either split
        CHECK(p.a != p.b);
        if (p.label == 0) CHECK(!pos_set.contains(key));
    }
}

TEST_CASE("the same seed reproduces the dataset, different seeds differ") {
    auto positives = ring_positives(60, 30);
    auto a = build_pair_dataset(positives, make_universe(60), 9, 0.6, SplitMode::ByEntity);
    auto b = build_pair_dataset(positives, make_universe(60), 9, 0.6, SplitMode::ByEntity);
    REQUIRE(a.pairs.size() == b.pairs.size());
    for (std::size_t i = 0; i < a.pairs.size(); ++i) {
        CHECK(a.pairs[i].a == b.pairs[i].a);
        CHECK(a.pairs[i].b == b.pairs[i].b);
        CHECK(a.pairs[i].label == b.pairs[i].label);
        CHECK(a.pairs[i].split == b.pairs[i].split);
    }

    auto c = build_pair_dataset(positives, make_universe(60), 10, 0.6, SplitMode::ByEntity);
    bool any_diff = c.pairs.size() != a.pairs.size();
    for (std::size_t i = 0; !any_diff && i < a.pairs.size(); ++i)
        any_diff = !(a.pairs[i].a == c.pairs[i].a && a.pairs[i].b == c.pairs[i].b);
    CHECK(any_diff);
}

TEST_CASE("entity-level splits never leak test entities into training pairs") {
    auto positives = ring_positives(80, 70);
    auto ds = build_pair_dataset(positives, make_universe(80), 3, 0.6, SplitMode::ByEntity);

    std::set<Iri> test_entities;
    for (const auto& p : ds.of_split(Split::Test)) {
        test_entities.insert(p.a);
        test_entities.insert(p.b);
    }
    for (const auto& p : ds.of_split(Split::Train)) {
        CHECK(!test_entities.contains(p.a));
        CHECK(!test_entities.contains(p.b));
    }
}

TEST_CASE("impossible balancing is reported") {
    // complete graph on 4 entities: no negatives left
    std::vector<std::pair<Iri, Iri>> positives;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) positives.emplace_back(ent(i), ent(j));
    CHECK_THROWS_AS(build_pair_dataset(positives, make_universe(4), 1, 0.5, SplitMode::ByPair),
                    CannotBalance);
}

TEST_CASE("positives outside the universe are rejected") {
    std::vector<std::pair<Iri, Iri>> positives{{ent(0), Iri("stranger")}};
    CHECK_THROWS_AS(build_pair_dataset(positives, make_universe(4), 1, 0.5, SplitMode::ByPair),
                    Error);
}

TEST_CASE("mlp scores stay in the open unit interval") {
    auto model = clustered_model(20, 8, 42);
    auto ds = cluster_dataset(20, 7, SplitMode::ByPair);
    MlpConfig cfg;
    cfg.input_units = 16;
    cfg.hidden1 = 24;
    cfg.hidden2 = 12;
    cfg.epochs = 5;
    cfg.seed = 1;
    auto clf = train_mlp(ds, model, cfg);
    for (const auto& p : ds.pairs) {
        double s = clf.score(pair_features(model, p.a, p.b));
        CHECK(s > 0.0);
        CHECK(s < 1.0);
    }
}

TEST_CASE("mlp parameter gradients match central finite differences") {
    MlpConfig cfg;
    cfg.input_units = 8;
    cfg.hidden1 = 9;
    cfg.hidden2 = 6;
    cfg.seed = 13;
    PairClassifier net(cfg);

    Rng rng(77);
    Matrix x(3, 8);
    for (auto& v : x.data()) v = rng.next_range(-1.0, 1.0);
    std::vector<int> y{1, 0, 1};

    auto g = net.gradients(x, y);
    auto loss = [&] { return net.loss(x, y); };

    int checked = 0;
    auto check_matrix = [&](Matrix& w, const Matrix& gw) {
        for (std::size_t i = 0; i < w.rows(); ++i)
            for (std::size_t j = 0; j < w.cols(); ++j) {
                double fd = testutil::central_difference(w.at(i, j), loss);
                CHECK(testutil::relative_error(gw.at(i, j), fd) < 1e-4);
                ++checked;
            }
    };
    check_matrix(net.w1, g.w1);
    check_matrix(net.w2, g.w2);
    check_matrix(net.w3, g.w3);
    for (std::size_t i = 0; i < net.b1.size(); ++i) {
        double fd = testutil::central_difference(net.b1[i], loss);
        CHECK(testutil::relative_error(g.b1[i], fd) < 1e-4);
    }
    double fd_b3 = testutil::central_difference(net.b3[0], loss);
    CHECK(testutil::relative_error(g.b3[0], fd_b3) < 1e-4);
    CHECK(checked > 100);
}

TEST_CASE("a separable toy problem reaches 99 percent training accuracy") {
    auto model = clustered_model(30, 8, 4242);
    auto ds = cluster_dataset(30, 17, SplitMode::ByPair);

    MlpConfig cfg;
    cfg.input_units = 16;
    cfg.hidden1 = 32;
    cfg.hidden2 = 16;
    cfg.epochs = 200;
    cfg.learning_rate = 0.02;
    cfg.seed = 3;
    auto clf = train_mlp(ds, model, cfg);

    auto train_split = ds.of_split(Split::Train);
    std::size_t correct = 0;
    for (const auto& p : train_split) {
        double s = clf.score(pair_features(model, p.a, p.b));
        correct += (s >= 0.5) == (p.label == 1);
    }
    CHECK(static_cast<double>(correct) / train_split.size() >= 0.99);

    // epoch losses trend down within tolerance (absolute slack for the
    // near-zero plateau)
    for (std::size_t e = 1; e < clf.epoch_losses.size(); ++e)
        CHECK(clf.epoch_losses[e] <= clf.epoch_losses[e - 1] * 1.05 + 1e-6);
}

TEST_CASE("a zero output layer scores everything one half") {
    MlpConfig cfg;
    cfg.input_units = 4;
    cfg.hidden1 = 5;
    cfg.hidden2 = 3;
    PairClassifier net(cfg);
    std::fill(net.w3.data().begin(), net.w3.data().end(), 0.0);
    net.b3[0] = 0.0;
    std::vector<double> x{0.4, -0.2, 1.0, 0.9};
    CHECK(net.score(x) == 0.5);
}

TEST_CASE("scoring is pure and symmetric mode averages both directions") {
    auto model = clustered_model(10, 6, 5);
    auto ds = cluster_dataset(10, 2, SplitMode::ByPair);
    MlpConfig cfg;
    cfg.input_units = 12;
    cfg.hidden1 = 8;
    cfg.hidden2 = 4;
    cfg.epochs = 3;
    auto clf = train_mlp(ds, model, cfg);

    auto once = score_pairs(clf, ds.pairs, model, true);
    auto twice = score_pairs(clf, ds.pairs, model, true);
    for (std::size_t i = 0; i < once.size(); ++i) CHECK(once[i].score == twice[i].score);

    for (const auto& p : ds.pairs) {
        double ab = clf.score(pair_features(model, p.a, p.b));
        double ba = clf.score(pair_features(model, p.b, p.a));
        double sym = score_pairs(clf, {DatasetPair{p.a, p.b, p.label, p.split}}, model, true)[0].score;
        CHECK(sym == doctest::Approx(0.5 * (ab + ba)).epsilon(1e-15));
    }
}

TEST_CASE("shuffled labels give chance-level test AUC") {
    for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
        auto model = clustered_model(120, 6, seed * 31 + 1);
        Rng rng(seed);
        std::set<std::pair<Iri, Iri>> chosen;
        while (chosen.size() < 1600) {
            int i = static_cast<int>(rng.next_below(120));
            int j = static_cast<int>(rng.next_below(120));
            if (i == j) continue;
            auto p = std::minmax(ent(i), ent(j));
            chosen.insert({p.first, p.second});
        }
        std::vector<std::pair<Iri, Iri>> positives(chosen.begin(), chosen.end());
        auto ds = build_pair_dataset(positives, make_universe(120), seed, 0.5, SplitMode::ByPair);

        // destroy any signal: shuffle labels within each split
        for (Split split : {Split::Train, Split::Test}) {
            std::vector<int> labels;
            std::vector<std::size_t> where;
            for (std::size_t i = 0; i < ds.pairs.size(); ++i) {
                if (ds.pairs[i].split != split) continue;
                labels.push_back(ds.pairs[i].label);
                where.push_back(i);
            }
            rng.shuffle(labels);
            for (std::size_t k = 0; k < where.size(); ++k) ds.pairs[where[k]].label = labels[k];
        }

        MlpConfig cfg;
        cfg.input_units = 12;
        cfg.hidden1 = 16;
        cfg.hidden2 = 8;
        cfg.epochs = 10;
        cfg.seed = seed;
        auto clf = train_mlp(ds, model, cfg);

        std::vector<ScoredLabel> scored;
        for (const auto& sp : score_pairs(clf, ds.of_split(Split::Test), model, true))
            scored.push_back({sp.score, sp.label.value_or(0)});
        double auc = auc_only(scored);
        CHECK(auc > 0.45);
        CHECK(auc < 0.55);
    }
}

TEST_CASE("classifier checkpoints round-trip") {
    auto model = clustered_model(10, 6, 21);
    auto ds = cluster_dataset(10, 8, SplitMode::ByPair);
    MlpConfig cfg;
    cfg.input_units = 12;
    cfg.hidden1 = 8;
    cfg.hidden2 = 4;
    cfg.epochs = 2;
    auto clf = train_mlp(ds, model, cfg);

    std::stringstream buf(std::ios::in | std::ios::out | std::ios::binary);
    clf.save(buf);
    auto loaded = PairClassifier::load(buf);
    CHECK(loaded.w1 == clf.w1);
    CHECK(loaded.w2 == clf.w2);
    CHECK(loaded.w3 == clf.w3);
    CHECK(loaded.b2 == clf.b2);

    std::string bytes = buf.str();
    std::istringstream cut(bytes.substr(0, bytes.size() / 2));
    CHECK_THROWS_AS(PairClassifier::load(cut), FormatError);
}
