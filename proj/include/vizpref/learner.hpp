// Weight learning over labeled pairs: a linear RankSVM fit by deterministic
// full-batch projected subgradient descent, plus seeded train/test splitting,
// k-fold cross-validated regularization search, and ranking accuracy.
//
// Objective, for difference vectors d_i = negative_i - positive_i:
//
//   F(w) = 1/2 ||w||^2 + C * sum_i max(0, 1 - w . d_i)
//
// so the fit pushes cost(positive) + margin <= cost(negative). There is no
// intercept: cost comparisons are translation-invariant, so one would be
// unidentifiable.

#pragma once

#include "catalog.hpp"
#include "error.hpp"
#include "rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace vizpref {

enum class Provenance { judge_rank, judge_recommend, empirical, synthetic };

inline std::string to_string(Provenance p) {
    switch (p) {
    case Provenance::judge_rank: return "judge_rank";
    case Provenance::judge_recommend: return "judge_recommend";
    case Provenance::empirical: return "empirical";
    case Provenance::synthetic: return "synthetic";
    }
    return "?";
}

inline Provenance provenance_from_string(const std::string& s) {
    if (s == "judge_rank") return Provenance::judge_rank;
    if (s == "judge_recommend") return Provenance::judge_recommend;
    if (s == "empirical") return Provenance::empirical;
    if (s == "synthetic") return Provenance::synthetic;
    throw Error("unknown provenance: " + s);
}

struct LabeledPair {
    FeatureVector positive;
    FeatureVector negative;
    std::string pair_id;
    Provenance provenance = Provenance::synthetic;

    LabeledPair(FeatureVector pos, FeatureVector neg, std::string id, Provenance prov)
        : positive(std::move(pos)), negative(std::move(neg)), pair_id(std::move(id)),
          provenance(prov) {
        if (positive.catalog_hash != negative.catalog_hash)
            throw Error("labeled pair mixes catalogs (pair " + pair_id + ")");
        if (positive.counts.size() != negative.counts.size())
            throw Error("labeled pair feature lengths differ (pair " + pair_id + ")");
        if (positive.counts == negative.counts)
            throw Error("labeled pair has identical feature vectors (pair " + pair_id +
                        ")");
    }
};

struct TrainingMeta {
    std::size_t pair_count = 0;
    std::uint64_t seed = 0;
    std::optional<double> cv_accuracy;
    std::optional<double> test_accuracy;
};

struct PreferenceModel {
    std::vector<double> weights; // one per soft constraint, catalog order
    std::string catalog_hash;
    double regularization = 1.0;
    TrainingMeta training_meta;
    std::string model_id; // used in reports and file names

    double dot(const FeatureVector& fv) const {
        double sum = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i)
            sum += weights[i] * fv.counts[i];
        return sum;
    }
};

struct SplitSpec {
    double train_fraction = 0.8;
    int folds = 5;
    std::uint64_t seed = 0;
    std::vector<double> grid = {1e-3, 1e-2, 1e-1, 1.0, 10.0, 100.0, 1000.0};
};

struct TrainResult {
    PreferenceModel model;
    std::vector<double> objective_trace; // running best; non-increasing
    int iterations = 0;
    bool converged = false;
};

namespace learn_detail {

inline void check_pairs(const std::vector<LabeledPair>& pairs) {
    if (pairs.empty()) throw Error("train: empty pair list");
    const std::string& hash = pairs.front().positive.catalog_hash;
    for (const auto& p : pairs) {
        if (p.positive.catalog_hash != hash)
            throw Error("train: mixed catalogs across pairs");
        for (int c : p.positive.counts)
            if (c < 0) throw Error("train: negative feature count");
    }
}

} // namespace learn_detail

/// Deterministic RankSVM fit. Pegasos-style schedule (step 1/(lambda t) with
/// lambda = 1/(C m), projection onto the ball that provably contains the
/// optimum), full batch, zero start. Subgradient steps are not monotone, so
/// the trace records - and the result returns - the best iterate so far.
/// Stops when the relative objective change drops below 1e-8 or at 10,000
/// iterations.
inline TrainResult train_detailed(const std::vector<LabeledPair>& pairs, double C,
                                  std::uint64_t seed) {
    learn_detail::check_pairs(pairs);
    if (!(C > 0.0) || !std::isfinite(C)) throw Error("train: C must be positive");

    const std::size_t m = pairs.size();
    const std::size_t dim = pairs.front().positive.counts.size();
    std::vector<double> diffs(m * dim);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < dim; ++j)
            diffs[i * dim + j] = static_cast<double>(pairs[i].negative.counts[j]) -
                                 static_cast<double>(pairs[i].positive.counts[j]);

    const double lambda = 1.0 / (C * static_cast<double>(m));
    const double radius = std::sqrt(2.0 / lambda);
    constexpr int kMaxIter = 10000;
    constexpr double kTol = 1e-8;

    std::vector<double> w(dim, 0.0), grad(dim), best_w(dim, 0.0);
    auto objective = [&](const std::vector<double>& weights) {
        double norm2 = 0.0;
        for (double v : weights) norm2 += v * v;
        double hinge = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double margin = 0.0;
            const double* d = &diffs[i * dim];
            for (std::size_t j = 0; j < dim; ++j) margin += weights[j] * d[j];
            hinge += std::max(0.0, 1.0 - margin);
        }
        return 0.5 * norm2 + C * hinge;
    };

    TrainResult result;
    double best = objective(w);
    double prev = best;
    result.objective_trace.push_back(best);
    int small_changes = 0; // consecutive below-tolerance steps; one can be a fluke

    int t = 0;
    for (t = 1; t <= kMaxIter; ++t) {
        std::fill(grad.begin(), grad.end(), 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            const double* d = &diffs[i * dim];
            double margin = 0.0;
            for (std::size_t j = 0; j < dim; ++j) margin += w[j] * d[j];
            if (margin < 1.0)
                for (std::size_t j = 0; j < dim; ++j) grad[j] -= d[j];
        }
        const double inv_m = 1.0 / static_cast<double>(m);
        const double eta = 1.0 / (lambda * static_cast<double>(t));
        for (std::size_t j = 0; j < dim; ++j)
            w[j] -= eta * (lambda * w[j] + grad[j] * inv_m);
        double norm = 0.0;
        for (double v : w) norm += v * v;
        norm = std::sqrt(norm);
        if (norm > radius)
            for (double& v : w) v *= radius / norm;

        double f = objective(w);
        if (f < best) {
            best = f;
            best_w = w;
        }
        result.objective_trace.push_back(best);
        double rel = std::abs(f - prev) / std::max(1.0, std::abs(prev));
        prev = f;
        small_changes = rel < kTol ? small_changes + 1 : 0;
        if (small_changes >= 5) {
            result.converged = true;
            break;
        }
    }
    result.iterations = std::min(t, kMaxIter);

    result.model.weights = std::move(best_w);
    result.model.catalog_hash = pairs.front().positive.catalog_hash;
    result.model.regularization = C;
    result.model.training_meta.pair_count = m;
    result.model.training_meta.seed = seed;
    return result;
}

inline PreferenceModel train(const std::vector<LabeledPair>& pairs, double C,
                             std::uint64_t seed) {
    return train_detailed(pairs, C, seed).model;
}

/// Fraction of pairs ranked correctly: cost(positive) < cost(negative),
/// strictly; ties count as incorrect.
inline double rank_accuracy(const PreferenceModel& model,
                            const std::vector<LabeledPair>& pairs) {
    if (pairs.empty()) throw Error("rank_accuracy: empty pair list");
    std::size_t correct = 0;
    for (const auto& p : pairs) {
        if (p.positive.catalog_hash != model.catalog_hash)
            throw Error("rank_accuracy: catalog mismatch");
        if (model.dot(p.positive) < model.dot(p.negative)) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(pairs.size());
}

struct SplitResult {
    std::vector<LabeledPair> train;
    std::vector<LabeledPair> test;
};

/// Seeded shuffle partition. Stable across runs for equal seed; a pair is
/// atomic, so both of its charts land on the same side by construction.
inline SplitResult split(const std::vector<LabeledPair>& pairs, const SplitSpec& spec) {
    if (pairs.empty()) throw Error("split: empty pair list");
    if (!(spec.train_fraction > 0.0) || spec.train_fraction > 1.0)
        throw Error("split: train_fraction must be in (0, 1]");
    std::vector<std::size_t> order = shuffled_indices(pairs.size(), spec.seed);
    std::size_t n_train = static_cast<std::size_t>(
        std::llround(spec.train_fraction * static_cast<double>(pairs.size())));
    n_train = std::min(n_train, pairs.size());
    SplitResult result;
    for (std::size_t i = 0; i < pairs.size(); ++i)
        (i < n_train ? result.train : result.test).push_back(pairs[order[i]]);
    return result;
}

struct CrossValidation {
    double best_C = 0.0;
    std::vector<std::pair<double, double>> per_C_accuracy; // (C, mean fold accuracy)
};

/// Deterministic k-fold grid search. Fold assignment is a seeded shuffle cut
/// into k contiguous slices; best_C maximizes mean fold accuracy, ties broken
/// toward smaller C. The grid must be strictly increasing.
inline CrossValidation cross_validate(const std::vector<LabeledPair>& pairs,
                                      const SplitSpec& spec) {
    if (spec.folds < 2) throw Error("cross_validate: folds must be >= 2");
    if (pairs.size() < static_cast<std::size_t>(spec.folds))
        throw Error("cross_validate: fewer pairs than folds");
    if (spec.grid.empty()) throw Error("cross_validate: empty grid");
    for (std::size_t i = 1; i < spec.grid.size(); ++i)
        if (!(spec.grid[i - 1] < spec.grid[i]))
            throw Error("cross_validate: grid must be strictly increasing");

    std::vector<std::size_t> order = shuffled_indices(pairs.size(), spec.seed);
    const std::size_t k = static_cast<std::size_t>(spec.folds);

    CrossValidation result;
    for (double C : spec.grid) {
        double accuracy_sum = 0.0;
        for (std::size_t fold = 0; fold < k; ++fold) {
            std::size_t lo = fold * pairs.size() / k;
            std::size_t hi = (fold + 1) * pairs.size() / k;
            std::vector<LabeledPair> train_fold, held;
            for (std::size_t i = 0; i < pairs.size(); ++i)
                (i >= lo && i < hi ? held : train_fold).push_back(pairs[order[i]]);
            PreferenceModel model = train(train_fold, C, spec.seed);
            accuracy_sum += rank_accuracy(model, held);
        }
        result.per_C_accuracy.emplace_back(C, accuracy_sum / static_cast<double>(k));
    }
    double best = -1.0;
    for (const auto& [C, acc] : result.per_C_accuracy)
        if (acc > best) {
            best = acc;
            result.best_C = C;
        }
    return result;
}

// --- model persistence -------------------------------------------------------

/// JSON document: {catalog_hash, weights: [{name, weight}], regularization,
/// training_meta}; weight list ordered by catalog order.
inline nlohmann::json model_to_json(const PreferenceModel& model,
                                    const ConstraintCatalog& catalog) {
    if (model.catalog_hash != catalog.catalog_hash)
        throw Error("model_to_json: catalog mismatch");
    std::vector<std::string> names = catalog.soft_names();
    if (names.size() != model.weights.size())
        throw Error("model_to_json: weight count does not match catalog");
    nlohmann::json weights = nlohmann::json::array();
    for (std::size_t i = 0; i < names.size(); ++i)
        weights.push_back({{"name", names[i]}, {"weight", model.weights[i]}});
    nlohmann::json meta = {{"pair_count", model.training_meta.pair_count},
                           {"seed", model.training_meta.seed}};
    if (model.training_meta.cv_accuracy) meta["cv_accuracy"] = *model.training_meta.cv_accuracy;
    if (model.training_meta.test_accuracy)
        meta["test_accuracy"] = *model.training_meta.test_accuracy;
    nlohmann::json doc = {{"catalog_hash", model.catalog_hash},
                          {"weights", weights},
                          {"regularization", model.regularization},
                          {"training_meta", meta}};
    if (!model.model_id.empty()) doc["model_id"] = model.model_id;
    return doc;
}

inline PreferenceModel model_from_json(const nlohmann::json& doc,
                                       const ConstraintCatalog& catalog) {
    PreferenceModel model;
    model.catalog_hash = doc.at("catalog_hash").get<std::string>();
    if (model.catalog_hash != catalog.catalog_hash)
        throw Error("model catalog_hash does not match the loaded catalog");
    std::vector<std::string> names = catalog.soft_names();
    const auto& weights = doc.at("weights");
    if (weights.size() != names.size())
        throw Error("model weight count does not match catalog");
    model.weights.resize(names.size());
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (weights[i].at("name").get<std::string>() != names[i])
            throw Error("model weight order does not match catalog at index " +
                        std::to_string(i));
        model.weights[i] = weights[i].at("weight").get<double>();
        if (!std::isfinite(model.weights[i]))
            throw Error("model weight not finite: " + names[i]);
    }
    model.regularization = doc.at("regularization").get<double>();
    if (doc.contains("training_meta")) {
        const auto& meta = doc["training_meta"];
        model.training_meta.pair_count = meta.value("pair_count", std::size_t{0});
        model.training_meta.seed = meta.value("seed", std::uint64_t{0});
        if (meta.contains("cv_accuracy"))
            model.training_meta.cv_accuracy = meta["cv_accuracy"].get<double>();
        if (meta.contains("test_accuracy"))
            model.training_meta.test_accuracy = meta["test_accuracy"].get<double>();
    }
    if (doc.contains("model_id")) model.model_id = doc["model_id"].get<std::string>();
    return model;
}

} // namespace vizpref
