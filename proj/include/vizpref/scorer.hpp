// Chart cost computation, pairwise ranking, feature-vector deduplication, and
// the preference-assessment analyses: encoding distributions, constraint-count
// divergence, weight comparison, and cost correlation between models.
//
// Analysis tables serialize to CSV with fixed column order plus a JSON
// mirror; see docs/report-schemas.md.

#pragma once

#include "catalog.hpp"
#include "chart.hpp"
#include "learner.hpp"

#include <nlohmann/json.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace vizpref {

/// Costs within this tolerance compare as tied; learned weights are floats,
/// exact equality would be brittle.
inline constexpr double kCostTieTolerance = 1e-9;

struct CostContribution {
    std::string name;
    double weight = 0.0;
    int count = 0;
    double product = 0.0;
};

struct CostReport {
    std::string source_id;
    FeatureVector feature_vector;
    double cost = 0.0; // sum of per-constraint products
    std::vector<CostContribution> per_constraint_contribution;
};

/// cost = dot(weights, featurize(chart)), with the exact breakdown.
inline CostReport cost(const PreferenceModel& model, const ConstraintCatalog& catalog,
                       const ChartSpec& chart) {
    if (model.catalog_hash != catalog.catalog_hash)
        throw Error("cost: model/catalog mismatch");
    CostReport report;
    report.source_id = chart.source_id;
    report.feature_vector = featurize(catalog, chart); // throws on hard violation
    std::vector<std::string> names = catalog.soft_names();
    double total = 0.0;
    for (std::size_t i = 0; i < names.size(); ++i) {
        CostContribution c;
        c.name = names[i];
        c.weight = model.weights[i];
        c.count = report.feature_vector.counts[i];
        c.product = c.weight * c.count;
        total += c.product;
        report.per_constraint_contribution.push_back(std::move(c));
    }
    report.cost = total;
    return report;
}

enum class PairWinner { a, b, tie };

struct RankVerdict {
    PairWinner winner = PairWinner::tie;
    double cost_a = 0.0;
    double cost_b = 0.0;
};

/// Lower cost wins; |cost_a - cost_b| < 1e-9 is a tie.
inline RankVerdict rank_pair(const PreferenceModel& model,
                             const ConstraintCatalog& catalog, const ChartSpec& chart_a,
                             const ChartSpec& chart_b) {
    RankVerdict v;
    v.cost_a = cost(model, catalog, chart_a).cost;
    v.cost_b = cost(model, catalog, chart_b).cost;
    if (std::abs(v.cost_a - v.cost_b) < kCostTieTolerance) v.winner = PairWinner::tie;
    else v.winner = v.cost_a < v.cost_b ? PairWinner::a : PairWinner::b;
    return v;
}

/// One representative per distinct feature vector: the lexicographically
/// smallest source_id; output in first-occurrence order.
inline std::vector<ChartSpec> dedup_by_features(const ConstraintCatalog& catalog,
                                                const std::vector<ChartSpec>& charts) {
    std::map<std::vector<int>, std::size_t> seen; // counts -> output slot
    std::vector<ChartSpec> out;
    for (const auto& chart : charts) {
        FeatureVector fv = featurize(catalog, chart);
        auto it = seen.find(fv.counts);
        if (it == seen.end()) {
            seen.emplace(fv.counts, out.size());
            out.push_back(chart);
        } else if (chart.source_id < out[it->second].source_id) {
            out[it->second] = chart;
        }
    }
    return out;
}

struct CorrelationRow {
    std::string subset; // "all", "value", "summary"
    std::size_t n = 0;
    bool defined = false; // false when n < 3 or a side has zero variance
    double r = 0.0;
    double p_value = 1.0;
};

struct AlignmentReport {
    std::string model_a;
    std::string model_b;
    std::size_t n_distinct = 0;
    double pearson_r = 0.0;
    double p_value = 1.0;
    bool defined = false;
    std::vector<CorrelationRow> per_task;
};

namespace analysis_detail {

/// Pearson r via the closed-form single-pass sums, p two-sided from the
/// Student-t transform with n-2 degrees of freedom.
inline CorrelationRow correlate(const std::string& subset,
                                const std::vector<double>& xs,
                                const std::vector<double>& ys) {
    CorrelationRow row;
    row.subset = subset;
    row.n = xs.size();
    if (xs.size() < 3) return row;
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        syy += ys[i] * ys[i];
        sxy += xs[i] * ys[i];
    }
    double var_x = sxx - sx * sx / n;
    double var_y = syy - sy * sy / n;
    if (var_x <= 0.0 || var_y <= 0.0) return row; // zero variance: r undefined
    double r = (sxy - sx * sy / n) / std::sqrt(var_x * var_y);
    r = std::clamp(r, -1.0, 1.0);
    row.defined = true;
    row.r = r;
    double df = n - 2.0;
    if (1.0 - r * r < 1e-15) {
        row.p_value = 0.0;
    } else {
        double t = r * std::sqrt(df / (1.0 - r * r));
        boost::math::students_t_distribution<double> dist(df);
        row.p_value = 2.0 * boost::math::cdf(dist, -std::abs(t));
    }
    return row;
}

} // namespace analysis_detail

/// Pearson correlation of chart costs under two models, over the
/// feature-deduplicated charts, pooled and per task. Requires >= 3 distinct
/// feature vectors; zero cost variance in either model is reported as an
/// undefined (flagged) correlation, not an error.
inline AlignmentReport cost_correlation(const PreferenceModel& model_a,
                                        const PreferenceModel& model_b,
                                        const ConstraintCatalog& catalog,
                                        const std::vector<ChartSpec>& charts) {
    if (model_a.catalog_hash != model_b.catalog_hash)
        throw Error("cost_correlation: models bind different catalogs");
    if (model_a.catalog_hash != catalog.catalog_hash)
        throw Error("cost_correlation: model/catalog mismatch");

    std::vector<ChartSpec> distinct = dedup_by_features(catalog, charts);
    AlignmentReport report;
    report.model_a = model_a.model_id.empty() ? "model_a" : model_a.model_id;
    report.model_b = model_b.model_id.empty() ? "model_b" : model_b.model_id;
    report.n_distinct = distinct.size();
    if (distinct.size() < 3)
        throw Error("cost_correlation: fewer than 3 distinct feature vectors");

    auto costs_of = [&](const PreferenceModel& m, std::optional<Task> task_filter) {
        std::vector<double> out;
        for (const auto& chart : distinct) {
            if (task_filter && chart.task != *task_filter) continue;
            out.push_back(cost(m, catalog, chart).cost);
        }
        return out;
    };

    CorrelationRow all = analysis_detail::correlate("all", costs_of(model_a, {}),
                                                    costs_of(model_b, {}));
    report.pearson_r = all.r;
    report.p_value = all.p_value;
    report.defined = all.defined;
    for (Task task : {Task::value, Task::summary})
        report.per_task.push_back(analysis_detail::correlate(
            to_string(task), costs_of(model_a, task), costs_of(model_b, task)));
    return report;
}

// --- training-pair analyses ---------------------------------------------------
//
// These operate on chart-level pairs (positive first), since encoding
// signatures and per-constraint tallies need the charts, not just vectors.

struct ChartPair {
    ChartSpec positive;
    ChartSpec negative;
    std::string pair_id;
};

struct CountDivergenceRow {
    std::string constraint;
    long positive_count_a = 0;
    long negative_count_a = 0;
    long positive_count_b = 0;
    long negative_count_b = 0;
};

/// Per-constraint satisfaction tallies within positive vs negative examples
/// for two pair sources, optionally restricted to a pair-id subset (e.g. the
/// disagreement set).
inline std::vector<CountDivergenceRow> count_divergence(
    const ConstraintCatalog& catalog, const std::vector<ChartPair>& pairs_a,
    const std::vector<ChartPair>& pairs_b,
    const std::set<std::string>* pair_id_subset = nullptr) {
    std::vector<std::string> names = catalog.soft_names();
    std::vector<CountDivergenceRow> rows(names.size());
    for (std::size_t i = 0; i < names.size(); ++i) rows[i].constraint = names[i];

    auto tally = [&](const std::vector<ChartPair>& pairs, bool is_a) {
        for (const auto& pair : pairs) {
            if (pair_id_subset != nullptr && pair_id_subset->count(pair.pair_id) == 0)
                continue;
            FeatureVector pos = featurize(catalog, pair.positive);
            FeatureVector neg = featurize(catalog, pair.negative);
            for (std::size_t i = 0; i < names.size(); ++i) {
                if (is_a) {
                    rows[i].positive_count_a += pos.counts[i];
                    rows[i].negative_count_a += neg.counts[i];
                } else {
                    rows[i].positive_count_b += pos.counts[i];
                    rows[i].negative_count_b += neg.counts[i];
                }
            }
        }
    };
    tally(pairs_a, true);
    tally(pairs_b, false);
    return rows;
}

struct WeightComparisonRow {
    std::string constraint;
    std::vector<double> weights;   // one per model, input order
    bool sign_agreement = false;   // all nonzero weights share a sign
    bool no_preference = false;    // every model has weight zero here
};

inline std::vector<WeightComparisonRow> weight_comparison(
    const ConstraintCatalog& catalog, const std::vector<PreferenceModel>& models) {
    if (models.empty()) throw Error("weight_comparison: no models");
    for (const auto& m : models)
        if (m.catalog_hash != catalog.catalog_hash)
            throw Error("weight_comparison: model/catalog mismatch");
    std::vector<std::string> names = catalog.soft_names();
    std::vector<WeightComparisonRow> rows;
    for (std::size_t i = 0; i < names.size(); ++i) {
        WeightComparisonRow row;
        row.constraint = names[i];
        bool saw_pos = false, saw_neg = false;
        for (const auto& m : models) {
            double w = m.weights[i];
            row.weights.push_back(w);
            if (w > 0) saw_pos = true;
            if (w < 0) saw_neg = true;
        }
        row.sign_agreement = !(saw_pos && saw_neg);
        row.no_preference = !saw_pos && !saw_neg;
        rows.push_back(std::move(row));
    }
    return rows;
}

struct EncodingDistributionRow {
    std::string encoding_signature; // "n:color q1:x q2:y"; fields sorted by name
    Task task = Task::value;
    long positive_count = 0;
    long negative_count = 0;
};

/// Distribution of positive and negative examples by encoding signature and
/// task. Rows sorted by (task, signature); each pair contributes one positive
/// and one negative tally.
inline std::vector<EncodingDistributionRow> encoding_distribution(
    const std::vector<ChartPair>& pairs) {
    std::map<std::pair<std::string, std::string>, EncodingDistributionRow> acc;
    auto add = [&](const ChartSpec& chart, bool positive) {
        if (!chart.task) throw Error("encoding_distribution: chart lacks a task");
        auto key = std::make_pair(to_string(*chart.task), encoding_signature(chart));
        auto& row = acc[key];
        row.encoding_signature = key.second;
        row.task = *chart.task;
        (positive ? row.positive_count : row.negative_count) += 1;
    };
    for (const auto& pair : pairs) {
        add(pair.positive, true);
        add(pair.negative, false);
    }
    std::vector<EncodingDistributionRow> rows;
    for (auto& [key, row] : acc) rows.push_back(std::move(row));
    return rows;
}

// --- table serialization --------------------------------------------------------

namespace analysis_detail {

inline std::string csv_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

} // namespace analysis_detail

inline std::string to_csv(const AlignmentReport& report) {
    std::string out = "model_a,model_b,subset,n,defined,pearson_r,p_value\n";
    auto line = [&](const CorrelationRow& row) {
        out += report.model_a + ',' + report.model_b + ',' + row.subset + ',' +
               std::to_string(row.n) + ',' + (row.defined ? "true" : "false") + ',' +
               (row.defined ? analysis_detail::csv_double(row.r) : "") + ',' +
               (row.defined ? analysis_detail::csv_double(row.p_value) : "") + '\n';
    };
    CorrelationRow all;
    all.subset = "all";
    all.n = report.n_distinct;
    all.defined = report.defined;
    all.r = report.pearson_r;
    all.p_value = report.p_value;
    line(all);
    for (const auto& row : report.per_task) line(row);
    return out;
}

inline nlohmann::json to_json(const AlignmentReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : report.per_task) {
        nlohmann::json j = {{"subset", row.subset}, {"n", row.n}, {"defined", row.defined}};
        if (row.defined) {
            j["pearson_r"] = row.r;
            j["p_value"] = row.p_value;
        }
        rows.push_back(j);
    }
    nlohmann::json doc = {{"model_a", report.model_a},
                          {"model_b", report.model_b},
                          {"n_distinct", report.n_distinct},
                          {"defined", report.defined},
                          {"per_task", rows}};
    if (report.defined) {
        doc["pearson_r"] = report.pearson_r;
        doc["p_value"] = report.p_value;
    }
    return doc;
}

inline std::string to_csv(const std::vector<CountDivergenceRow>& rows) {
    std::string out =
        "constraint,positive_count_a,negative_count_a,positive_count_b,negative_count_b\n";
    for (const auto& r : rows)
        out += r.constraint + ',' + std::to_string(r.positive_count_a) + ',' +
               std::to_string(r.negative_count_a) + ',' + std::to_string(r.positive_count_b) +
               ',' + std::to_string(r.negative_count_b) + '\n';
    return out;
}

inline nlohmann::json to_json(const std::vector<CountDivergenceRow>& rows) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : rows)
        out.push_back({{"constraint", r.constraint},
                       {"positive_count_a", r.positive_count_a},
                       {"negative_count_a", r.negative_count_a},
                       {"positive_count_b", r.positive_count_b},
                       {"negative_count_b", r.negative_count_b}});
    return out;
}

inline std::string to_csv(const std::vector<WeightComparisonRow>& rows,
                          const std::vector<std::string>& model_ids) {
    std::string out = "constraint";
    for (const auto& id : model_ids) out += ",weight_" + id;
    out += ",sign_agreement,no_preference\n";
    for (const auto& r : rows) {
        out += r.constraint;
        for (double w : r.weights) out += ',' + analysis_detail::csv_double(w);
        out += std::string(",") + (r.sign_agreement ? "true" : "false") + ',' +
               (r.no_preference ? "true" : "false") + '\n';
    }
    return out;
}

inline nlohmann::json to_json(const std::vector<WeightComparisonRow>& rows,
                              const std::vector<std::string>& model_ids) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json weights = nlohmann::json::object();
        for (std::size_t i = 0; i < model_ids.size(); ++i)
            weights[model_ids[i]] = r.weights[i];
        out.push_back({{"constraint", r.constraint},
                       {"weights", weights},
                       {"sign_agreement", r.sign_agreement},
                       {"no_preference", r.no_preference}});
    }
    return out;
}

inline std::string to_csv(const std::vector<EncodingDistributionRow>& rows) {
    std::string out = "encoding_signature,task,positive_count,negative_count\n";
    for (const auto& r : rows)
        out += r.encoding_signature + ',' + to_string(r.task) + ',' +
               std::to_string(r.positive_count) + ',' + std::to_string(r.negative_count) +
               '\n';
    return out;
}

inline nlohmann::json to_json(const std::vector<EncodingDistributionRow>& rows) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& r : rows)
        out.push_back({{"encoding_signature", r.encoding_signature},
                       {"task", to_string(r.task)},
                       {"positive_count", r.positive_count},
                       {"negative_count", r.negative_count}});
    return out;
}

inline nlohmann::json to_json(const CostReport& report) {
    nlohmann::json contributions = nlohmann::json::array();
    for (const auto& c : report.per_constraint_contribution)
        contributions.push_back({{"name", c.name},
                                 {"weight", c.weight},
                                 {"count", c.count},
                                 {"product", c.product}});
    return {{"source_id", report.source_id},
            {"cost", report.cost},
            {"counts", report.feature_vector.counts},
            {"catalog_hash", report.feature_vector.catalog_hash},
            {"contributions", contributions}};
}

inline std::string to_csv(const std::vector<CostReport>& reports) {
    std::string out = "source_id,cost,constraint,weight,count,product\n";
    for (const auto& report : reports)
        for (const auto& c : report.per_constraint_contribution)
            out += report.source_id + ',' + analysis_detail::csv_double(report.cost) + ',' +
                   c.name + ',' + analysis_detail::csv_double(c.weight) + ',' +
                   std::to_string(c.count) + ',' + analysis_detail::csv_double(c.product) +
                   '\n';
    return out;
}

} // namespace vizpref
