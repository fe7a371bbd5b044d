// End-to-end extraction pipelines.
//
// Rank: judge every pair in both presentation orders, drop pairs whose
// verdicts conflict or fail to parse (the consistency filter), train on the
// survivors with an 80/20 split and cross-validated regularization, and
// account for every input pair in the report.
//
// Recommend: extract each pair's shared partial specification, ask the judge
// for an optimal completion, validate it, and build up to two training pairs
// per valid completion (completion positive vs. each original chart),
// dropping feature-identical ones. Training and accounting as in rank.

#pragma once

#include "corpus.hpp"
#include "design_space.hpp"
#include "dictionary.hpp"
#include "judge.hpp"
#include "learner.hpp"
#include "prompt.hpp"
#include "scorer.hpp"
#include "vega.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace vizpref {

struct RankReport {
    std::size_t input_pairs = 0;
    std::size_t consistent_agree_ref = 0;
    std::size_t consistent_disagree_ref = 0;
    std::size_t consistent_no_ref = 0; // consistent, but the pair carried no label
    std::size_t inconsistent = 0;
    // breakdown of inconsistent
    std::size_t both_chart_1 = 0;
    std::size_t both_chart_2 = 0;
    std::size_t unparseable = 0;

    std::size_t consistent() const {
        return consistent_agree_ref + consistent_disagree_ref + consistent_no_ref;
    }
};

struct RecommendReport {
    std::size_t input_pairs = 0;
    std::size_t valid = 0;
    std::map<std::string, std::size_t> invalid_by_reason;
    std::size_t pairs_built = 0;
    std::size_t pairs_removed_identical = 0;

    std::size_t invalid() const {
        std::size_t n = 0;
        for (const auto& [reason, count] : invalid_by_reason) n += count;
        return n;
    }
    double removal_rate() const {
        std::size_t considered = pairs_built + pairs_removed_identical;
        return considered == 0
                   ? 0.0
                   : static_cast<double>(pairs_removed_identical) / considered;
    }
};

struct PipelineReport {
    std::string kind; // "rank" | "recommend"
    RankReport rank;
    RecommendReport recommend;
};

inline nlohmann::json to_json(const PipelineReport& report) {
    if (report.kind == "rank") {
        const RankReport& r = report.rank;
        return {{"kind", "rank"},
                {"input_pairs", r.input_pairs},
                {"consistent_agree_ref", r.consistent_agree_ref},
                {"consistent_disagree_ref", r.consistent_disagree_ref},
                {"consistent_no_ref", r.consistent_no_ref},
                {"inconsistent", r.inconsistent},
                {"inconsistent_breakdown",
                 {{"both_chart_1", r.both_chart_1},
                  {"both_chart_2", r.both_chart_2},
                  {"unparseable", r.unparseable}}}};
    }
    const RecommendReport& r = report.recommend;
    return {{"kind", "recommend"},
            {"input_pairs", r.input_pairs},
            {"valid", r.valid},
            {"invalid_by_reason", r.invalid_by_reason},
            {"pairs_built", r.pairs_built},
            {"pairs_removed_identical", r.pairs_removed_identical},
            {"removal_rate", r.removal_rate()}};
}

inline std::string to_csv(const PipelineReport& report) {
    std::string out = "metric,count\n";
    auto row = [&out](const std::string& k, std::size_t v) {
        out += k + ',' + std::to_string(v) + '\n';
    };
    if (report.kind == "rank") {
        const RankReport& r = report.rank;
        row("input_pairs", r.input_pairs);
        row("consistent_agree_ref", r.consistent_agree_ref);
        row("consistent_disagree_ref", r.consistent_disagree_ref);
        row("consistent_no_ref", r.consistent_no_ref);
        row("inconsistent", r.inconsistent);
        row("inconsistent_both_chart_1", r.both_chart_1);
        row("inconsistent_both_chart_2", r.both_chart_2);
        row("inconsistent_unparseable", r.unparseable);
    } else {
        const RecommendReport& r = report.recommend;
        row("input_pairs", r.input_pairs);
        row("valid", r.valid);
        for (const auto& [reason, count] : r.invalid_by_reason)
            row("invalid_" + reason, count);
        row("pairs_built", r.pairs_built);
        row("pairs_removed_identical", r.pairs_removed_identical);
    }
    return out;
}

struct PipelineResult {
    PreferenceModel model;
    PipelineReport report;
    std::vector<LabeledPair> training_pairs;  // every surviving pair
    std::vector<ChartPair> training_chart_pairs; // same pairs, chart level
    CrossValidation cv;
};

/// Thrown when filtering leaves nothing to train on; carries the accounting
/// so callers can still report the outcome breakdown.
class PipelineDataError : public Error {
public:
    PipelineDataError(const std::string& what, PipelineReport report)
        : Error(what), report(std::move(report)) {}
    PipelineReport report;
};

namespace pipeline_detail {

/// Split, grid-search on the training side, final train on the full training
/// split, held-out accuracy on the rest.
inline void fit(PipelineResult& result, const SplitSpec& learner_spec,
                const std::string& model_id) {
    if (result.training_pairs.empty())
        throw PipelineDataError("pipeline: no training data (every pair was filtered out)",
                                result.report);
    SplitResult parts = split(result.training_pairs, learner_spec);
    result.cv = cross_validate(parts.train, learner_spec);
    double mean_cv = 0.0;
    for (const auto& [C, acc] : result.cv.per_C_accuracy)
        if (C == result.cv.best_C) mean_cv = acc;
    PreferenceModel model = train(parts.train, result.cv.best_C, learner_spec.seed);
    model.training_meta.cv_accuracy = mean_cv;
    if (!parts.test.empty())
        model.training_meta.test_accuracy = rank_accuracy(model, parts.test);
    model.model_id = model_id;
    result.model = std::move(model);
}

} // namespace pipeline_detail

/// Rank pipeline. Judges each pair in both orders through `session`,
/// filters inconsistent pairs, then fits. Pairs reference charts by index.
inline PipelineResult run_rank_pipeline(const std::vector<ChartSpec>& charts,
                                        const std::vector<CorpusPair>& pairs,
                                        JudgeSession& session,
                                        const std::string& rank_template,
                                        const ConstraintCatalog& catalog,
                                        const SplitSpec& learner_spec,
                                        const std::string& model_id = "rank") {
    if (pairs.empty()) throw Error("rank pipeline: no input pairs");

    std::vector<JudgeRequest> requests;
    requests.reserve(pairs.size() * 2);
    std::size_t seq = 0;
    for (const auto& pair : pairs) {
        const ChartSpec& a = charts.at(pair.a);
        const ChartSpec& b = charts.at(pair.b);
        if (!a.task) throw Error("rank pipeline: chart lacks task: " + a.source_id);
        for (PairOrder order : {PairOrder::original, PairOrder::swapped}) {
            const ChartSpec& slot1 = order == PairOrder::original ? a : b;
            const ChartSpec& slot2 = order == PairOrder::original ? b : a;
            JudgeRequest request;
            request.kind = JudgeKind::rank;
            request.task = *a.task;
            request.pair_id = pair.pair_id;
            request.order = order;
            request.request_id = "r" + std::to_string(seq++);
            request.slot1 = slot1;
            request.slot2 = slot2;
            request.payload = render_rank_prompt(rank_template, slot1, slot2, *a.task);
            requests.push_back(std::move(request));
        }
    }
    std::vector<JudgeResponse> responses = session.judge_batch(requests);

    PipelineResult result;
    result.report.kind = "rank";
    RankReport& report = result.report.rank;
    report.input_pairs = pairs.size();

    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const CorpusPair& pair = pairs[i];
        const JudgeResponse& original = responses[2 * i];
        const JudgeResponse& swapped = responses[2 * i + 1];
        RankAnswer first = original.parsed;
        RankAnswer second = swapped.parsed;

        if (first == RankAnswer::unparseable || second == RankAnswer::unparseable) {
            ++report.inconsistent;
            ++report.unparseable;
            continue;
        }
        // Consistent iff both orders name the same underlying chart:
        // original "Chart 1" pairs with swapped "Chart 2" and vice versa.
        if (first == second) {
            ++report.inconsistent;
            (first == RankAnswer::chart_1 ? report.both_chart_1 : report.both_chart_2)++;
            continue;
        }
        bool a_wins = first == RankAnswer::chart_1;
        const ChartSpec& positive = a_wins ? charts.at(pair.a) : charts.at(pair.b);
        const ChartSpec& negative = a_wins ? charts.at(pair.b) : charts.at(pair.a);
        if (pair.ref) {
            bool agrees = (*pair.ref == RefLabel::a_positive) == a_wins;
            (agrees ? report.consistent_agree_ref : report.consistent_disagree_ref)++;
        } else {
            ++report.consistent_no_ref;
        }
        result.training_pairs.emplace_back(featurize(catalog, positive),
                                           featurize(catalog, negative), pair.pair_id,
                                           Provenance::judge_rank);
        result.training_chart_pairs.push_back(ChartPair{positive, negative, pair.pair_id});
    }

    pipeline_detail::fit(result, learner_spec, model_id);
    return result;
}

/// Recommend pipeline. Per pair: shared partial, judged completion,
/// validation, then up to two training pairs with feature-identical ones
/// dropped.
inline PipelineResult run_recommend_pipeline(const std::vector<ChartSpec>& charts,
                                             const std::vector<CorpusPair>& pairs,
                                             JudgeSession& session,
                                             const std::string& recommend_template,
                                             CompletionFormat format,
                                             const ConstraintCatalog& catalog,
                                             const SplitSpec& learner_spec,
                                             const std::string& model_id = "recommend") {
    if (pairs.empty()) throw Error("recommend pipeline: no input pairs");

    std::vector<JudgeRequest> requests;
    std::vector<ChartSpec> partials;
    requests.reserve(pairs.size());
    partials.reserve(pairs.size());
    std::size_t seq = 0;
    for (const auto& pair : pairs) {
        const ChartSpec& a = charts.at(pair.a);
        const ChartSpec& b = charts.at(pair.b);
        ChartSpec partial = extract_partial(a, b);
        JudgeRequest request;
        request.kind = JudgeKind::recommend;
        request.task = *a.task;
        request.pair_id = pair.pair_id;
        request.format = format;
        request.request_id = "r" + std::to_string(seq++);
        request.partial = partial;
        request.payload =
            render_recommend_prompt(recommend_template, partial, *a.task, format);
        requests.push_back(std::move(request));
        partials.push_back(std::move(partial));
    }
    std::vector<JudgeResponse> responses = session.judge_batch(requests);

    PipelineResult result;
    result.report.kind = "recommend";
    RecommendReport& report = result.report.recommend;
    report.input_pairs = pairs.size();

    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const CorpusPair& pair = pairs[i];
        CompletionVerdict verdict =
            validate_completion(catalog, partials[i], responses[i].completion_text, format);
        if (verdict.status != CompletionStatus::valid) {
            ++report.invalid_by_reason[to_string(verdict.status)];
            continue;
        }
        ++report.valid;
        const ChartSpec& completion = *verdict.chart;
        FeatureVector completion_features = featurize(catalog, completion);
        int suffix = 0;
        for (std::size_t negative_index : {pair.a, pair.b}) {
            const ChartSpec& negative = charts.at(negative_index);
            FeatureVector negative_features = featurize(catalog, negative);
            ++suffix;
            if (negative_features.counts == completion_features.counts) {
                ++report.pairs_removed_identical;
                continue;
            }
            std::string pair_id = pair.pair_id + (suffix == 1 ? "/a" : "/b");
            result.training_pairs.emplace_back(completion_features, negative_features,
                                               pair_id, Provenance::judge_recommend);
            ChartSpec positive = completion;
            positive.source_id = "completion(" + pair.pair_id + ")";
            result.training_chart_pairs.push_back(
                ChartPair{std::move(positive), negative, pair_id});
            ++report.pairs_built;
        }
    }

    if (report.valid == 0)
        throw PipelineDataError("recommend pipeline: zero valid completions",
                                result.report);
    pipeline_detail::fit(result, learner_spec, model_id);
    return result;
}

// --- labeled-pair interchange ---------------------------------------------------
//
// JSONL, one object per line:
//   {pair_id, positive: <dictionary text>, negative: <dictionary text>, provenance}

inline std::string labeled_pairs_to_jsonl(const std::vector<ChartPair>& pairs,
                                          const std::vector<LabeledPair>& labeled) {
    if (pairs.size() != labeled.size())
        throw Error("labeled_pairs_to_jsonl: chart/vector pair count mismatch");
    std::string out;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        nlohmann::json j = {{"pair_id", labeled[i].pair_id},
                            {"positive", serialize_dictionary(pairs[i].positive)},
                            {"negative", serialize_dictionary(pairs[i].negative)},
                            {"provenance", to_string(labeled[i].provenance)}};
        out += j.dump() + '\n';
    }
    return out;
}

struct LoadedPairs {
    std::vector<LabeledPair> labeled;
    std::vector<ChartPair> chart_pairs;
};

inline LoadedPairs labeled_pairs_from_jsonl(const std::string& text,
                                            const ConstraintCatalog& catalog) {
    LoadedPairs out;
    std::size_t pos = 0;
    int line_no = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string line =
            text.substr(pos, eol == std::string::npos ? std::string::npos : eol - pos);
        pos = eol == std::string::npos ? text.size() : eol + 1;
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw Error("labeled pairs line " + std::to_string(line_no) +
                        ": invalid JSON");
        ChartPair cp;
        cp.pair_id = j.at("pair_id").get<std::string>();
        cp.positive = parse_dictionary(j.at("positive").get<std::string>());
        cp.negative = parse_dictionary(j.at("negative").get<std::string>());
        out.labeled.emplace_back(featurize(catalog, cp.positive),
                                 featurize(catalog, cp.negative), cp.pair_id,
                                 provenance_from_string(j.at("provenance").get<std::string>()));
        out.chart_pairs.push_back(std::move(cp));
    }
    return out;
}

} // namespace vizpref
