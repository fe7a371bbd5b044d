#include "helpers.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>

using namespace vizpref;

namespace {

/// Hidden ground truth for recovery experiments: generic decimals over the
/// constraints the default corpus exercises, both signs represented.
PreferenceModel hidden_ground_truth(const ConstraintCatalog& catalog) {
    PreferenceModel m;
    m.catalog_hash = catalog.catalog_hash;
    m.weights.assign(catalog.soft_count(), 0.0);
    auto set = [&](const char* name, double w) {
        int idx = catalog.soft_index(name);
        REQUIRE(idx >= 0);
        m.weights[static_cast<std::size_t>(idx)] = w;
    };
    set("interesting_x", -1.9641);
    set("interesting_y", -0.8377);
    set("interesting_color", 0.7143);
    set("interesting_size", 1.2833);
    set("interesting_row", 0.3881);
    set("linear_x", 0.4693);
    set("linear_y", -0.6841);
    set("linear_color", 1.0517);
    set("linear_size", 1.4379);
    set("categorical_x", 0.2197);
    set("categorical_y", -0.1831);
    set("categorical_color", -0.4373);
    set("value_facet", 0.5923);
    set("summary_facet", -1.2741);
    set("value_continuous_x", -1.0551);
    set("value_continuous_color", 0.6029);
    set("value_continuous_size", 0.8341);
    set("summary_continuous_x", -0.3511);
    set("summary_continuous_color", 0.9517);
    set("summary_continuous_size", 1.7329);
    set("x_entropy_low", -0.5107);
    set("y_entropy_low", -0.2113);
    set("color_entropy_low", 0.3209);
    set("size_entropy_low", 0.2731);
    m.model_id = "ground-truth";
    return m;
}

CorpusSpec small_corpus_spec() {
    CorpusSpec spec;
    spec.data_variants.entropy_bins = {Bin::low, Bin::high};
    spec.data_variants.cardinality_bins = {Bin::high};
    return spec;
}

JudgeSession oracle_session(const ConstraintCatalog& catalog, const PreferenceModel& gt,
                            double bias, std::uint64_t noise_seed = 0,
                            int in_flight = 1) {
    return JudgeSession(
        std::make_unique<OracleJudge>(OracleConfig{gt, bias, noise_seed}, catalog),
        in_flight);
}

std::string rank_tpl() {
    return testutil::read_file(testutil::asset_path("templates/rank.txt"));
}
std::string recommend_tpl() {
    return testutil::read_file(testutil::asset_path("templates/recommend.txt"));
}

} // namespace

TEST_CASE("rank pipeline: oracle recovery on a reduced corpus") {
    auto catalog = testutil::builtin_catalog();
    PreferenceModel gt = hidden_ground_truth(catalog);
    Corpus corpus = generate_corpus(small_corpus_spec(), catalog, &gt);
    JudgeSession session = oracle_session(catalog, gt, 0.0);

    SplitSpec learner_spec;
    learner_spec.seed = 42;
    PipelineResult result = run_rank_pipeline(corpus.charts, corpus.pairs, session,
                                              rank_tpl(), catalog, learner_spec, "rank");

    const RankReport& report = result.report.rank;
    CHECK(report.input_pairs == corpus.pairs.size());
    // outcome counts partition the input set
    CHECK(report.consistent() + report.inconsistent == report.input_pairs);
    CHECK(report.both_chart_1 + report.both_chart_2 + report.unparseable ==
          report.inconsistent);
    // reference labels came from the same ground truth: every consistent pair agrees
    CHECK(report.consistent_disagree_ref == 0);
    CHECK(report.consistent_no_ref == 0);

    // bias-0 oracle: the excluded pairs are exactly the ground-truth cost ties
    std::size_t tie_census = 0;
    for (const auto& pair : corpus.pairs) {
        double diff = testutil::naive_cost(gt, catalog, corpus.charts[pair.a]) -
                      testutil::naive_cost(gt, catalog, corpus.charts[pair.b]);
        if (std::abs(diff) < kCostTieTolerance) ++tie_census;
    }
    CHECK(report.inconsistent == tie_census);

    REQUIRE(result.model.training_meta.test_accuracy.has_value());
    CHECK(*result.model.training_meta.test_accuracy >= 0.95);
    CHECK(result.model.training_meta.cv_accuracy.has_value());
    CHECK(result.model.model_id == "rank");

    // transcript carries two records per pair, committed in request order
    const auto& records = session.transcript().records();
    REQUIRE(records.size() == corpus.pairs.size() * 2);
    for (std::size_t i = 0; i < records.size(); ++i)
        REQUIRE(records[i].request_id == "r" + std::to_string(i));
}

TEST_CASE("rank pipeline: bias 1 reports 100% both_chart_1 and fails for lack of data") {
    auto catalog = testutil::builtin_catalog();
    PreferenceModel gt = hidden_ground_truth(catalog);
    CorpusSpec spec = small_corpus_spec();
    spec.data_variants.entropy_bins = {Bin::low};
    Corpus corpus = generate_corpus(spec, catalog, &gt);
    JudgeSession session = oracle_session(catalog, gt, 1.0, 5);
    SplitSpec learner_spec;
    try {
        run_rank_pipeline(corpus.charts, corpus.pairs, session, rank_tpl(), catalog,
                          learner_spec);
        FAIL("expected PipelineDataError");
    } catch (const PipelineDataError& e) {
        CHECK(std::string(e.what()).find("no training data") != std::string::npos);
        const RankReport& report = e.report.rank;
        CHECK(report.inconsistent == report.input_pairs);
        CHECK(report.both_chart_1 == report.input_pairs);
        CHECK(report.both_chart_2 == 0);
    }
}

TEST_CASE("rank pipeline: all-tie ground truth excludes every pair as both_chart_1") {
    auto catalog = testutil::builtin_catalog();
    PreferenceModel zeros;
    zeros.catalog_hash = catalog.catalog_hash;
    zeros.weights.assign(catalog.soft_count(), 0.0);
    CorpusSpec spec = small_corpus_spec();
    spec.data_variants.entropy_bins = {Bin::low};
    Corpus corpus = generate_corpus(spec, catalog, &zeros);
    JudgeSession session = oracle_session(catalog, zeros, 0.0);
    SplitSpec learner_spec;
    try {
        run_rank_pipeline(corpus.charts, corpus.pairs, session, rank_tpl(), catalog,
                          learner_spec);
        FAIL("expected PipelineDataError");
    } catch (const PipelineDataError& e) {
        const RankReport& report = e.report.rank;
        CHECK(report.inconsistent == report.input_pairs);
        CHECK(report.both_chart_1 == report.input_pairs); // ties resolve to slot 1
    }
}

TEST_CASE("rank pipeline: partially tied ground truth matches the tie census") {
    auto catalog = testutil::builtin_catalog();
    PreferenceModel sparse;
    sparse.catalog_hash = catalog.catalog_hash;
    sparse.weights.assign(catalog.soft_count(), 0.0);
    sparse.weights[static_cast<std::size_t>(catalog.soft_index("interesting_x"))] = -1.0;
    CorpusSpec spec = small_corpus_spec();
    spec.data_variants.entropy_bins = {Bin::low};
    Corpus corpus = generate_corpus(spec, catalog, &sparse);
    JudgeSession session = oracle_session(catalog, sparse, 0.0);
    SplitSpec learner_spec;
    learner_spec.seed = 9;

    std::size_t tie_census = 0;
    for (const auto& pair : corpus.pairs) {
        double diff = testutil::naive_cost(sparse, catalog, corpus.charts[pair.a]) -
                      testutil::naive_cost(sparse, catalog, corpus.charts[pair.b]);
        if (std::abs(diff) < kCostTieTolerance) ++tie_census;
    }
    REQUIRE(tie_census > 0); // the sparse model really does tie some designs

    PipelineResult result = run_rank_pipeline(corpus.charts, corpus.pairs, session,
                                              rank_tpl(), catalog, learner_spec);
    CHECK(result.report.rank.inconsistent == tie_census);
    CHECK(result.report.rank.both_chart_1 == tie_census);
}

TEST_CASE("consistency filter soundness: survivors match cross-order agreement") {
    auto catalog = testutil::builtin_catalog();
    PreferenceModel gt = hidden_ground_truth(catalog);
    CorpusSpec spec = small_corpus_spec();
    spec.data_variants.entropy_bins = {Bin::high};
    Corpus corpus = generate_corpus(spec, catalog, &gt);
    // moderate positional bias: some overrides collide with the cost signal
    JudgeSession session = oracle_session(catalog, gt, 0.35, 99);
    SplitSpec learner_spec;
    PipelineResult result = run_rank_pipeline(corpus.charts, corpus.pairs, session,
                                              rank_tpl(), catalog, learner_spec);

    // reconstruct from the transcript: a pair survives iff the two orders
    // name the same underlying chart
    std::map<std::string, std::vector<std::string>> by_pair;
    for (const auto& r : session.transcript().records())
        by_pair[r.pair_id].push_back(r.parsed);
    std::size_t survivors = 0;
    for (const auto& [pair_id, answers] : by_pair) {
        REQUIRE(answers.size() == 2);
        if (answers[0] != answers[1]) ++survivors; // original C1 + swapped C2, or C2+C1
    }
    CHECK(result.training_pairs.size() == survivors);
    CHECK(result.report.rank.consistent() == survivors);
}

TEST_CASE("recommend pipeline: oracle completions are all valid; removals match argmin") {
    auto catalog = testutil::builtin_catalog();
    PreferenceModel gt = hidden_ground_truth(catalog);
    CorpusSpec spec = small_corpus_spec();
    spec.data_variants.entropy_bins = {Bin::low};
    Corpus corpus = generate_corpus(spec, catalog, &gt);
    JudgeSession session = oracle_session(catalog, gt, 0.0);
    SplitSpec learner_spec;
    learner_spec.seed = 21;

    PipelineResult result =
        run_recommend_pipeline(corpus.charts, corpus.pairs, session, recommend_tpl(),
                               CompletionFormat::vegalite, catalog, learner_spec,
                               "recommend");
    const RecommendReport& report = result.report.recommend;
    CHECK(report.input_pairs == corpus.pairs.size());
    CHECK(report.valid == corpus.pairs.size()); // the oracle only emits valid completions
    CHECK(report.invalid() == 0);
    CHECK(report.pairs_built + report.pairs_removed_identical == 2 * report.valid);

    // independent argmin-coincidence census
    std::size_t expected_removed = 0;
    for (const auto& pair : corpus.pairs) {
        const ChartSpec& a = corpus.charts[pair.a];
        const ChartSpec& b = corpus.charts[pair.b];
        ChartSpec partial = extract_partial(a, b);
        const ChartSpec* best = nullptr;
        double best_cost = 0.0;
        std::string best_key;
        auto completions = complete_enumeration(catalog, partial);
        for (const auto& c : completions) {
            double cost_c = testutil::naive_cost(gt, catalog, c);
            std::string key = serialize_dictionary(c);
            if (best == nullptr || cost_c < best_cost - kCostTieTolerance ||
                (std::abs(cost_c - best_cost) <= kCostTieTolerance && key < best_key)) {
                best = &c;
                best_cost = cost_c;
                best_key = key;
            }
        }
        auto best_features = testutil::naive_featurize(catalog, *best);
        if (best_features == testutil::naive_featurize(catalog, a)) ++expected_removed;
        if (best_features == testutil::naive_featurize(catalog, b)) ++expected_removed;
    }
    CHECK(report.pairs_removed_identical == expected_removed);

    // no surviving pair has equal feature vectors
    for (const auto& p : result.training_pairs)
        REQUIRE(p.positive.counts != p.negative.counts);

    REQUIRE(result.model.training_meta.test_accuracy.has_value());
    CHECK(*result.model.training_meta.test_accuracy >= 0.95);
}

TEST_CASE("replay reproduces pairs, weights, and reports with no live backend") {
    auto catalog = testutil::builtin_catalog();
    PreferenceModel gt = hidden_ground_truth(catalog);
    CorpusSpec spec = small_corpus_spec();
    spec.data_variants.entropy_bins = {Bin::high};
    Corpus corpus = generate_corpus(spec, catalog, &gt);
    SplitSpec learner_spec;
    learner_spec.seed = 12;

    JudgeSession recorded = oracle_session(catalog, gt, 0.0, 0, /*in_flight=*/4);
    PipelineResult original = run_rank_pipeline(corpus.charts, corpus.pairs, recorded,
                                                rank_tpl(), catalog, learner_spec);

    auto dir = std::filesystem::temp_directory_path() / "vizpref_replay_test";
    std::filesystem::create_directories(dir);
    std::string path = (dir / "t.jsonl").string();
    recorded.transcript().save(path);

    JudgeSession replay_session(std::make_unique<ReplayJudge>(Transcript::load(path)), 1);
    REQUIRE(replay_session.backend().offline());
    PipelineResult replayed = run_rank_pipeline(corpus.charts, corpus.pairs,
                                                replay_session, rank_tpl(), catalog,
                                                learner_spec);

    REQUIRE(replayed.training_pairs.size() == original.training_pairs.size());
    for (std::size_t i = 0; i < replayed.training_pairs.size(); ++i) {
        REQUIRE(replayed.training_pairs[i].pair_id == original.training_pairs[i].pair_id);
        REQUIRE(replayed.training_pairs[i].positive == original.training_pairs[i].positive);
        REQUIRE(replayed.training_pairs[i].negative == original.training_pairs[i].negative);
    }
    REQUIRE(replayed.model.weights == original.model.weights);
    CHECK(to_json(replayed.report) == to_json(original.report));
    std::filesystem::remove_all(dir);
}

TEST_CASE("labeled-pair interchange round-trips") {
    auto catalog = testutil::builtin_catalog();
    PreferenceModel gt = hidden_ground_truth(catalog);
    CorpusSpec spec = small_corpus_spec();
    spec.data_variants.entropy_bins = {Bin::low};
    Corpus corpus = generate_corpus(spec, catalog, &gt);
    JudgeSession session = oracle_session(catalog, gt, 0.0);
    SplitSpec learner_spec;
    PipelineResult result = run_rank_pipeline(corpus.charts, corpus.pairs, session,
                                              rank_tpl(), catalog, learner_spec);

    std::string jsonl =
        labeled_pairs_to_jsonl(result.training_chart_pairs, result.training_pairs);
    LoadedPairs loaded = labeled_pairs_from_jsonl(jsonl, catalog);
    REQUIRE(loaded.labeled.size() == result.training_pairs.size());
    for (std::size_t i = 0; i < loaded.labeled.size(); ++i) {
        REQUIRE(loaded.labeled[i].pair_id == result.training_pairs[i].pair_id);
        REQUIRE(loaded.labeled[i].positive == result.training_pairs[i].positive);
        REQUIRE(loaded.labeled[i].negative == result.training_pairs[i].negative);
        REQUIRE(loaded.labeled[i].provenance == Provenance::judge_rank);
    }
}

TEST_CASE("pair counts: 12 designs, one variant, one task give C(12,2)") {
    auto catalog = testutil::builtin_catalog();
    CorpusSpec spec;
    spec.tasks = {Task::value};
    spec.data_variants.entropy_bins = {Bin::low};
    spec.data_variants.cardinality_bins = {Bin::high};
    Corpus corpus = generate_corpus(spec, catalog);
    CHECK(corpus.charts.size() == 12);
    CHECK(corpus.pairs.size() == 66);
}

TEST_CASE("default corpus mirrors the stimulus-space magnitude, reproducibly") {
    auto catalog = testutil::builtin_catalog();
    Corpus first = generate_corpus(CorpusSpec{}, catalog);
    // 12 designs x 8 data variants x 2 tasks
    CHECK(first.charts.size() == 192);
    // 66 same-data pairs x 8 variants x 2 tasks
    CHECK(first.pairs.size() == 1056);
    Corpus second = generate_corpus(CorpusSpec{}, catalog);
    REQUIRE(second.charts.size() == first.charts.size());
    for (std::size_t i = 0; i < first.charts.size(); ++i) {
        REQUIRE(second.charts[i] == first.charts[i]);
        REQUIRE(second.charts[i].source_id == first.charts[i].source_id);
    }
    for (std::size_t i = 0; i < first.pairs.size(); ++i) {
        REQUIRE(second.pairs[i].pair_id == first.pairs[i].pair_id);
        REQUIRE(second.pairs[i].a == first.pairs[i].a);
        REQUIRE(second.pairs[i].b == first.pairs[i].b);
    }
    // every generated chart passes hard validation (sweep)
    for (const auto& chart : first.charts)
        REQUIRE(validate_hard(catalog, chart).ok());
}
