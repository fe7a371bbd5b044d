// vizpref - preference-knowledge-base pipeline CLI.
//
// Subcommands: corpus gen, rank run, recommend run, train, score, compare,
// report. Options may come from flags or a TOML config file (--config; keys
// match option names, one [section] per subcommand path). Structured inputs
// (models, pairs, designs) are JSON/JSONL files. Every run writes a manifest
// with the resolved-config digest, catalog hash, seeds, and output paths so
// a rerun from the same manifest inputs is byte-identical.

#include <vizpref/vizpref.hpp>
#include <vizpref/judge_live.hpp>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace vizpref;

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
}

std::string default_catalog_path() {
    if (const char* env = std::getenv("VIZPREF_CATALOG")) return env;
    return std::string(VIZPREF_ASSET_DIR) + "/catalog.kb";
}

std::string default_template_path(const char* name) {
    return std::string(VIZPREF_ASSET_DIR) + "/templates/" + name;
}

ConstraintCatalog load_catalog(const std::string& path) {
    return parse_catalog(read_file(path));
}

PreferenceModel load_model(const std::string& path, const ConstraintCatalog& catalog) {
    PreferenceModel model = model_from_json(json::parse(read_file(path)), catalog);
    if (model.model_id.empty()) model.model_id = fs::path(path).stem().string();
    return model;
}

Channel channel_from_name(const std::string& name) {
    for (Channel c : kChannelOrder)
        if (to_string(c) == name) return c;
    throw Error("unknown channel: " + name);
}

// --- corpus directory layout ---------------------------------------------------
//
//   <dir>/charts/<source_id>.chart   dictionary text, one per chart
//   <dir>/pairs.jsonl                {pair_id, a, b, ref}
//   <dir>/manifest.json

void save_corpus(const Corpus& corpus, const fs::path& dir) {
    fs::create_directories(dir / "charts");
    for (const auto& chart : corpus.charts)
        write_file(dir / "charts" / (chart.source_id + ".chart"),
                   serialize_dictionary(chart));
    std::string pairs;
    for (const auto& pair : corpus.pairs) {
        json j = {{"pair_id", pair.pair_id},
                  {"a", corpus.charts[pair.a].source_id},
                  {"b", corpus.charts[pair.b].source_id}};
        if (pair.ref)
            j["ref"] = *pair.ref == RefLabel::a_positive ? "a" : "b";
        else
            j["ref"] = nullptr;
        pairs += j.dump() + '\n';
    }
    write_file(dir / "pairs.jsonl", pairs);
}

Corpus load_corpus(const fs::path& dir) {
    Corpus corpus;
    std::map<std::string, std::size_t> index_of;
    std::vector<fs::path> chart_files;
    for (const auto& entry : fs::directory_iterator(dir / "charts"))
        if (entry.path().extension() == ".chart") chart_files.push_back(entry.path());
    std::sort(chart_files.begin(), chart_files.end());
    for (const auto& path : chart_files) {
        ChartSpec chart = parse_dictionary(read_file(path));
        chart.source_id = path.stem().string();
        if (!chart.is_complete())
            throw Error("corpus chart is not complete: " + path.string());
        index_of[chart.source_id] = corpus.charts.size();
        corpus.charts.push_back(std::move(chart));
    }
    std::ifstream in(dir / "pairs.jsonl");
    if (!in) throw Error("cannot open " + (dir / "pairs.jsonl").string());
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line);
        CorpusPair pair;
        pair.pair_id = j.at("pair_id").get<std::string>();
        pair.a = index_of.at(j.at("a").get<std::string>());
        pair.b = index_of.at(j.at("b").get<std::string>());
        if (j.contains("ref") && !j["ref"].is_null())
            pair.ref = j["ref"].get<std::string>() == "a" ? RefLabel::a_positive
                                                          : RefLabel::b_positive;
        corpus.pairs.push_back(std::move(pair));
    }
    return corpus;
}

void write_manifest(const fs::path& dir, const std::string& command,
                    const json& resolved_config, const std::string& catalog_hash,
                    const std::vector<std::string>& outputs) {
    json manifest = {{"command", command},
                     {"config", resolved_config},
                     {"config_digest", sha256_hex(resolved_config.dump())},
                     {"catalog_hash", catalog_hash},
                     {"outputs", outputs}};
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

// --- shared learner/backend options ---------------------------------------------

struct LearnerOptions {
    double train_fraction = 0.8;
    int folds = 5;
    std::uint64_t seed = 0;
    std::vector<double> grid = SplitSpec{}.grid;

    void attach(CLI::App* cmd) {
        cmd->add_option("--train-fraction", train_fraction,
                        "training split fraction (0,1]")
            ->check(CLI::Range(0.0, 1.0));
        cmd->add_option("--folds", folds, "cross-validation folds")
            ->check(CLI::Range(2, 100));
        cmd->add_option("--seed", seed, "split/fold shuffle seed");
        cmd->add_option("--grid", grid, "regularization grid (strictly increasing)");
    }

    SplitSpec spec() const {
        SplitSpec s;
        s.train_fraction = train_fraction;
        s.folds = folds;
        s.seed = seed;
        s.grid = grid;
        return s;
    }

    json to_json() const {
        return {{"train_fraction", train_fraction},
                {"folds", folds},
                {"seed", seed},
                {"grid", grid}};
    }
};

struct BackendOptions {
    std::string backend = "oracle";
    std::string oracle_model;
    double bias = 0.0;
    std::uint64_t noise_seed = 0;
    std::string transcript;
    int in_flight = 4;

    void attach(CLI::App* cmd) {
        cmd->add_option("--backend", backend, "judge backend")
            ->check(CLI::IsMember({"oracle", "replay", "live"}))
            ->required();
        cmd->add_option("--oracle-model", oracle_model,
                        "ground-truth model JSON (oracle backend)");
        cmd->add_option("--bias", bias, "oracle positional bias in [0,1]")
            ->check(CLI::Range(0.0, 1.0));
        cmd->add_option("--noise-seed", noise_seed, "oracle bias draw seed");
        cmd->add_option("--transcript", transcript,
                        "recorded transcript JSONL (replay backend)");
        cmd->add_option("--in-flight", in_flight, "max concurrent judge requests")
            ->check(CLI::Range(1, 64));
    }

    std::unique_ptr<JudgeBackend> make(const ConstraintCatalog& catalog) const {
        if (backend == "oracle") {
            if (oracle_model.empty())
                throw Error("oracle backend requires --oracle-model");
            OracleConfig config;
            config.ground_truth = load_model(oracle_model, catalog);
            config.positional_bias = bias;
            config.noise_seed = noise_seed;
            return std::make_unique<OracleJudge>(std::move(config), catalog);
        }
        if (backend == "replay") {
            if (transcript.empty()) throw Error("replay backend requires --transcript");
            return std::make_unique<ReplayJudge>(Transcript::load(transcript));
        }
        return make_live_judge(live_config_from_env());
    }

    json to_json() const {
        json j = {{"backend", backend}, {"in_flight", in_flight}};
        if (backend == "oracle") {
            j["oracle_model"] = oracle_model;
            j["bias"] = bias;
            j["noise_seed"] = noise_seed;
        }
        if (backend == "replay") j["transcript"] = transcript;
        return j;
    }
};

void write_pipeline_outputs(const fs::path& out_dir, const PipelineResult& result,
                            const ConstraintCatalog& catalog,
                            const JudgeSession& session, const std::string& command,
                            const json& resolved_config) {
    write_file(out_dir / "model.json",
               model_to_json(result.model, catalog).dump(2) + "\n");
    write_file(out_dir / "report.json", to_json(result.report).dump(2) + "\n");
    write_file(out_dir / "report.csv", to_csv(result.report));
    write_file(out_dir / "training_pairs.jsonl",
               labeled_pairs_to_jsonl(result.training_chart_pairs, result.training_pairs));
    session.transcript().save((out_dir / "transcript.jsonl").string());
    json cv = json::array();
    for (const auto& [C, acc] : result.cv.per_C_accuracy)
        cv.push_back({{"C", C}, {"accuracy", acc}});
    write_file(out_dir / "cv.json",
               json{{"best_C", result.cv.best_C}, {"per_C_accuracy", cv}}.dump(2) + "\n");
    write_manifest(out_dir, command, resolved_config, catalog.catalog_hash,
                   {"model.json", "report.json", "report.csv", "training_pairs.jsonl",
                    "transcript.jsonl", "cv.json"});
}

int fail(const std::string& message) {
    std::cerr << "error: " << message << "\n";
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"preference-knowledge-base pipeline toolkit"};
    app.set_config("--config", "", "TOML config file (keys match option names)");
    app.require_subcommand(1);

    std::string catalog_path = default_catalog_path();
    app.add_option("--catalog", catalog_path, "constraint catalog DSL file");

    // ---- corpus gen -----------------------------------------------------------
    auto* corpus_cmd = app.add_subcommand("corpus", "stimulus corpus commands");
    auto* corpus_gen = corpus_cmd->add_subcommand("gen", "generate the chart corpus");
    std::string corpus_out;
    std::uint64_t corpus_seed = 0;
    std::vector<std::string> corpus_tasks = {"value", "summary"};
    std::vector<std::string> entropy_bins = {"low", "high"};
    std::vector<std::string> cardinality_bins = {"low", "high"};
    std::vector<int> point_counts = {300};
    std::string designs_file;
    std::string reference_model;
    corpus_gen->add_option("--out", corpus_out, "output directory")->required();
    corpus_gen->add_option("--seed", corpus_seed, "generation seed (recorded)");
    corpus_gen->add_option("--tasks", corpus_tasks, "tasks to generate")
        ->check(CLI::IsMember({"value", "summary"}));
    corpus_gen->add_option("--entropy-bins", entropy_bins, "entropy bins per field")
        ->check(CLI::IsMember({"low", "high"}));
    corpus_gen
        ->add_option("--cardinality-bins", cardinality_bins,
                     "cardinality bins per field")
        ->check(CLI::IsMember({"low", "high"}));
    corpus_gen->add_option("--point-counts", point_counts, "point-count variants");
    corpus_gen->add_option("--designs", designs_file,
                           "design family JSON (list of field->channel maps)");
    corpus_gen->add_option("--reference-model", reference_model,
                           "model JSON supplying reference labels");

    // ---- rank run / recommend run ----------------------------------------------
    auto* rank_cmd = app.add_subcommand("rank", "ranking pipeline");
    auto* rank_run = rank_cmd->add_subcommand(
        "run", "judge pairs in both orders, filter, train, report");
    std::string rank_corpus, rank_out;
    std::string rank_template_path = default_template_path("rank.txt");
    std::string rank_model_id = "rank";
    BackendOptions rank_backend;
    LearnerOptions rank_learner;
    rank_run->add_option("--corpus", rank_corpus, "corpus directory")->required();
    rank_run->add_option("--out", rank_out, "output directory")->required();
    rank_run->add_option("--template", rank_template_path, "rank prompt template");
    rank_run->add_option("--model-id", rank_model_id, "identifier for the trained model");
    rank_backend.attach(rank_run);
    rank_learner.attach(rank_run);

    auto* recommend_cmd = app.add_subcommand("recommend", "recommendation pipeline");
    auto* recommend_run = recommend_cmd->add_subcommand(
        "run", "extract partials, judge completions, validate, train, report");
    std::string rec_corpus, rec_out;
    std::string rec_template_path = default_template_path("recommend.txt");
    std::string rec_format = "vegalite";
    std::string rec_model_id = "recommend";
    BackendOptions rec_backend;
    LearnerOptions rec_learner;
    recommend_run->add_option("--corpus", rec_corpus, "corpus directory")->required();
    recommend_run->add_option("--out", rec_out, "output directory")->required();
    recommend_run->add_option("--template", rec_template_path,
                              "recommend prompt template");
    recommend_run->add_option("--format", rec_format, "completion format")
        ->check(CLI::IsMember({"vegalite", "dictionary"}));
    recommend_run->add_option("--model-id", rec_model_id,
                              "identifier for the trained model");
    rec_backend.attach(recommend_run);
    rec_learner.attach(recommend_run);

    // ---- train ------------------------------------------------------------------
    auto* train_cmd =
        app.add_subcommand("train", "train a model from a labeled-pair JSONL file");
    std::string train_pairs, train_out;
    std::string train_model_id;
    LearnerOptions train_learner;
    train_cmd->add_option("--pairs", train_pairs, "labeled pairs JSONL")->required();
    train_cmd->add_option("--out", train_out, "model JSON output path")->required();
    train_cmd->add_option("--model-id", train_model_id, "identifier for the model");
    train_learner.attach(train_cmd);

    // ---- model init -------------------------------------------------------------
    auto* model_cmd = app.add_subcommand("model", "preference-model file utilities");
    auto* model_init = model_cmd->add_subcommand(
        "init", "write a model JSON from name=weight assignments (others zero)");
    std::string model_init_out, model_init_id = "manual";
    std::vector<std::string> model_init_weights;
    model_init->add_option("--out", model_init_out, "model JSON output path")->required();
    model_init->add_option("--id", model_init_id, "model identifier");
    model_init->add_option("--weight", model_init_weights,
                           "constraint=weight assignment (repeatable)");

    // ---- score ------------------------------------------------------------------
    auto* score_cmd = app.add_subcommand("score", "cost reports for charts");
    std::string score_model, score_charts, score_out;
    score_cmd->add_option("--model", score_model, "model JSON")->required();
    score_cmd->add_option("--charts", score_charts, "corpus directory or .chart file")
        ->required();
    score_cmd->add_option("--out", score_out, "output directory")->required();

    // ---- compare ----------------------------------------------------------------
    auto* compare_cmd =
        app.add_subcommand("compare", "cost-correlation alignment of two models");
    std::vector<std::string> compare_models;
    std::string compare_charts, compare_out;
    compare_cmd->add_option("--models", compare_models, "two model JSON files")
        ->expected(2)
        ->required();
    compare_cmd->add_option("--charts", compare_charts, "corpus directory")->required();
    compare_cmd->add_option("--out", compare_out, "output directory")->required();

    // ---- report -----------------------------------------------------------------
    auto* report_cmd = app.add_subcommand("report", "analysis tables (CSV + JSON)");
    std::string report_kind;
    std::string report_pairs_a, report_pairs_b, report_subset, report_out;
    std::vector<std::string> report_models;
    report_cmd->add_option("--kind", report_kind, "encodings | counts | weights")
        ->check(CLI::IsMember({"encodings", "counts", "weights"}))
        ->required();
    report_cmd->add_option("--pairs", report_pairs_a,
                           "labeled pairs JSONL (encodings, counts side A)");
    report_cmd->add_option("--pairs-b", report_pairs_b,
                           "labeled pairs JSONL (counts side B)");
    report_cmd->add_option("--subset", report_subset,
                           "file of pair ids to restrict counts to (one per line)");
    report_cmd->add_option("--models", report_models, "model JSON files (weights)");
    report_cmd->add_option("--out", report_out, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        ConstraintCatalog catalog = load_catalog(catalog_path);

        if (corpus_gen->parsed()) {
            CorpusSpec spec;
            spec.seed = corpus_seed;
            spec.tasks.clear();
            for (const auto& t : corpus_tasks)
                spec.tasks.push_back(t == "value" ? Task::value : Task::summary);
            auto to_bins = [](const std::vector<std::string>& names) {
                std::vector<Bin> bins;
                for (const auto& n : names)
                    bins.push_back(n == "low" ? Bin::low : Bin::high);
                return bins;
            };
            spec.data_variants.entropy_bins = to_bins(entropy_bins);
            spec.data_variants.cardinality_bins = to_bins(cardinality_bins);
            spec.data_variants.point_counts = point_counts;
            if (!designs_file.empty()) {
                spec.encoding_specs.clear();
                for (const auto& d : json::parse(read_file(designs_file))) {
                    DesignSpec design;
                    for (const auto& [field, channel] : d.items())
                        design.assignments.emplace_back(
                            field, channel_from_name(channel.get<std::string>()));
                    spec.encoding_specs.push_back(std::move(design));
                }
            }
            std::optional<PreferenceModel> reference;
            if (!reference_model.empty()) reference = load_model(reference_model, catalog);
            Corpus corpus =
                generate_corpus(spec, catalog, reference ? &*reference : nullptr);
            fs::path out_dir(corpus_out);
            save_corpus(corpus, out_dir);
            json config = {{"seed", corpus_seed},
                           {"tasks", corpus_tasks},
                           {"entropy_bins", entropy_bins},
                           {"cardinality_bins", cardinality_bins},
                           {"point_counts", point_counts},
                           {"designs", designs_file},
                           {"reference_model", reference_model}};
            write_manifest(out_dir, "corpus gen", config, catalog.catalog_hash,
                           {"charts/", "pairs.jsonl"});
            std::cout << "corpus: " << corpus.charts.size() << " charts, "
                      << corpus.pairs.size() << " pairs -> " << corpus_out << "\n";
            return 0;
        }

        if (rank_run->parsed()) {
            Corpus corpus = load_corpus(rank_corpus);
            JudgeSession session(rank_backend.make(catalog), rank_backend.in_flight);
            PipelineResult result = run_rank_pipeline(
                corpus.charts, corpus.pairs, session, read_file(rank_template_path),
                catalog, rank_learner.spec(), rank_model_id);
            fs::path out_dir(rank_out);
            json config = {{"corpus", rank_corpus},
                           {"template", rank_template_path},
                           {"model_id", rank_model_id},
                           {"backend", rank_backend.to_json()},
                           {"learner", rank_learner.to_json()}};
            write_pipeline_outputs(out_dir, result, catalog, session, "rank run", config);
            const RankReport& r = result.report.rank;
            std::cout << "rank: " << r.input_pairs << " pairs, " << r.consistent()
                      << " consistent, " << r.inconsistent << " inconsistent\n";
            if (result.model.training_meta.test_accuracy)
                std::cout << "test accuracy: "
                          << *result.model.training_meta.test_accuracy << "\n";
            return 0;
        }

        if (recommend_run->parsed()) {
            Corpus corpus = load_corpus(rec_corpus);
            JudgeSession session(rec_backend.make(catalog), rec_backend.in_flight);
            CompletionFormat format = rec_format == "vegalite"
                                          ? CompletionFormat::vegalite
                                          : CompletionFormat::dictionary;
            PipelineResult result = run_recommend_pipeline(
                corpus.charts, corpus.pairs, session, read_file(rec_template_path),
                format, catalog, rec_learner.spec(), rec_model_id);
            fs::path out_dir(rec_out);
            json config = {{"corpus", rec_corpus},
                           {"template", rec_template_path},
                           {"format", rec_format},
                           {"model_id", rec_model_id},
                           {"backend", rec_backend.to_json()},
                           {"learner", rec_learner.to_json()}};
            write_pipeline_outputs(out_dir, result, catalog, session, "recommend run",
                                   config);
            const RecommendReport& r = result.report.recommend;
            std::cout << "recommend: " << r.input_pairs << " pairs, " << r.valid
                      << " valid completions, " << r.pairs_built << " training pairs ("
                      << r.pairs_removed_identical << " removed as identical)\n";
            if (result.model.training_meta.test_accuracy)
                std::cout << "test accuracy: "
                          << *result.model.training_meta.test_accuracy << "\n";
            return 0;
        }

        if (train_cmd->parsed()) {
            LoadedPairs loaded = labeled_pairs_from_jsonl(read_file(train_pairs), catalog);
            if (loaded.labeled.empty()) return fail("no pairs in " + train_pairs);
            SplitSpec spec = train_learner.spec();
            SplitResult parts = split(loaded.labeled, spec);
            CrossValidation cv = cross_validate(parts.train, spec);
            PreferenceModel model = train(parts.train, cv.best_C, spec.seed);
            for (const auto& [C, acc] : cv.per_C_accuracy)
                if (C == cv.best_C) model.training_meta.cv_accuracy = acc;
            if (!parts.test.empty())
                model.training_meta.test_accuracy = rank_accuracy(model, parts.test);
            model.model_id = train_model_id.empty()
                                 ? fs::path(train_out).stem().string()
                                 : train_model_id;
            write_file(train_out, model_to_json(model, catalog).dump(2) + "\n");
            std::cout << "trained on " << parts.train.size() << " pairs (best C "
                      << cv.best_C << ")";
            if (model.training_meta.test_accuracy)
                std::cout << ", test accuracy " << *model.training_meta.test_accuracy;
            std::cout << " -> " << train_out << "\n";
            return 0;
        }

        if (model_init->parsed()) {
            PreferenceModel model;
            model.catalog_hash = catalog.catalog_hash;
            model.weights.assign(catalog.soft_count(), 0.0);
            model.model_id = model_init_id;
            for (const auto& assignment : model_init_weights) {
                std::size_t eq = assignment.find('=');
                if (eq == std::string::npos)
                    return fail("--weight expects constraint=value: " + assignment);
                std::string name = assignment.substr(0, eq);
                int idx = catalog.soft_index(name);
                if (idx < 0) return fail("unknown soft constraint: " + name);
                model.weights[static_cast<std::size_t>(idx)] =
                    std::stod(assignment.substr(eq + 1));
            }
            write_file(model_init_out, model_to_json(model, catalog).dump(2) + "\n");
            std::cout << "model " << model_init_id << " -> " << model_init_out << "\n";
            return 0;
        }

        if (score_cmd->parsed()) {
            PreferenceModel model = load_model(score_model, catalog);
            std::vector<ChartSpec> charts;
            fs::path input(score_charts);
            if (fs::is_directory(input)) {
                charts = load_corpus(input).charts;
            } else {
                ChartSpec chart = parse_dictionary(read_file(input));
                chart.source_id = input.stem().string();
                charts.push_back(std::move(chart));
            }
            std::vector<CostReport> reports;
            json mirror = json::array();
            for (const auto& chart : charts) {
                reports.push_back(cost(model, catalog, chart));
                mirror.push_back(to_json(reports.back()));
            }
            fs::path out_dir(score_out);
            std::string stem =
                "costs__" + model.model_id + "__" + catalog.catalog_hash.substr(0, 8);
            write_file(out_dir / (stem + ".csv"), to_csv(reports));
            write_file(out_dir / (stem + ".json"), mirror.dump(2) + "\n");
            json config = {{"model", score_model}, {"charts", score_charts}};
            write_manifest(out_dir, "score", config, catalog.catalog_hash,
                           {stem + ".csv", stem + ".json"});
            std::cout << "scored " << charts.size() << " charts -> " << score_out << "\n";
            return 0;
        }

        if (compare_cmd->parsed()) {
            PreferenceModel a = load_model(compare_models[0], catalog);
            PreferenceModel b = load_model(compare_models[1], catalog);
            Corpus corpus = load_corpus(compare_charts);
            AlignmentReport report = cost_correlation(a, b, catalog, corpus.charts);
            fs::path out_dir(compare_out);
            std::string stem = "alignment__" + a.model_id + "__" + b.model_id + "__" +
                               catalog.catalog_hash.substr(0, 8);
            write_file(out_dir / (stem + ".csv"), to_csv(report));
            write_file(out_dir / (stem + ".json"), to_json(report).dump(2) + "\n");
            json config = {{"models", compare_models}, {"charts", compare_charts}};
            write_manifest(out_dir, "compare", config, catalog.catalog_hash,
                           {stem + ".csv", stem + ".json"});
            std::cout << "n_distinct=" << report.n_distinct;
            if (report.defined)
                std::cout << " r=" << report.pearson_r << " p=" << report.p_value;
            else
                std::cout << " r=undefined (zero cost variance)";
            std::cout << " -> " << compare_out << "\n";
            return 0;
        }

        if (report_cmd->parsed()) {
            fs::path out_dir(report_out);
            if (report_kind == "encodings") {
                if (report_pairs_a.empty())
                    return fail("report --kind encodings requires --pairs");
                LoadedPairs loaded =
                    labeled_pairs_from_jsonl(read_file(report_pairs_a), catalog);
                auto rows = encoding_distribution(loaded.chart_pairs);
                write_file(out_dir / "encodings.csv", to_csv(rows));
                write_file(out_dir / "encodings.json", to_json(rows).dump(2) + "\n");
                json config = {{"kind", report_kind}, {"pairs", report_pairs_a}};
                write_manifest(out_dir, "report", config, catalog.catalog_hash,
                               {"encodings.csv", "encodings.json"});
            } else if (report_kind == "counts") {
                if (report_pairs_a.empty() || report_pairs_b.empty())
                    return fail("report --kind counts requires --pairs and --pairs-b");
                LoadedPairs a = labeled_pairs_from_jsonl(read_file(report_pairs_a), catalog);
                LoadedPairs b = labeled_pairs_from_jsonl(read_file(report_pairs_b), catalog);
                std::set<std::string> subset;
                bool restricted = !report_subset.empty();
                if (restricted) {
                    std::istringstream in(read_file(report_subset));
                    std::string id;
                    while (std::getline(in, id))
                        if (!id.empty()) subset.insert(id);
                }
                auto rows = count_divergence(catalog, a.chart_pairs, b.chart_pairs,
                                             restricted ? &subset : nullptr);
                write_file(out_dir / "counts.csv", to_csv(rows));
                write_file(out_dir / "counts.json", to_json(rows).dump(2) + "\n");
                json config = {{"kind", report_kind},
                               {"pairs", report_pairs_a},
                               {"pairs_b", report_pairs_b},
                               {"subset", report_subset}};
                write_manifest(out_dir, "report", config, catalog.catalog_hash,
                               {"counts.csv", "counts.json"});
            } else {
                if (report_models.empty())
                    return fail("report --kind weights requires --models");
                std::vector<PreferenceModel> models;
                std::vector<std::string> ids;
                for (const auto& path : report_models) {
                    models.push_back(load_model(path, catalog));
                    ids.push_back(models.back().model_id);
                }
                auto rows = weight_comparison(catalog, models);
                write_file(out_dir / "weights.csv", to_csv(rows, ids));
                write_file(out_dir / "weights.json", to_json(rows, ids).dump(2) + "\n");
                json config = {{"kind", report_kind}, {"models", report_models}};
                write_manifest(out_dir, "report", config, catalog.catalog_hash,
                               {"weights.csv", "weights.json"});
            }
            std::cout << "report " << report_kind << " -> " << report_out << "\n";
            return 0;
        }
    } catch (const PipelineDataError& e) {
        std::cerr << "report: " << to_json(e.report).dump(2) << "\n";
        return fail(e.what());
    } catch (const std::exception& e) {
        return fail(e.what());
    }
    return fail("no subcommand");
}
