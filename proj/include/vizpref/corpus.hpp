// Synthetic stimulus corpus: a design family over three fields crossed with
// binned data variants and both task types, plus all same-data design pairs,
// optionally reference-labeled by a ground-truth model.
//
// The default family is the twelve three-variable scatterplot designs over
// q1, q2 (quantitative) and n (categorical) using the x, y, color, size and
// row channels. Quantitative encodings use linear zero-anchored scales;
// categorical encodings use categorical scales. The variable-of-interest
// flags follow the task: q1 for value tasks, q1 and n for summary tasks.

#pragma once

#include "catalog.hpp"
#include "chart.hpp"
#include "learner.hpp"
#include "scorer.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace vizpref {

struct DesignSpec {
    std::vector<std::pair<std::string, Channel>> assignments; // field -> channel

    std::string signature() const {
        std::string out;
        for (const auto& [field, channel] : assignments) {
            if (!out.empty()) out += '_';
            out += field + "-" + to_string(channel);
        }
        return out;
    }
};

inline std::vector<DesignSpec> default_design_family() {
    auto design = [](Channel q1, Channel q2, Channel n) {
        return DesignSpec{{{"q1", q1}, {"q2", q2}, {"n", n}}};
    };
    using C = Channel;
    return {
        design(C::x, C::y, C::color), design(C::y, C::x, C::color),
        design(C::x, C::y, C::row),   design(C::y, C::x, C::row),
        design(C::x, C::color, C::y), design(C::y, C::color, C::x),
        design(C::x, C::size, C::y),  design(C::y, C::size, C::x),
        design(C::color, C::x, C::y), design(C::color, C::y, C::x),
        design(C::size, C::x, C::y),  design(C::size, C::y, C::x),
    };
}

struct DataVariants {
    std::vector<int> point_counts = {300};        // provenance only; no chart fact
    std::vector<Bin> entropy_bins = {Bin::low, Bin::high};     // per quantitative field
    std::vector<Bin> cardinality_bins = {Bin::low, Bin::high}; // per categorical field
};

struct CorpusSpec {
    std::vector<std::pair<std::string, FieldKind>> fields = {
        {"q1", FieldKind::quantitative},
        {"q2", FieldKind::quantitative},
        {"n", FieldKind::categorical},
    };
    std::vector<DesignSpec> encoding_specs = default_design_family();
    DataVariants data_variants;
    std::vector<Task> tasks = {Task::value, Task::summary};
    std::uint64_t seed = 0;
    /// Variable-of-interest rule, per task.
    std::map<Task, std::set<std::string>> interest = {
        {Task::value, {"q1"}},
        {Task::summary, {"q1", "n"}},
    };
};

enum class RefLabel { a_positive, b_positive };

struct CorpusPair {
    std::string pair_id;
    std::size_t a = 0; // indices into Corpus::charts
    std::size_t b = 0;
    std::optional<RefLabel> ref;
};

struct Corpus {
    std::vector<ChartSpec> charts;
    std::vector<CorpusPair> pairs;
};

/// Deterministic generation: every chart passes hard validation and every
/// design pair is feature-distinct for at least one data variant (checked;
/// throws otherwise). Pairs are all same-data different-design pairs.
/// Reference labels come from `reference` when supplied; cost ties get none.
inline Corpus generate_corpus(const CorpusSpec& spec, const ConstraintCatalog& catalog,
                              const PreferenceModel* reference = nullptr) {
    if (spec.encoding_specs.empty()) throw Error("corpus: no designs");
    if (spec.tasks.empty()) throw Error("corpus: no tasks");
    if (reference != nullptr && reference->catalog_hash != catalog.catalog_hash)
        throw Error("corpus: reference model bound to a different catalog");

    // One bin assignment per quantitative field (entropy) and categorical
    // field (cardinality), cartesian.
    std::vector<std::string> quantitative, categorical;
    for (const auto& [name, kind] : spec.fields)
        (kind == FieldKind::quantitative ? quantitative : categorical).push_back(name);

    struct Variant {
        std::map<std::string, Bin> entropy;
        std::map<std::string, Bin> cardinality;
        int point_count = 0;
        std::string tag;
    };
    std::vector<Variant> variants{Variant{}};
    for (const auto& field : quantitative) {
        std::vector<Variant> next;
        for (const auto& v : variants)
            for (Bin bin : spec.data_variants.entropy_bins) {
                Variant w = v;
                w.entropy[field] = bin;
                next.push_back(std::move(w));
            }
        variants = std::move(next);
    }
    for (const auto& field : categorical) {
        std::vector<Variant> next;
        for (const auto& v : variants)
            for (Bin bin : spec.data_variants.cardinality_bins) {
                Variant w = v;
                w.cardinality[field] = bin;
                next.push_back(std::move(w));
            }
        variants = std::move(next);
    }
    {
        std::vector<Variant> next;
        for (const auto& v : variants)
            for (int pc : spec.data_variants.point_counts) {
                Variant w = v;
                w.point_count = pc;
                next.push_back(std::move(w));
            }
        variants = std::move(next);
    }
    for (auto& v : variants) {
        for (const auto& field : quantitative)
            v.tag += field + (v.entropy[field] == Bin::low ? "lo" : "hi") + "_";
        for (const auto& field : categorical)
            v.tag += field + (v.cardinality[field] == Bin::low ? "lo" : "hi") + "_";
        v.tag += "pc" + std::to_string(v.point_count);
    }

    auto build_chart = [&](Task task, const Variant& variant,
                           const DesignSpec& design) {
        ChartSpec chart;
        chart.task = task;
        chart.mark = Mark::point;
        const std::set<std::string>& interesting = spec.interest.at(task);
        for (const auto& [name, kind] : spec.fields) {
            FieldDef f;
            f.name = name;
            f.kind = kind;
            if (kind == FieldKind::quantitative) f.entropy_bin = variant.entropy.at(name);
            else f.cardinality_bin = variant.cardinality.at(name);
            f.interest = interesting.count(name) > 0;
            chart.fields.push_back(std::move(f));
        }
        for (const auto& [field_name, channel] : design.assignments) {
            const FieldDef* field = chart.find_field(field_name);
            if (field == nullptr)
                throw Error("corpus: design references unknown field " + field_name);
            EncodingDef e;
            e.channel = channel;
            e.field = field_name;
            if (field->kind == FieldKind::quantitative) {
                e.scale_type = ScaleType::linear;
                e.zero = ZeroFlag::yes;
            } else {
                e.scale_type = ScaleType::categorical;
            }
            chart.encodings.push_back(std::move(e));
        }
        chart.source_id =
            to_string(task) + "__" + design.signature() + "__" + variant.tag;
        chart = canonicalized(std::move(chart));
        validate_spec(chart);
        validate_chart(chart);
        return chart;
    };

    Corpus corpus;
    // chart index by (task, variant, design); generation order: task-major.
    std::map<std::string, std::size_t> index_of;
    for (Task task : spec.tasks)
        for (const auto& variant : variants)
            for (const auto& design : spec.encoding_specs) {
                ChartSpec chart = build_chart(task, variant, design);
                if (!validate_hard(catalog, chart).ok())
                    throw Error("corpus: generated chart violates hard constraints: " +
                                chart.source_id);
                if (index_of.count(chart.source_id) > 0)
                    throw Error("corpus: duplicate design/variant: " + chart.source_id);
                index_of[chart.source_id] = corpus.charts.size();
                corpus.charts.push_back(std::move(chart));
            }
    if (corpus.charts.empty()) throw Error("corpus: spec produced zero valid charts");

    // Feature-distinctness of the design family: any two designs must differ
    // for at least one (task, variant).
    std::vector<std::vector<FeatureVector>> features(spec.encoding_specs.size());
    {
        std::size_t chart_index = 0;
        for (Task task : spec.tasks) {
            (void)task;
            for (std::size_t v = 0; v < variants.size(); ++v)
                for (std::size_t d = 0; d < spec.encoding_specs.size(); ++d)
                    features[d].push_back(featurize(catalog, corpus.charts[chart_index++]));
        }
    }
    for (std::size_t i = 0; i < features.size(); ++i)
        for (std::size_t j = i + 1; j < features.size(); ++j)
            if (features[i] == features[j])
                throw Error("corpus: designs " + spec.encoding_specs[i].signature() +
                            " and " + spec.encoding_specs[j].signature() +
                            " are feature-identical for every data variant");

    // All same-data design pairs.
    std::size_t pair_seq = 0;
    for (Task task : spec.tasks)
        for (const auto& variant : variants)
            for (std::size_t i = 0; i < spec.encoding_specs.size(); ++i)
                for (std::size_t j = i + 1; j < spec.encoding_specs.size(); ++j) {
                    CorpusPair pair;
                    pair.pair_id = "pair-" + std::to_string(pair_seq++);
                    pair.a = index_of.at(to_string(task) + "__" +
                                         spec.encoding_specs[i].signature() + "__" +
                                         variant.tag);
                    pair.b = index_of.at(to_string(task) + "__" +
                                         spec.encoding_specs[j].signature() + "__" +
                                         variant.tag);
                    if (reference != nullptr) {
                        RankVerdict v = rank_pair(*reference, catalog,
                                                  corpus.charts[pair.a],
                                                  corpus.charts[pair.b]);
                        if (v.winner == PairWinner::a) pair.ref = RefLabel::a_positive;
                        else if (v.winner == PairWinner::b) pair.ref = RefLabel::b_positive;
                    }
                    corpus.pairs.push_back(std::move(pair));
                }
    return corpus;
}

} // namespace vizpref
