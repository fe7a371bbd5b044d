// Shared test utilities: asset loading, a seeded random chart generator, and
// independent naive oracles (brute-force matchers kept deliberately separate
// from the library's evaluation path).

#pragma once

#include <vizpref/vizpref.hpp>

#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace testutil {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string asset_path(const std::string& name) {
    return std::string(VIZPREF_ASSET_DIR) + "/" + name;
}

inline vizpref::ConstraintCatalog builtin_catalog() {
    return vizpref::parse_catalog(read_file(asset_path("catalog.kb")));
}

// --- naive constraint oracle --------------------------------------------------
//
// Re-evaluates a ConstraintDef by enumerating (selector, encoding) pairs with
// its own matching code; shares only the parsed declarative structures with
// the library.

inline bool naive_value_in(const std::vector<std::string>& values, const std::string& v) {
    bool found = false;
    for (const auto& candidate : values)
        if (candidate == v) found = true;
    return found;
}

inline std::string naive_channel_name(vizpref::Channel c) {
    using vizpref::Channel;
    if (c == Channel::x) return "x";
    if (c == Channel::y) return "y";
    if (c == Channel::color) return "color";
    if (c == Channel::size) return "size";
    if (c == Channel::row) return "row";
    if (c == Channel::shape) return "shape";
    return "none";
}

inline bool naive_when_holds(const vizpref::ConstraintDef& def,
                             const vizpref::ChartSpec& chart) {
    using vizpref::Channel;
    for (const auto& atom : def.when_clause) {
        bool holds = false;
        if (atom.key == "task") {
            if (chart.task) {
                std::string t = *chart.task == vizpref::Task::value ? "value" : "summary";
                holds = naive_value_in(atom.values, t);
            }
        } else if (atom.key == "mark") {
            if (chart.mark) holds = naive_value_in(atom.values, vizpref::to_string(*chart.mark));
        } else if (atom.key == "missing") {
            for (const auto& channel_name : atom.values) {
                bool used = false;
                for (const auto& e : chart.encodings)
                    if (naive_channel_name(e.channel) == channel_name) used = true;
                if (!used) holds = true;
            }
        } else if (atom.key == "duplicate_field") {
            for (std::size_t i = 0; i < chart.encodings.size(); ++i)
                for (std::size_t j = 0; j < chart.encodings.size(); ++j)
                    if (i != j && chart.encodings[i].field == chart.encodings[j].field)
                        holds = true;
        } else if (atom.key == "duplicate_channel") {
            for (std::size_t i = 0; i < chart.encodings.size(); ++i)
                for (std::size_t j = 0; j < chart.encodings.size(); ++j)
                    if (i != j && chart.encodings[i].channel != Channel::none &&
                        chart.encodings[i].channel == chart.encodings[j].channel)
                        holds = true;
        } else if (atom.key == "unencoded_field") {
            for (const auto& f : chart.fields) {
                bool encoded = false;
                for (const auto& e : chart.encodings)
                    if (e.field == f.name) encoded = true;
                if (!encoded) holds = true;
            }
        }
        if (!holds) return false;
    }
    return true;
}

inline bool naive_encoding_matches(const vizpref::ConstraintDef& def,
                                   const vizpref::EncodingDef& enc,
                                   const vizpref::ChartSpec& chart) {
    using vizpref::Bin;
    using vizpref::ScaleType;
    using vizpref::ZeroFlag;
    for (const auto& sel : def.match_clause) {
        bool holds = false;
        if (sel.key == "channel") {
            holds = naive_value_in(sel.values, naive_channel_name(enc.channel));
        } else if (sel.key == "scale") {
            std::string s;
            if (enc.scale_type == ScaleType::linear) s = "linear";
            if (enc.scale_type == ScaleType::ordinal) s = "ordinal";
            if (enc.scale_type == ScaleType::categorical) s = "categorical";
            holds = !s.empty() && naive_value_in(sel.values, s);
        } else if (sel.key == "zero") {
            if (enc.zero == ZeroFlag::yes) holds = naive_value_in(sel.values, "true");
            if (enc.zero == ZeroFlag::no) holds = naive_value_in(sel.values, "false");
        } else {
            const vizpref::FieldDef* field = nullptr;
            for (const auto& f : chart.fields)
                if (f.name == enc.field) field = &f;
            if (field == nullptr) return false;
            if (sel.key == "field.kind") {
                std::string k = field->kind == vizpref::FieldKind::quantitative
                                    ? "quantitative"
                                    : "categorical";
                holds = naive_value_in(sel.values, k);
            } else if (sel.key == "field.entropy") {
                if (field->entropy_bin == Bin::low) holds = naive_value_in(sel.values, "low");
                if (field->entropy_bin == Bin::high)
                    holds = naive_value_in(sel.values, "high");
            } else if (sel.key == "field.cardinality") {
                if (field->cardinality_bin == Bin::low)
                    holds = naive_value_in(sel.values, "low");
                if (field->cardinality_bin == Bin::high)
                    holds = naive_value_in(sel.values, "high");
            } else if (sel.key == "field.interest") {
                holds = naive_value_in(sel.values, field->interest ? "true" : "false");
            }
        }
        if (!holds) return false;
    }
    return true;
}

inline int naive_evaluate(const vizpref::ConstraintDef& def,
                          const vizpref::ChartSpec& chart) {
    if (!naive_when_holds(def, chart)) return 0;
    int matches = 0;
    for (const auto& enc : chart.encodings)
        if (naive_encoding_matches(def, enc, chart)) ++matches;
    if (def.scope == vizpref::Scope::per_match) return matches;
    if (!def.has_match) return 1;
    return matches > 0 ? 1 : 0;
}

inline std::vector<int> naive_featurize(const vizpref::ConstraintCatalog& catalog,
                                        const vizpref::ChartSpec& chart) {
    std::vector<int> counts;
    for (const auto& def : catalog.constraints)
        if (def.kind == vizpref::ConstraintKind::soft)
            counts.push_back(naive_evaluate(def, chart));
    return counts;
}

inline double naive_cost(const vizpref::PreferenceModel& model,
                         const vizpref::ConstraintCatalog& catalog,
                         const vizpref::ChartSpec& chart) {
    std::vector<int> counts = naive_featurize(catalog, chart);
    double total = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) total += model.weights[i] * counts[i];
    return total;
}

// --- random charts -------------------------------------------------------------

/// Seeded generator over the full supported design space (all channels
/// including shape, both scale types for quantitative fields, random bins and
/// marks). Emits only hard-valid charts under the given catalog.
class RandomChartGen {
public:
    RandomChartGen(std::uint64_t seed, const vizpref::ConstraintCatalog& catalog)
        : rng_(seed), catalog_(catalog) {}

    vizpref::ChartSpec next() {
        using namespace vizpref;
        for (int attempt = 0; attempt < 1000; ++attempt) {
            ChartSpec chart;
            chart.task = pick({Task::value, Task::summary});
            chart.mark = pick({Mark::point, Mark::line, Mark::area, Mark::bar, Mark::tick});
            chart.fields = {
                FieldDef{"q1", FieldKind::quantitative, pick_bin(), Bin::unknown, flip()},
                FieldDef{"q2", FieldKind::quantitative, pick_bin(), Bin::unknown, flip()},
                FieldDef{"n", FieldKind::categorical, Bin::unknown, pick_bin(), flip()},
            };
            std::vector<Channel> channels = {Channel::x,    Channel::y,   Channel::color,
                                             Channel::size, Channel::row, Channel::shape};
            for (std::size_t i = channels.size(); i > 1; --i)
                std::swap(channels[i - 1], channels[rng_() % i]);
            for (std::size_t i = 0; i < chart.fields.size(); ++i) {
                EncodingDef e;
                e.field = chart.fields[i].name;
                e.channel = channels[i];
                if (chart.fields[i].kind == FieldKind::quantitative) {
                    e.scale_type = flip() ? ScaleType::linear : ScaleType::ordinal;
                    if (e.scale_type == ScaleType::linear)
                        e.zero = flip() ? ZeroFlag::yes : ZeroFlag::no;
                } else {
                    e.scale_type = ScaleType::categorical;
                }
                chart.encodings.push_back(std::move(e));
            }
            chart.source_id = "rand-" + std::to_string(serial_++);
            chart = canonicalized(std::move(chart));
            if (vizpref::validate_hard(catalog_, chart).ok()) return chart;
        }
        throw std::runtime_error("random chart generation stalled");
    }

private:
    template <typename T> T pick(std::initializer_list<T> options) {
        auto it = options.begin();
        std::advance(it, rng_() % options.size());
        return *it;
    }
    vizpref::Bin pick_bin() { return flip() ? vizpref::Bin::low : vizpref::Bin::high; }
    bool flip() { return (rng_() & 1) != 0; }

    std::mt19937_64 rng_;
    const vizpref::ConstraintCatalog& catalog_;
    std::size_t serial_ = 0;
};

} // namespace testutil
