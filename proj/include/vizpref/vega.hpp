// Bidirectional mapping between the chart fact model and a strict Vega-Lite
// JSON subset, plus validation of judge-produced completions against partial
// specifications.
//
// Supported subset (docs/vegalite-subset.md): top-level keys `mark` (string
// or {type}) and `encoding` (object over x, y, color, size, row, shape);
// each channel entry may carry `field`, `type` (quantitative | ordinal |
// nominal), and `scale` containing only `zero`. Anything else is rejected
// with a named reason, never stripped: silently dropping a key would let a
// judge's design intent vanish from the learned model.

#pragma once

#include "catalog.hpp"
#include "chart.hpp"
#include "dictionary.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace vizpref {

namespace vega_detail {

/// Failures from the Vega-Lite reader, classified for verdict accounting.
/// `malformed` covers dangling fields, duplicate channels, and the zero-flag
/// scale rule; `unsupported` covers valid-but-out-of-subset Vega-Lite.
enum class ReadErrorKind { malformed, unsupported };

struct ReadError : Error {
    ReadError(ReadErrorKind k, const std::string& msg) : Error(msg), kind(k) {}
    ReadErrorKind kind;
};

inline Channel channel_from_key(const std::string& key) {
    if (key == "x") return Channel::x;
    if (key == "y") return Channel::y;
    if (key == "color") return Channel::color;
    if (key == "size") return Channel::size;
    if (key == "row") return Channel::row;
    if (key == "shape") return Channel::shape;
    throw ReadError(ReadErrorKind::unsupported, "unsupported encoding channel: " + key);
}

} // namespace vega_detail

/// Maps a Vega-Lite document (already JSON-parsed) to a chart. Field
/// declarations come from pipeline context, not the document; `task` is
/// attached from context as well. Throws vega_detail::ReadError.
inline ChartSpec from_vegalite(const nlohmann::json& doc,
                               const std::vector<FieldDef>& fields, Task task) {
    using vega_detail::ReadError;
    using vega_detail::ReadErrorKind;
    if (!doc.is_object())
        throw ReadError(ReadErrorKind::malformed, "document must be a JSON object");

    ChartSpec chart;
    chart.task = task;
    chart.fields = fields;

    for (const auto& [key, value] : doc.items()) {
        if (key != "mark" && key != "encoding")
            throw ReadError(ReadErrorKind::unsupported, "unsupported top-level key: " + key);
    }
    if (!doc.contains("mark"))
        throw ReadError(ReadErrorKind::malformed, "document lacks a mark");
    if (!doc.contains("encoding"))
        throw ReadError(ReadErrorKind::malformed, "document lacks an encoding");

    const auto& mark = doc["mark"];
    std::string mark_name;
    if (mark.is_string()) {
        mark_name = mark.get<std::string>();
    } else if (mark.is_object()) {
        for (const auto& [key, value] : mark.items())
            if (key != "type")
                throw ReadError(ReadErrorKind::unsupported,
                                "unsupported mark key: " + key);
        if (!mark.contains("type") || !mark["type"].is_string())
            throw ReadError(ReadErrorKind::malformed, "mark object lacks a type");
        mark_name = mark["type"].get<std::string>();
    } else {
        throw ReadError(ReadErrorKind::malformed, "mark must be a string or object");
    }
    if (mark_name == "point") chart.mark = Mark::point;
    else if (mark_name == "line") chart.mark = Mark::line;
    else if (mark_name == "area") chart.mark = Mark::area;
    else if (mark_name == "bar") chart.mark = Mark::bar;
    else if (mark_name == "tick") chart.mark = Mark::tick;
    else
        throw ReadError(ReadErrorKind::unsupported, "unsupported mark type: " + mark_name);

    const auto& encoding = doc["encoding"];
    if (!encoding.is_object())
        throw ReadError(ReadErrorKind::malformed, "encoding must be an object");
    for (const auto& [channel_key, entry] : encoding.items()) {
        Channel channel = vega_detail::channel_from_key(channel_key);
        if (!entry.is_object())
            throw ReadError(ReadErrorKind::malformed,
                            "encoding entry must be an object: " + channel_key);
        EncodingDef e;
        e.channel = channel;
        std::optional<std::string> type_name;
        for (const auto& [key, value] : entry.items()) {
            if (key == "field") {
                if (!value.is_string())
                    throw ReadError(ReadErrorKind::malformed,
                                    "field must be a string: " + channel_key);
                e.field = value.get<std::string>();
            } else if (key == "type") {
                if (!value.is_string())
                    throw ReadError(ReadErrorKind::malformed,
                                    "type must be a string: " + channel_key);
                type_name = value.get<std::string>();
            } else if (key == "scale") {
                if (!value.is_object())
                    throw ReadError(ReadErrorKind::malformed,
                                    "scale must be an object: " + channel_key);
                for (const auto& [sk, sv] : value.items()) {
                    if (sk != "zero")
                        throw ReadError(ReadErrorKind::unsupported,
                                        "unsupported scale key: " + sk);
                    if (!sv.is_boolean())
                        throw ReadError(ReadErrorKind::malformed,
                                        "zero must be a boolean: " + channel_key);
                    e.zero = sv.get<bool>() ? ZeroFlag::yes : ZeroFlag::no;
                }
            } else {
                throw ReadError(ReadErrorKind::unsupported,
                                "unsupported encoding key: " + key);
            }
        }
        if (e.field.empty())
            throw ReadError(ReadErrorKind::malformed,
                            "encoding entry lacks a field: " + channel_key);
        if (!type_name)
            throw ReadError(ReadErrorKind::unsupported,
                            "encoding entry lacks a type (type inference is unsupported): " +
                                channel_key);
        if (*type_name == "quantitative") e.scale_type = ScaleType::linear;
        else if (*type_name == "ordinal") e.scale_type = ScaleType::ordinal;
        else if (*type_name == "nominal") e.scale_type = ScaleType::categorical;
        else
            throw ReadError(ReadErrorKind::unsupported,
                            "unsupported encoding type: " + *type_name);
        if (e.zero != ZeroFlag::unspecified && e.scale_type != ScaleType::linear)
            throw ReadError(ReadErrorKind::malformed,
                            "zero is only valid on quantitative (linear) scales: " +
                                channel_key);
        const FieldDef* field = chart.find_field(e.field);
        if (field == nullptr)
            throw ReadError(ReadErrorKind::malformed, "unknown field: " + e.field);
        if (e.scale_type == ScaleType::categorical && field->kind != FieldKind::categorical)
            throw ReadError(ReadErrorKind::malformed,
                            "nominal type on a quantitative field: " + e.field);
        if (chart.find_encoding_on(channel) != nullptr)
            throw ReadError(ReadErrorKind::malformed,
                            "duplicate channel: " + channel_key);
        chart.encodings.push_back(std::move(e));
    }

    chart = canonicalized(std::move(chart));
    validate_spec(chart);
    return chart;
}

/// Deterministic canonical Vega-Lite (sorted keys, 2-space indent). Inverse
/// of from_vegalite on the supported subset.
inline nlohmann::json to_vegalite_json(const ChartSpec& chart) {
    validate_chart(chart);
    nlohmann::json encoding = nlohmann::json::object();
    for (const auto& e : chart.encodings) {
        nlohmann::json entry;
        entry["field"] = e.field;
        switch (e.scale_type) {
        case ScaleType::linear: entry["type"] = "quantitative"; break;
        case ScaleType::ordinal: entry["type"] = "ordinal"; break;
        case ScaleType::categorical: entry["type"] = "nominal"; break;
        case ScaleType::unspecified: throw Error("to_vegalite: unspecified scale");
        }
        if (e.zero != ZeroFlag::unspecified)
            entry["scale"] = {{"zero", e.zero == ZeroFlag::yes}};
        encoding[to_string(e.channel)] = std::move(entry);
    }
    return {{"mark", to_string(*chart.mark)}, {"encoding", encoding}};
}

inline std::string to_vegalite(const ChartSpec& chart) {
    return to_vegalite_json(chart).dump(2) + "\n";
}

// --- completion validation ---------------------------------------------------

enum class CompletionStatus {
    valid,
    syntax_error,
    violates_partial,
    missing_field,
    unsupported_feature,
    hard_violation, // spec's check order names hard validity; enum extended for it
};

inline std::string to_string(CompletionStatus s) {
    switch (s) {
    case CompletionStatus::valid: return "valid";
    case CompletionStatus::syntax_error: return "syntax_error";
    case CompletionStatus::violates_partial: return "violates_partial";
    case CompletionStatus::missing_field: return "missing_field";
    case CompletionStatus::unsupported_feature: return "unsupported_feature";
    case CompletionStatus::hard_violation: return "hard_violation";
    }
    return "?";
}

struct CompletionVerdict {
    CompletionStatus status = CompletionStatus::syntax_error;
    std::string detail;
    std::optional<ChartSpec> chart; // present iff status == valid
};

enum class CompletionFormat { vegalite, dictionary };

inline std::string to_string(CompletionFormat f) {
    return f == CompletionFormat::vegalite ? "vegalite" : "dictionary";
}

/// Validates arbitrary judge output against a partial specification. Checks
/// run in a fixed order so verdict statistics are comparable across runs:
/// parse, supported subset, all declared fields encoded, subsumption, hard
/// validity. The first failure wins. All failures are verdicts, not errors.
inline CompletionVerdict validate_completion(const ConstraintCatalog& catalog,
                                             const ChartSpec& partial,
                                             const std::string& completion_text,
                                             CompletionFormat format) {
    CompletionVerdict verdict;
    ChartSpec chart;
    if (format == CompletionFormat::vegalite) {
        nlohmann::json doc = nlohmann::json::parse(completion_text, nullptr,
                                                   /*allow_exceptions=*/false);
        if (doc.is_discarded()) {
            verdict.status = CompletionStatus::syntax_error;
            verdict.detail = "invalid JSON";
            return verdict;
        }
        if (!partial.task) {
            verdict.status = CompletionStatus::violates_partial;
            verdict.detail = "partial specification lacks a task";
            return verdict;
        }
        try {
            chart = from_vegalite(doc, partial.fields, *partial.task);
        } catch (const vega_detail::ReadError& e) {
            verdict.status = e.kind == vega_detail::ReadErrorKind::unsupported
                                 ? CompletionStatus::unsupported_feature
                                 : CompletionStatus::syntax_error;
            verdict.detail = e.what();
            return verdict;
        } catch (const Error& e) {
            verdict.status = CompletionStatus::syntax_error;
            verdict.detail = e.what();
            return verdict;
        }
    } else {
        try {
            chart = parse_dictionary(completion_text);
        } catch (const ParseError& e) {
            verdict.status = CompletionStatus::syntax_error;
            verdict.detail = e.what();
            return verdict;
        } catch (const Error& e) {
            verdict.status = CompletionStatus::syntax_error;
            verdict.detail = e.what();
            return verdict;
        }
        // Dictionary completions declare their own fields; data facts must
        // match the partial's.  A dictionary body may omit the field list, in
        // which case the partial's declarations are adopted.
        for (const auto& f : chart.fields) {
            const FieldDef* pf = partial.find_field(f.name);
            if (pf == nullptr) {
                verdict.status = CompletionStatus::syntax_error;
                verdict.detail = "unknown field: " + f.name;
                return verdict;
            }
        }
        // Design facts are what a completion asserts; the data facts come
        // from the stimulus, so the partial's declarations are adopted.
        chart.fields = partial.fields;
        if (!chart.task) chart.task = partial.task;
        chart = canonicalized(std::move(chart));
        try {
            validate_spec(chart);
        } catch (const Error& e) {
            verdict.status = CompletionStatus::violates_partial;
            verdict.detail = e.what();
            return verdict;
        }
    }

    if (!chart.is_complete()) {
        verdict.status = CompletionStatus::syntax_error;
        verdict.detail = "completion is not a fully specified chart";
        return verdict;
    }
    for (const auto& f : partial.fields) {
        if (chart.find_encoding_of(f.name) == nullptr) {
            verdict.status = CompletionStatus::missing_field;
            verdict.detail = "field not encoded: " + f.name;
            return verdict;
        }
    }
    bool subsumed = false;
    try {
        subsumed = subsumes(partial, chart);
    } catch (const Error& e) {
        verdict.status = CompletionStatus::violates_partial;
        verdict.detail = e.what();
        return verdict;
    }
    if (!subsumed) {
        verdict.status = CompletionStatus::violates_partial;
        verdict.detail = "completion contradicts a specified fact";
        return verdict;
    }
    HardValidation hv = validate_hard(catalog, chart);
    if (!hv.ok()) {
        verdict.status = CompletionStatus::hard_violation;
        std::string names;
        for (const auto& v : hv.violations) names += (names.empty() ? "" : ", ") + v;
        verdict.detail = "hard constraints violated: " + names;
        return verdict;
    }
    verdict.status = CompletionStatus::valid;
    verdict.detail = "ok";
    verdict.chart = std::move(chart);
    return verdict;
}

} // namespace vizpref
