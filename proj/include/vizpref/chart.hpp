// Chart fact model: data fields, encodings, and the (possibly partial)
// specification built from them.
//
// A ChartSpec is a bag of facts. It is a *chart* when every design fact is
// decided: task present, mark present, every encoding on a concrete channel,
// every scale type specified. The `zero` flag is an optional extra fact on
// linear scales and does not participate in completeness. Anything short of
// complete is a partial specification.
//
// All types are immutable values after construction; every operation here is
// a pure function.

#pragma once

#include "error.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

namespace vizpref {

enum class FieldKind { quantitative, categorical };
enum class Bin { low, high, unknown };
enum class Channel { x, y, color, size, row, shape, none };
enum class ScaleType { linear, ordinal, categorical, unspecified };
enum class ZeroFlag { yes, no, unspecified };
enum class Task { value, summary };
enum class Mark { point, line, area, bar, tick };

/// Canonical channel order used by the codec and all canonical listings.
inline constexpr Channel kChannelOrder[] = {Channel::x,    Channel::y,
                                            Channel::color, Channel::size,
                                            Channel::row,  Channel::shape,
                                            Channel::none};

inline int channel_rank(Channel c) {
    switch (c) {
    case Channel::x: return 0;
    case Channel::y: return 1;
    case Channel::color: return 2;
    case Channel::size: return 3;
    case Channel::row: return 4;
    case Channel::shape: return 5;
    case Channel::none: return 6;
    }
    return 7;
}

inline std::string to_string(Channel c) {
    switch (c) {
    case Channel::x: return "x";
    case Channel::y: return "y";
    case Channel::color: return "color";
    case Channel::size: return "size";
    case Channel::row: return "row";
    case Channel::shape: return "shape";
    case Channel::none: return "none";
    }
    return "?";
}

inline std::string to_string(FieldKind k) {
    return k == FieldKind::quantitative ? "quantitative" : "categorical";
}

inline std::string to_string(Bin b) {
    switch (b) {
    case Bin::low: return "low";
    case Bin::high: return "high";
    case Bin::unknown: return "unknown";
    }
    return "?";
}

inline std::string to_string(ScaleType s) {
    switch (s) {
    case ScaleType::linear: return "linear";
    case ScaleType::ordinal: return "ordinal";
    case ScaleType::categorical: return "categorical";
    case ScaleType::unspecified: return "unspecified";
    }
    return "?";
}

inline std::string to_string(Task t) { return t == Task::value ? "value" : "summary"; }

inline std::string to_string(Mark m) {
    switch (m) {
    case Mark::point: return "point";
    case Mark::line: return "line";
    case Mark::area: return "area";
    case Mark::bar: return "bar";
    case Mark::tick: return "tick";
    }
    return "?";
}

struct FieldDef {
    std::string name;
    FieldKind kind = FieldKind::quantitative;
    Bin entropy_bin = Bin::unknown;       // binned entropy; quantitative fields
    Bin cardinality_bin = Bin::unknown;   // binned cardinality; categorical fields
    bool interest = false;                // variable of interest for the task

    bool operator==(const FieldDef&) const = default;
};

struct EncodingDef {
    Channel channel = Channel::none;      // none = field encoded, channel undecided
    std::string field;
    ScaleType scale_type = ScaleType::unspecified;
    ZeroFlag zero = ZeroFlag::unspecified;

    bool operator==(const EncodingDef&) const = default;
};

struct ChartSpec {
    std::optional<Task> task;
    std::optional<Mark> mark;
    std::vector<FieldDef> fields;
    std::vector<EncodingDef> encodings;
    std::string source_id;

    bool operator==(const ChartSpec& other) const {
        return task == other.task && mark == other.mark && fields == other.fields &&
               encodings == other.encodings;
        // source_id is provenance, not content
    }

    const FieldDef* find_field(const std::string& name) const {
        for (const auto& f : fields)
            if (f.name == name) return &f;
        return nullptr;
    }

    const EncodingDef* find_encoding_of(const std::string& field) const {
        for (const auto& e : encodings)
            if (e.field == field) return &e;
        return nullptr;
    }

    const EncodingDef* find_encoding_on(Channel c) const {
        for (const auto& e : encodings)
            if (e.channel == c) return &e;
        return nullptr;
    }

    /// Every design fact decided: task, mark, concrete channels, scale types.
    bool is_complete() const {
        if (!task || !mark) return false;
        for (const auto& e : encodings)
            if (e.channel == Channel::none || e.scale_type == ScaleType::unspecified)
                return false;
        return true;
    }
};

/// Sort fields by name, encodings by canonical channel order (ties by field
/// name, for partials where several encodings sit on channel none).
inline ChartSpec canonicalized(ChartSpec spec) {
    std::sort(spec.fields.begin(), spec.fields.end(),
              [](const FieldDef& a, const FieldDef& b) { return a.name < b.name; });
    std::sort(spec.encodings.begin(), spec.encodings.end(),
              [](const EncodingDef& a, const EncodingDef& b) {
                  int ra = channel_rank(a.channel), rb = channel_rank(b.channel);
                  if (ra != rb) return ra < rb;
                  return a.field < b.field;
              });
    return spec;
}

/// Structural invariants shared by charts and partials. Throws on violation.
inline void validate_spec(const ChartSpec& spec) {
    for (std::size_t i = 0; i < spec.fields.size(); ++i) {
        if (spec.fields[i].name.empty()) throw Error("field name must be non-empty");
        for (std::size_t j = i + 1; j < spec.fields.size(); ++j)
            if (spec.fields[i].name == spec.fields[j].name)
                throw Error("duplicate field name: " + spec.fields[i].name);
    }
    for (const auto& e : spec.encodings) {
        const FieldDef* f = spec.find_field(e.field);
        if (f == nullptr) throw Error("encoding references undeclared field: " + e.field);
        if (e.scale_type == ScaleType::categorical && f->kind != FieldKind::categorical)
            throw Error("categorical scale on non-categorical field: " + e.field);
        if (e.zero != ZeroFlag::unspecified && e.scale_type != ScaleType::linear)
            throw Error("zero is only valid on linear scales (field " + e.field + ")");
        if (e.channel == Channel::none &&
            (e.scale_type != ScaleType::unspecified || e.zero != ZeroFlag::unspecified))
            throw Error("undecided-channel encoding cannot carry scale facts (field " +
                        e.field + ")");
    }
    // A field encoded twice is model-valid but hard-invalid; the catalog's
    // no_duplicate_field violation pattern owns that check.
    for (std::size_t i = 0; i < spec.encodings.size(); ++i)
        for (std::size_t j = i + 1; j < spec.encodings.size(); ++j)
            if (spec.encodings[i].channel != Channel::none &&
                spec.encodings[i].channel == spec.encodings[j].channel)
                throw Error("duplicate channel: " + to_string(spec.encodings[i].channel));
}

/// Chart invariants: structural invariants plus completeness. channel=none is
/// legal only in partials.
inline void validate_chart(const ChartSpec& chart) {
    validate_spec(chart);
    if (!chart.task) throw Error("chart must declare a task");
    if (!chart.mark) throw Error("chart must declare a mark");
    for (const auto& e : chart.encodings) {
        if (e.channel == Channel::none)
            throw Error("chart encodings must name a concrete channel (field " + e.field + ")");
        if (e.scale_type == ScaleType::unspecified)
            throw Error("chart encodings must name a scale type (field " + e.field + ")");
    }
}

/// Canonical field->channel signature, fields sorted by name:
/// "n:color q1:x q2:y".
inline std::string encoding_signature(const ChartSpec& chart) {
    std::vector<std::pair<std::string, Channel>> assignments;
    for (const auto& e : chart.encodings) assignments.emplace_back(e.field, e.channel);
    std::sort(assignments.begin(), assignments.end());
    std::string out;
    for (const auto& [field, channel] : assignments) {
        if (!out.empty()) out += ' ';
        out += field + ':' + to_string(channel);
    }
    return out;
}

/// True iff every specified fact in `partial` appears in `chart`. An encoding
/// entry with channel=none is satisfied by any encoding of that field. Field
/// bins count as facts only when binned (unknown imposes nothing).
/// Precondition: both declare the same field names; throws otherwise.
inline bool subsumes(const ChartSpec& partial, const ChartSpec& chart) {
    if (partial.fields.size() != chart.fields.size())
        throw Error("subsumes: field sets differ");
    for (const auto& pf : partial.fields)
        if (chart.find_field(pf.name) == nullptr)
            throw Error("subsumes: field sets differ (missing " + pf.name + ")");

    for (const auto& pf : partial.fields) {
        const FieldDef* cf = chart.find_field(pf.name);
        if (pf.kind != cf->kind) return false;
        if (pf.entropy_bin != Bin::unknown && pf.entropy_bin != cf->entropy_bin) return false;
        if (pf.cardinality_bin != Bin::unknown && pf.cardinality_bin != cf->cardinality_bin)
            return false;
        if (pf.interest != cf->interest) return false;
    }
    if (partial.task && (!chart.task || *partial.task != *chart.task)) return false;
    if (partial.mark && (!chart.mark || *partial.mark != *chart.mark)) return false;

    for (const auto& pe : partial.encodings) {
        const EncodingDef* ce = chart.find_encoding_of(pe.field);
        if (ce == nullptr) return false;
        if (pe.channel != Channel::none && pe.channel != ce->channel) return false;
        if (pe.scale_type != ScaleType::unspecified && pe.scale_type != ce->scale_type)
            return false;
        if (pe.zero != ZeroFlag::unspecified && pe.zero != ce->zero) return false;
    }
    return true;
}

} // namespace vizpref
