// Shared-fact extraction from chart pairs and enumeration of hard-valid
// completions of a partial specification.
//
// Completion design space: channels {x, y, color, size, row, shape}, one
// encoding per declared field, scale by field kind (quantitative -> linear or
// ordinal, categorical -> categorical), zero in {true, false} on linear
// scales, mark over the five mark types when the partial leaves it open.

#pragma once

#include "catalog.hpp"
#include "chart.hpp"
#include "dictionary.hpp"

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

namespace vizpref {

/// Intersection of two same-data charts' facts. Data facts (fields, bins,
/// task) are always preserved and must match; shared design facts are kept; a
/// field encoded in both charts on different channels yields an entry with
/// channel=none; scale/zero facts are kept per (field, channel), so they
/// survive only when the channel is shared and the fact is identical.
inline ChartSpec extract_partial(const ChartSpec& chart_a, const ChartSpec& chart_b) {
    if (chart_a.task != chart_b.task) throw Error("extract_partial: tasks differ");
    if (chart_a.fields.size() != chart_b.fields.size())
        throw Error("extract_partial: field sets differ");
    for (const auto& fa : chart_a.fields) {
        const FieldDef* fb = chart_b.find_field(fa.name);
        if (fb == nullptr || !(fa == *fb))
            throw Error("extract_partial: data facts differ for field " + fa.name);
    }

    ChartSpec partial;
    partial.task = chart_a.task;
    partial.fields = chart_a.fields;
    partial.source_id = "partial(" + chart_a.source_id + "," + chart_b.source_id + ")";
    if (chart_a.mark && chart_a.mark == chart_b.mark) partial.mark = chart_a.mark;

    for (const auto& fa : chart_a.fields) {
        const EncodingDef* ea = chart_a.find_encoding_of(fa.name);
        const EncodingDef* eb = chart_b.find_encoding_of(fa.name);
        if (ea == nullptr || eb == nullptr) continue; // encoded in both or no fact
        EncodingDef shared;
        shared.field = fa.name;
        if (ea->channel == eb->channel) {
            shared.channel = ea->channel;
            if (ea->scale_type == eb->scale_type) shared.scale_type = ea->scale_type;
            if (shared.scale_type == ScaleType::linear && ea->zero == eb->zero)
                shared.zero = ea->zero;
        } else {
            shared.channel = Channel::none;
        }
        partial.encodings.push_back(std::move(shared));
    }
    partial = canonicalized(std::move(partial));
    validate_spec(partial);
    return partial;
}

namespace enum_detail {

inline const std::vector<Channel> kCompletionChannels = {
    Channel::x, Channel::y, Channel::color, Channel::size, Channel::row, Channel::shape};

inline std::vector<ScaleType> scales_for(FieldKind kind) {
    if (kind == FieldKind::categorical) return {ScaleType::categorical};
    return {ScaleType::linear, ScaleType::ordinal};
}

} // namespace enum_detail

/// All hard-valid completions of `partial` within the supported design space,
/// in a deterministic canonical order (fields resolved in name order;
/// channels, scales, then zero values in canonical order). Every output
/// subsumes the partial and passes hard validation. Throws when the space is
/// empty (over-constrained partial).
inline std::vector<ChartSpec> complete_enumeration(const ConstraintCatalog& catalog,
                                                   const ChartSpec& partial) {
    validate_spec(partial);
    ChartSpec base = canonicalized(partial);

    // Resolution order: fields by name. Each needs one encoding.
    std::vector<const FieldDef*> fields;
    for (const auto& f : base.fields) fields.push_back(&f);

    std::vector<Mark> marks;
    if (base.mark) marks = {*base.mark};
    else marks = {Mark::point, Mark::line, Mark::area, Mark::bar, Mark::tick};

    std::vector<ChartSpec> out;
    std::vector<EncodingDef> chosen;

    auto emit = [&](Mark mark) {
        ChartSpec chart;
        chart.task = base.task;
        chart.mark = mark;
        chart.fields = base.fields;
        chart.encodings = chosen;
        chart = canonicalized(std::move(chart));
        if (!validate_hard(catalog, chart).ok()) return;
        if (!subsumes(base, chart)) return;
        chart.source_id = "completion:" + encoding_signature(chart);
        out.push_back(std::move(chart));
    };

    auto channel_taken = [&](Channel c) {
        for (const auto& e : chosen)
            if (e.channel == c) return true;
        return false;
    };

    std::function<void(std::size_t, Mark)> recurse = [&](std::size_t idx, Mark mark) {
        if (idx == fields.size()) {
            emit(mark);
            return;
        }
        const FieldDef& field = *fields[idx];
        const EncodingDef* pinned = base.find_encoding_of(field.name);

        std::vector<Channel> channels;
        if (pinned != nullptr && pinned->channel != Channel::none)
            channels = {pinned->channel};
        else
            channels = enum_detail::kCompletionChannels;

        for (Channel channel : channels) {
            if (channel_taken(channel)) continue;
            std::vector<ScaleType> scales;
            if (pinned != nullptr && pinned->scale_type != ScaleType::unspecified)
                scales = {pinned->scale_type};
            else
                scales = enum_detail::scales_for(field.kind);
            for (ScaleType scale : scales) {
                std::vector<ZeroFlag> zeros;
                if (scale != ScaleType::linear)
                    zeros = {ZeroFlag::unspecified};
                else if (pinned != nullptr && pinned->zero != ZeroFlag::unspecified)
                    zeros = {pinned->zero};
                else
                    zeros = {ZeroFlag::no, ZeroFlag::yes};
                for (ZeroFlag zero : zeros) {
                    chosen.push_back(EncodingDef{channel, field.name, scale, zero});
                    recurse(idx + 1, mark);
                    chosen.pop_back();
                }
            }
        }
    };

    for (Mark mark : marks) recurse(0, mark);
    if (out.empty()) throw Error("complete_enumeration: empty completion space");
    return out;
}

} // namespace vizpref
