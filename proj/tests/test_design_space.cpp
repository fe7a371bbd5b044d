#include "helpers.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <set>

using namespace vizpref;

namespace {

ChartSpec design_chart(Channel q1_channel, Channel q2_channel, Channel n_channel,
                       const char* id) {
    ChartSpec c;
    c.task = Task::value;
    c.mark = Mark::point;
    c.fields = {
        FieldDef{"q1", FieldKind::quantitative, Bin::low, Bin::unknown, true},
        FieldDef{"q2", FieldKind::quantitative, Bin::high, Bin::unknown, false},
        FieldDef{"n", FieldKind::categorical, Bin::unknown, Bin::high, false},
    };
    auto encode = [&](const char* field, Channel channel) {
        const FieldDef* f = c.find_field(field);
        EncodingDef e;
        e.channel = channel;
        e.field = field;
        if (f->kind == FieldKind::quantitative) {
            e.scale_type = ScaleType::linear;
            e.zero = ZeroFlag::yes;
        } else {
            e.scale_type = ScaleType::categorical;
        }
        c.encodings.push_back(e);
    };
    encode("q1", q1_channel);
    encode("q2", q2_channel);
    encode("n", n_channel);
    c.source_id = id;
    return canonicalized(c);
}

} // namespace

TEST_CASE("extract_partial keeps shared facts, demotes split channels to none") {
    ChartSpec a = design_chart(Channel::x, Channel::y, Channel::color, "A");
    ChartSpec b = design_chart(Channel::x, Channel::y, Channel::row, "B");
    ChartSpec partial = extract_partial(a, b);

    CHECK(partial.task == Task::value);
    CHECK(partial.mark == Mark::point);
    REQUIRE(partial.fields.size() == 3);
    REQUIRE(partial.encodings.size() == 3);

    const EncodingDef* q1 = partial.find_encoding_of("q1");
    REQUIRE(q1 != nullptr);
    CHECK(q1->channel == Channel::x);
    CHECK(q1->scale_type == ScaleType::linear); // shared channel: scale fact kept
    CHECK(q1->zero == ZeroFlag::yes);
    const EncodingDef* q2 = partial.find_encoding_of("q2");
    REQUIRE(q2 != nullptr);
    CHECK(q2->channel == Channel::y);
    const EncodingDef* n = partial.find_encoding_of("n");
    REQUIRE(n != nullptr);
    CHECK(n->channel == Channel::none); // encoded in both, channels differ
    CHECK(n->scale_type == ScaleType::unspecified); // facts are per (field, channel)
}

TEST_CASE("extract_partial of a chart with itself is the chart") {
    ChartSpec a = design_chart(Channel::x, Channel::y, Channel::color, "A");
    ChartSpec partial = extract_partial(a, a);
    ChartSpec expected = a;
    expected.source_id = partial.source_id;
    CHECK(partial == expected);
}

TEST_CASE("extract_partial requires matching data facts") {
    ChartSpec a = design_chart(Channel::x, Channel::y, Channel::color, "A");
    ChartSpec b = design_chart(Channel::x, Channel::y, Channel::row, "B");
    SECTION("task mismatch") {
        b.task = Task::summary;
        CHECK_THROWS_AS(extract_partial(a, b), Error);
    }
    SECTION("bin mismatch") {
        for (auto& f : b.fields)
            if (f.name == "q1") f.entropy_bin = Bin::high;
        CHECK_THROWS_WITH(extract_partial(a, b),
                          Catch::Matchers::ContainsSubstring("data facts differ"));
    }
}

TEST_CASE("corpus-wide: partials subsume both parents") {
    auto catalog = testutil::builtin_catalog();
    CorpusSpec spec;
    spec.data_variants.cardinality_bins = {Bin::high}; // trim for speed
    Corpus corpus = generate_corpus(spec, catalog);
    for (const auto& pair : corpus.pairs) {
        ChartSpec partial = extract_partial(corpus.charts[pair.a], corpus.charts[pair.b]);
        REQUIRE(subsumes(partial, corpus.charts[pair.a]));
        REQUIRE(subsumes(partial, corpus.charts[pair.b]));
    }
}

TEST_CASE("complete_enumeration: fully specified partial yields itself") {
    auto catalog = testutil::builtin_catalog();
    ChartSpec chart = design_chart(Channel::x, Channel::y, Channel::color, "full");
    auto completions = complete_enumeration(catalog, chart);
    REQUIRE(completions.size() == 1);
    ChartSpec expected = chart;
    expected.source_id = completions[0].source_id;
    CHECK(completions[0] == expected);
}

TEST_CASE("complete_enumeration: one categorical field over two free channels") {
    auto catalog = testutil::builtin_catalog();
    // occupy x, y, size, shape; n may take only color or row
    ChartSpec partial;
    partial.task = Task::value;
    partial.mark = Mark::point;
    partial.fields = {
        FieldDef{"q1", FieldKind::quantitative, Bin::low, Bin::unknown, true},
        FieldDef{"q2", FieldKind::quantitative, Bin::high, Bin::unknown, false},
        FieldDef{"q3", FieldKind::quantitative, Bin::low, Bin::unknown, false},
        FieldDef{"q4", FieldKind::quantitative, Bin::high, Bin::unknown, false},
        FieldDef{"n", FieldKind::categorical, Bin::unknown, Bin::high, false},
    };
    partial.encodings = {
        EncodingDef{Channel::x, "q1", ScaleType::linear, ZeroFlag::yes},
        EncodingDef{Channel::y, "q2", ScaleType::linear, ZeroFlag::yes},
        EncodingDef{Channel::size, "q3", ScaleType::linear, ZeroFlag::yes},
        EncodingDef{Channel::shape, "q4", ScaleType::ordinal, ZeroFlag::unspecified},
    };
    auto completions = complete_enumeration(catalog, partial);
    REQUIRE(completions.size() == 2);
    std::set<Channel> n_channels;
    for (const auto& c : completions) {
        const EncodingDef* n = c.find_encoding_of("n");
        REQUIRE(n != nullptr);
        CHECK(n->scale_type == ScaleType::categorical);
        n_channels.insert(n->channel);
    }
    CHECK(n_channels == std::set<Channel>{Channel::color, Channel::row});
}

TEST_CASE("complete_enumeration: outputs subsume the partial and pass hard checks") {
    auto catalog = testutil::builtin_catalog();
    ChartSpec a = design_chart(Channel::x, Channel::color, Channel::y, "A");
    ChartSpec b = design_chart(Channel::y, Channel::size, Channel::x, "B");
    ChartSpec partial = extract_partial(a, b); // everything split: wide-open space
    auto completions = complete_enumeration(catalog, partial);
    REQUIRE(completions.size() > 10);
    std::set<std::string> canonical;
    for (const auto& c : completions) {
        REQUIRE(subsumes(partial, c));
        REQUIRE(validate_hard(catalog, c).ok());
        REQUIRE(c.is_complete());
        canonical.insert(serialize_dictionary(c));
    }
    // deterministic order, no duplicates
    CHECK(canonical.size() == completions.size());
    auto again = complete_enumeration(catalog, partial);
    REQUIRE(again.size() == completions.size());
    for (std::size_t i = 0; i < again.size(); ++i)
        REQUIRE(serialize_dictionary(again[i]) == serialize_dictionary(completions[i]));
}

TEST_CASE("complete_enumeration agrees with independent brute force on two fields") {
    auto catalog = testutil::builtin_catalog();
    ChartSpec partial;
    partial.task = Task::summary;
    partial.fields = {
        FieldDef{"q1", FieldKind::quantitative, Bin::low, Bin::unknown, true},
        FieldDef{"n", FieldKind::categorical, Bin::unknown, Bin::low, true},
    };
    // nothing else pinned: mark free, channels free

    // independent brute force: nested loops over the whole space
    std::set<std::string> expected;
    const Channel channels[] = {Channel::x,    Channel::y,   Channel::color,
                                Channel::size, Channel::row, Channel::shape};
    const Mark marks[] = {Mark::point, Mark::line, Mark::area, Mark::bar, Mark::tick};
    for (Mark mark : marks)
        for (Channel c1 : channels)
            for (Channel c2 : channels) {
                if (c1 == c2) continue;
                struct ScaleChoice {
                    ScaleType scale;
                    ZeroFlag zero;
                };
                std::vector<ScaleChoice> q1_scales = {{ScaleType::linear, ZeroFlag::no},
                                                      {ScaleType::linear, ZeroFlag::yes},
                                                      {ScaleType::ordinal,
                                                       ZeroFlag::unspecified}};
                for (const auto& sc : q1_scales) {
                    ChartSpec chart;
                    chart.task = partial.task;
                    chart.mark = mark;
                    chart.fields = partial.fields;
                    chart.encodings = {
                        EncodingDef{c1, "q1", sc.scale, sc.zero},
                        EncodingDef{c2, "n", ScaleType::categorical, ZeroFlag::unspecified},
                    };
                    chart = canonicalized(chart);
                    if (!validate_hard(catalog, chart).ok()) continue;
                    if (!subsumes(partial, chart)) continue;
                    expected.insert(serialize_dictionary(chart));
                }
            }

    auto completions = complete_enumeration(catalog, partial);
    std::set<std::string> actual;
    for (const auto& c : completions) actual.insert(serialize_dictionary(c));
    CHECK(actual == expected);
}

TEST_CASE("complete_enumeration: over-constrained partials are an error") {
    auto catalog = testutil::builtin_catalog();
    ChartSpec partial;
    partial.task = Task::value;
    partial.mark = Mark::point;
    for (int i = 0; i < 7; ++i) // seven fields cannot fit six channels
        partial.fields.push_back(FieldDef{"f" + std::to_string(i),
                                          FieldKind::quantitative, Bin::low, Bin::unknown,
                                          false});
    CHECK_THROWS_WITH(complete_enumeration(catalog, partial),
                      Catch::Matchers::ContainsSubstring("empty completion space"));
}
