#include "helpers.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace vizpref;

namespace {

ChartSpec three_field_chart() {
    ChartSpec c;
    c.task = Task::value;
    c.mark = Mark::point;
    c.fields = {
        FieldDef{"q1", FieldKind::quantitative, Bin::low, Bin::unknown, true},
        FieldDef{"q2", FieldKind::quantitative, Bin::high, Bin::unknown, false},
        FieldDef{"n", FieldKind::categorical, Bin::unknown, Bin::high, false},
    };
    c.encodings = {
        EncodingDef{Channel::x, "q1", ScaleType::linear, ZeroFlag::yes},
        EncodingDef{Channel::y, "q2", ScaleType::linear, ZeroFlag::yes},
        EncodingDef{Channel::color, "n", ScaleType::categorical, ZeroFlag::unspecified},
    };
    c.source_id = "fixture";
    return canonicalized(c);
}

} // namespace

TEST_CASE("the nested-shape snippet parses to a partial with one encoding") {
    // Nested shape: mark and scale as separate view items.
    const char* text =
        "view:\n"
        "- mark:\n"
        "  - type: point\n"
        "    encoding:\n"
        "    - { channel: x, field: q1 }\n"
        "- scale:\n"
        "  - { channel: x, type: linear, zero: true }\n";
    ChartSpec spec = parse_dictionary(text);
    CHECK(!spec.is_complete()); // no task key: partial
    REQUIRE(spec.encodings.size() == 1);
    CHECK(spec.encodings[0].channel == Channel::x);
    CHECK(spec.encodings[0].field == "q1");
    CHECK(spec.encodings[0].scale_type == ScaleType::linear);
    CHECK(spec.encodings[0].zero == ZeroFlag::yes);
    CHECK(spec.mark == Mark::point);
    // implicit field declaration, kind inferred from the linear scale
    REQUIRE(spec.fields.size() == 1);
    CHECK(spec.fields[0].name == "q1");
    CHECK(spec.fields[0].kind == FieldKind::quantitative);
    CHECK(spec.fields[0].entropy_bin == Bin::unknown);
}

TEST_CASE("empty view list is rejected: a chart must declare a mark") {
    CHECK_THROWS_WITH(parse_dictionary("task: value\nview:\n- scale:\n"
                                       "  - { channel: x, type: linear }\n"),
                      Catch::Matchers::ContainsSubstring("at least one mark"));
}

TEST_CASE("parse errors carry positions and name the offense") {
    using Catch::Matchers::ContainsSubstring;
    CHECK_THROWS_MATCHES(parse_dictionary("task: value\nview:\n- mark:\n"
                                          "  - type: point\n    encoding:\n"
                                          "    - { channel: diag, field: q1 }\n"),
                         ParseError, Catch::Matchers::MessageMatches(ContainsSubstring(
                                         "unknown channel token: diag")));
    CHECK_THROWS_MATCHES(
        parse_dictionary("task: value\nview:\n- mark:\n"
                         "  - type: point\n    encoding:\n"
                         "    - { channel: x, field: q1 }\n"
                         "    - { channel: x, field: q2 }\n"),
        ParseError,
        Catch::Matchers::MessageMatches(ContainsSubstring("duplicate channel: x")));
    CHECK_THROWS_MATCHES(
        parse_dictionary("task: value\nfield:\n- { name: q2, type: quantitative }\n"
                         "view:\n- mark:\n  - type: point\n    encoding:\n"
                         "    - { channel: x, field: q1 }\n"),
        ParseError,
        Catch::Matchers::MessageMatches(ContainsSubstring("dangling field reference")));
    CHECK_THROWS_MATCHES(
        parse_dictionary("task: value\nminimap: true\nview:\n- mark:\n  - type: point\n"),
        ParseError,
        Catch::Matchers::MessageMatches(ContainsSubstring("unknown top-level key")));
    // zero is a linear-scale fact only
    CHECK_THROWS_MATCHES(
        parse_dictionary("task: value\nview:\n- mark:\n  - type: point\n    encoding:\n"
                         "    - { channel: color, field: n }\n"
                         "  scale:\n  - { channel: color, type: categorical, zero: true }\n"),
        ParseError,
        Catch::Matchers::MessageMatches(ContainsSubstring("zero is only valid on linear")));
}

TEST_CASE("positions in parse errors point at the offending line") {
    try {
        parse_dictionary("task: value\nview:\n- mark:\n  - type: hexbin\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 4);
    }
}

TEST_CASE("canonical serialization orders encodings by channel and omits unspecified") {
    ChartSpec c = three_field_chart();
    // scramble field/encoding order
    std::swap(c.fields[0], c.fields[2]);
    std::swap(c.encodings[0], c.encodings[2]);
    std::string text = serialize_dictionary(c);
    std::size_t x_pos = text.find("channel: x");
    std::size_t color_pos = text.find("channel: color");
    REQUIRE(x_pos != std::string::npos);
    REQUIRE(color_pos != std::string::npos);
    CHECK(x_pos < color_pos);
    // categorical scale got no zero entry
    CHECK(text.find("type: categorical, zero") == std::string::npos);

    ChartSpec partial = three_field_chart();
    for (auto& e : partial.encodings) e.zero = ZeroFlag::unspecified;
    std::string partial_text = serialize_dictionary(partial);
    CHECK(partial_text.find("zero") == std::string::npos);
}

TEST_CASE("serialization is byte-identical across calls") {
    ChartSpec c = three_field_chart();
    CHECK(serialize_dictionary(c) == serialize_dictionary(c));
}

TEST_CASE("round-trip: parse(serialize(c)) is structurally equal, corpus-wide") {
    auto catalog = testutil::builtin_catalog();
    Corpus corpus = generate_corpus(CorpusSpec{}, catalog);
    REQUIRE(corpus.charts.size() > 100);
    for (const auto& chart : corpus.charts) {
        ChartSpec reparsed = parse_dictionary(serialize_dictionary(chart));
        REQUIRE(reparsed == chart);
        REQUIRE(reparsed.is_complete());
    }
}

TEST_CASE("round-trip holds for randomized charts and serialize is injective") {
    auto catalog = testutil::builtin_catalog();
    testutil::RandomChartGen gen(11, catalog);
    std::vector<ChartSpec> charts;
    std::vector<std::string> texts;
    for (int i = 0; i < 200; ++i) {
        ChartSpec c = gen.next();
        ChartSpec reparsed = parse_dictionary(serialize_dictionary(c));
        REQUIRE(reparsed == c);
        charts.push_back(std::move(c));
        texts.push_back(serialize_dictionary(charts.back()));
    }
    for (std::size_t i = 0; i < charts.size(); ++i)
        for (std::size_t j = i + 1; j < charts.size(); ++j)
            if (!(charts[i] == charts[j])) REQUIRE(texts[i] != texts[j]);
}

TEST_CASE("subsumes: specified facts must appear; channel none needs any encoding") {
    ChartSpec chart = three_field_chart();

    SECTION("subset of facts") {
        ChartSpec partial = chart;
        partial.encodings = {
            EncodingDef{Channel::x, "q1", ScaleType::unspecified, ZeroFlag::unspecified}};
        CHECK(subsumes(partial, chart));
    }
    SECTION("contradicted scale fact") {
        ChartSpec partial = chart;
        partial.encodings = {
            EncodingDef{Channel::x, "q1", ScaleType::ordinal, ZeroFlag::unspecified}};
        CHECK(!subsumes(partial, chart));
    }
    SECTION("channel none satisfied by any encoding of the field") {
        ChartSpec partial = chart;
        partial.encodings = {
            EncodingDef{Channel::none, "n", ScaleType::unspecified, ZeroFlag::unspecified}};
        CHECK(subsumes(partial, chart));

        ChartSpec chart_without_n = chart;
        std::erase_if(chart_without_n.encodings,
                      [](const EncodingDef& e) { return e.field == "n"; });
        REQUIRE(chart_without_n.find_encoding_of("n") == nullptr);
        CHECK(!subsumes(partial, chart_without_n));
    }
    SECTION("field-set mismatch is an error") {
        ChartSpec partial = chart;
        partial.fields.pop_back();
        partial.encodings.pop_back();
        CHECK_THROWS_AS(subsumes(partial, chart), Error);
    }
    SECTION("reflexive on complete charts") { CHECK(subsumes(chart, chart)); }
}

TEST_CASE("subsumes is transitive across partial refinements, corpus-checked") {
    auto catalog = testutil::builtin_catalog();
    CorpusSpec spec;
    spec.data_variants.entropy_bins = {Bin::low};
    spec.data_variants.cardinality_bins = {Bin::high};
    Corpus corpus = generate_corpus(spec, catalog);
    // chain: strip zero facts, then strip scales + channels of n; each level
    // subsumes the next, and transitivity to the full chart must hold.
    int checked = 0;
    for (const auto& chart : corpus.charts) {
        ChartSpec mid = chart;
        for (auto& e : mid.encodings) e.zero = ZeroFlag::unspecified;
        ChartSpec top = mid;
        for (auto& e : top.encodings) {
            e.scale_type = ScaleType::unspecified;
            if (e.field == "n") e.channel = Channel::none;
        }
        REQUIRE(subsumes(top, mid));
        REQUIRE(subsumes(mid, chart));
        REQUIRE(subsumes(top, chart));
        ++checked;
    }
    REQUIRE(checked > 0);
}

TEST_CASE("model invariants reject malformed specs") {
    ChartSpec chart = three_field_chart();
    SECTION("dangling reference") {
        chart.encodings.push_back(
            EncodingDef{Channel::row, "ghost", ScaleType::ordinal, ZeroFlag::unspecified});
        CHECK_THROWS_WITH(validate_spec(chart),
                          Catch::Matchers::ContainsSubstring("undeclared field"));
    }
    SECTION("categorical scale needs a categorical field") {
        chart.encodings[0].scale_type = ScaleType::categorical;
        chart.encodings[0].zero = ZeroFlag::unspecified;
        CHECK_THROWS_WITH(validate_spec(chart),
                          Catch::Matchers::ContainsSubstring("categorical scale"));
    }
    SECTION("zero off linear scales") {
        chart.encodings[2].zero = ZeroFlag::yes;
        CHECK_THROWS_WITH(validate_spec(chart),
                          Catch::Matchers::ContainsSubstring("zero is only valid"));
    }
    SECTION("duplicate channel") {
        chart.encodings[1].channel = Channel::x;
        CHECK_THROWS_WITH(validate_spec(chart),
                          Catch::Matchers::ContainsSubstring("duplicate channel"));
    }
    SECTION("incomplete charts fail chart validation but pass spec validation") {
        chart.task.reset();
        validate_spec(chart);
        CHECK_THROWS_AS(validate_chart(chart), Error);
    }
}

TEST_CASE("encoding signature sorts assignments by field name") {
    ChartSpec chart = three_field_chart();
    CHECK(encoding_signature(chart) == "n:color q1:x q2:y");
}
