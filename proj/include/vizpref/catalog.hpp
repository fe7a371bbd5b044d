// Constraint knowledge base: a small declarative DSL, its interpreter, chart
// validation against hard constraints, and featurization into soft-constraint
// count vectors.
//
// One `constraint` block per definition:
//
//   constraint linear_color soft { match encoding where channel=color and scale=linear }
//   constraint summary_facet soft { when task=summary match encoding where channel=row }
//   constraint line_area_requires_xy hard { when mark=line|area and missing=x|y }
//
// Selector values admit `|` disjunction. Hard constraints are violation
// patterns: a chart is valid iff every hard constraint counts zero. The DSL
// has no negation or recursion; structural predicates (missing=, duplicate_*,
// unencoded_field) are when-clause atoms restricted to per_chart scope, which
// keeps per_match counts monotone under encoding insertion.

#pragma once

#include "chart.hpp"
#include "digest.hpp"
#include "error.hpp"

#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vizpref {

enum class ConstraintKind { hard, soft };
enum class Scope { per_match, per_chart };

/// One `key=value|value` atom. Key namespaces:
///   when:  task, mark, missing, duplicate_field, duplicate_channel, unencoded_field
///   match: channel, scale, zero, field.kind, field.entropy, field.cardinality,
///          field.interest
struct Selector {
    std::string key;
    std::vector<std::string> values; // empty for bare structural flags

    bool operator==(const Selector&) const = default;
};

struct ConstraintDef {
    std::string name;
    ConstraintKind kind = ConstraintKind::soft;
    std::vector<Selector> when_clause;   // chart-level conjunction
    std::vector<Selector> match_clause;  // encoding pattern conjunction
    bool has_match = false;              // `match encoding` present (maybe with no where)
    Scope scope = Scope::per_chart;

    bool operator==(const ConstraintDef&) const = default;
};

namespace kb_detail {

inline bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

class DslLexer {
public:
    explicit DslLexer(std::string_view text) : text_(text) {}

    struct Token {
        enum class Type { ident, symbol, end } type = Type::end;
        std::string value;
        int line = 1, col = 1;
    };

    Token next() {
        skip_ws_and_comments();
        Token t;
        t.line = line_;
        t.col = col_;
        if (pos_ >= text_.size()) {
            t.type = Token::Type::end;
            return t;
        }
        char c = text_[pos_];
        if (is_ident_char(c)) {
            std::size_t start = pos_;
            while (pos_ < text_.size() && is_ident_char(text_[pos_])) advance();
            t.type = Token::Type::ident;
            t.value = std::string(text_.substr(start, pos_ - start));
            return t;
        }
        if (c == '{' || c == '}' || c == '=' || c == '|') {
            t.type = Token::Type::symbol;
            t.value = std::string(1, c);
            advance();
            return t;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
    }

private:
    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_ws_and_comments() {
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
                advance();
            } else if (c == '#') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else {
                break;
            }
        }
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1, col_ = 1;
};

inline const std::vector<std::string> kWhenKeys = {
    "task", "mark", "missing", "duplicate_field", "duplicate_channel", "unencoded_field"};
inline const std::vector<std::string> kMatchKeys = {
    "channel", "scale", "zero", "field.kind", "field.entropy", "field.cardinality",
    "field.interest"};
inline const std::vector<std::string> kStructuralKeys = {
    "missing", "duplicate_field", "duplicate_channel", "unencoded_field"};

inline bool contains(const std::vector<std::string>& v, const std::string& s) {
    for (const auto& e : v)
        if (e == s) return true;
    return false;
}

} // namespace kb_detail

struct ConstraintCatalog {
    std::vector<ConstraintDef> constraints; // document order
    std::string catalog_hash;               // sha256 hex of canonical serialization

    std::vector<const ConstraintDef*> soft() const {
        std::vector<const ConstraintDef*> out;
        for (const auto& c : constraints)
            if (c.kind == ConstraintKind::soft) out.push_back(&c);
        return out;
    }

    std::vector<const ConstraintDef*> hard() const {
        std::vector<const ConstraintDef*> out;
        for (const auto& c : constraints)
            if (c.kind == ConstraintKind::hard) out.push_back(&c);
        return out;
    }

    std::size_t soft_count() const {
        std::size_t n = 0;
        for (const auto& c : constraints)
            if (c.kind == ConstraintKind::soft) ++n;
        return n;
    }

    std::vector<std::string> soft_names() const {
        std::vector<std::string> out;
        for (const auto& c : constraints)
            if (c.kind == ConstraintKind::soft) out.push_back(c.name);
        return out;
    }

    const ConstraintDef* find(const std::string& name) const {
        for (const auto& c : constraints)
            if (c.name == name) return &c;
        return nullptr;
    }

    /// Index into the soft-constraint ordering, or -1.
    int soft_index(const std::string& name) const {
        int i = 0;
        for (const auto& c : constraints) {
            if (c.kind != ConstraintKind::soft) continue;
            if (c.name == name) return i;
            ++i;
        }
        return -1;
    }
};

/// Canonical DSL re-serialization; the catalog hash is the sha256 of this.
inline std::string serialize_catalog(const ConstraintCatalog& catalog) {
    std::string out;
    auto append_clause = [&out](const std::vector<Selector>& clause) {
        for (std::size_t i = 0; i < clause.size(); ++i) {
            if (i > 0) out += " and ";
            out += clause[i].key;
            for (std::size_t j = 0; j < clause[i].values.size(); ++j)
                out += (j == 0 ? "=" : "|") + clause[i].values[j];
        }
    };
    for (const auto& c : catalog.constraints) {
        out += "constraint " + c.name + ' ' +
               (c.kind == ConstraintKind::hard ? "hard" : "soft") + " {";
        if (!c.when_clause.empty()) {
            out += " when ";
            append_clause(c.when_clause);
        }
        if (c.has_match) {
            out += " match encoding";
            if (!c.match_clause.empty()) {
                out += " where ";
                append_clause(c.match_clause);
            }
        }
        out += std::string(" scope ") +
               (c.scope == Scope::per_match ? "per_match" : "per_chart");
        out += " }\n";
    }
    return out;
}

/// Parses a constraint-DSL document. Constraint order is document order and
/// fixes feature-vector dimensions. Errors: syntax, duplicate name, unknown
/// selector key, unknown enum value.
inline ConstraintCatalog parse_catalog(std::string_view text) {
    using kb_detail::DslLexer;
    DslLexer lexer(text);
    using Token = DslLexer::Token;

    ConstraintCatalog catalog;
    Token tok = lexer.next();

    auto expect_ident = [&](const char* what) {
        if (tok.type != Token::Type::ident)
            throw ParseError(std::string("expected ") + what, tok.line, tok.col);
        std::string v = tok.value;
        Token at = tok;
        tok = lexer.next();
        return std::pair<std::string, Token>(v, at);
    };
    auto expect_symbol = [&](char c) {
        if (tok.type != Token::Type::symbol || tok.value[0] != c)
            throw ParseError(std::string("expected '") + c + "'", tok.line, tok.col);
        tok = lexer.next();
    };
    auto at_ident = [&](const char* kw) {
        return tok.type == Token::Type::ident && tok.value == kw;
    };

    auto validate_value = [](const std::string& key, const std::string& value,
                             const Token& at) {
        auto ok = [&](std::initializer_list<const char*> allowed) {
            for (const char* a : allowed)
                if (value == a) return;
            throw ParseError("unknown value '" + value + "' for " + key, at.line, at.col);
        };
        if (key == "task") ok({"value", "summary"});
        else if (key == "mark") ok({"point", "line", "area", "bar", "tick"});
        else if (key == "missing" || key == "channel")
            ok({"x", "y", "color", "size", "row", "shape"});
        else if (key == "scale") ok({"linear", "ordinal", "categorical"});
        else if (key == "zero" || key == "field.interest") ok({"true", "false"});
        else if (key == "field.kind") ok({"quantitative", "categorical"});
        else if (key == "field.entropy" || key == "field.cardinality") ok({"low", "high"});
    };

    // Conjunction of atoms until a terminator keyword or '}'.
    auto parse_clause = [&](const std::vector<std::string>& allowed_keys,
                            bool allow_bare) {
        std::vector<Selector> clause;
        while (true) {
            auto [key, key_at] = expect_ident("selector key");
            if (!kb_detail::contains(allowed_keys, key))
                throw ParseError("unknown selector: " + key, key_at.line, key_at.col);
            Selector sel;
            sel.key = key;
            bool bare_flag = key == "duplicate_field" || key == "duplicate_channel" ||
                             key == "unencoded_field";
            if (bare_flag) {
                if (!allow_bare)
                    throw ParseError("structural atom not allowed here: " + key,
                                     key_at.line, key_at.col);
            } else {
                expect_symbol('=');
                while (true) {
                    auto [value, value_at] = expect_ident("selector value");
                    validate_value(key, value, value_at);
                    sel.values.push_back(value);
                    if (tok.type == Token::Type::symbol && tok.value == "|")
                        tok = lexer.next();
                    else
                        break;
                }
            }
            clause.push_back(std::move(sel));
            if (at_ident("and")) {
                tok = lexer.next();
                continue;
            }
            break;
        }
        return clause;
    };

    while (tok.type != Token::Type::end) {
        auto [kw, kw_at] = expect_ident("'constraint'");
        if (kw != "constraint")
            throw ParseError("expected 'constraint'", kw_at.line, kw_at.col);
        ConstraintDef def;
        auto [name, name_at] = expect_ident("constraint name");
        def.name = name;
        if (catalog.find(def.name) != nullptr)
            throw ParseError("duplicate constraint name: " + def.name, name_at.line,
                             name_at.col);
        auto [kind, kind_at] = expect_ident("'hard' or 'soft'");
        if (kind == "hard") def.kind = ConstraintKind::hard;
        else if (kind == "soft") def.kind = ConstraintKind::soft;
        else throw ParseError("expected 'hard' or 'soft'", kind_at.line, kind_at.col);
        expect_symbol('{');

        if (at_ident("when")) {
            tok = lexer.next();
            def.when_clause = parse_clause(kb_detail::kWhenKeys, /*allow_bare=*/true);
        }
        if (at_ident("match")) {
            Token match_at = tok;
            tok = lexer.next();
            auto [subject, subject_at] = expect_ident("'encoding'");
            if (subject != "encoding")
                throw ParseError("only 'match encoding' is supported", subject_at.line,
                                 subject_at.col);
            def.has_match = true;
            if (at_ident("where")) {
                tok = lexer.next();
                def.match_clause = parse_clause(kb_detail::kMatchKeys, /*allow_bare=*/false);
            }
            (void)match_at;
        }
        bool scope_explicit = false;
        if (at_ident("scope")) {
            tok = lexer.next();
            auto [scope, scope_at] = expect_ident("'per_match' or 'per_chart'");
            if (scope == "per_match") def.scope = Scope::per_match;
            else if (scope == "per_chart") def.scope = Scope::per_chart;
            else
                throw ParseError("expected 'per_match' or 'per_chart'", scope_at.line,
                                 scope_at.col);
            scope_explicit = true;
        }
        if (!scope_explicit)
            def.scope = def.has_match ? Scope::per_match : Scope::per_chart;
        if (def.scope == Scope::per_match)
            for (const auto& atom : def.when_clause)
                if (kb_detail::contains(kb_detail::kStructuralKeys, atom.key))
                    throw ParseError("structural atom '" + atom.key +
                                         "' requires per_chart scope",
                                     kw_at.line, kw_at.col);
        if (!def.has_match && def.when_clause.empty())
            throw ParseError("constraint body must declare when and/or match",
                             kw_at.line, kw_at.col);
        expect_symbol('}');
        catalog.constraints.push_back(std::move(def));
    }

    catalog.catalog_hash = sha256_hex(serialize_catalog(catalog));
    return catalog;
}

namespace kb_detail {

inline bool value_matches(const Selector& sel, const std::string& actual) {
    for (const auto& v : sel.values)
        if (v == actual) return true;
    return false;
}

inline bool when_atom_holds(const Selector& atom, const ChartSpec& chart) {
    if (atom.key == "task")
        return chart.task && value_matches(atom, to_string(*chart.task));
    if (atom.key == "mark")
        return chart.mark && value_matches(atom, to_string(*chart.mark));
    if (atom.key == "missing") {
        for (const auto& v : atom.values) {
            bool used = false;
            for (const auto& e : chart.encodings)
                if (to_string(e.channel) == v) used = true;
            if (!used) return true; // any listed channel missing
        }
        return false;
    }
    if (atom.key == "duplicate_field") {
        for (std::size_t i = 0; i < chart.encodings.size(); ++i)
            for (std::size_t j = i + 1; j < chart.encodings.size(); ++j)
                if (chart.encodings[i].field == chart.encodings[j].field) return true;
        return false;
    }
    if (atom.key == "duplicate_channel") {
        for (std::size_t i = 0; i < chart.encodings.size(); ++i)
            for (std::size_t j = i + 1; j < chart.encodings.size(); ++j)
                if (chart.encodings[i].channel != Channel::none &&
                    chart.encodings[i].channel == chart.encodings[j].channel)
                    return true;
        return false;
    }
    if (atom.key == "unencoded_field") {
        for (const auto& f : chart.fields)
            if (chart.find_encoding_of(f.name) == nullptr) return true;
        return false;
    }
    throw Error("unknown when atom: " + atom.key);
}

inline bool encoding_matches(const Selector& sel, const EncodingDef& enc,
                             const ChartSpec& chart) {
    if (sel.key == "channel") return value_matches(sel, to_string(enc.channel));
    if (sel.key == "scale") return value_matches(sel, to_string(enc.scale_type));
    if (sel.key == "zero") {
        if (enc.zero == ZeroFlag::unspecified) return false;
        return value_matches(sel, enc.zero == ZeroFlag::yes ? "true" : "false");
    }
    const FieldDef* field = chart.find_field(enc.field);
    if (field == nullptr) return false;
    if (sel.key == "field.kind") return value_matches(sel, to_string(field->kind));
    if (sel.key == "field.entropy")
        return field->entropy_bin != Bin::unknown &&
               value_matches(sel, to_string(field->entropy_bin));
    if (sel.key == "field.cardinality")
        return field->cardinality_bin != Bin::unknown &&
               value_matches(sel, to_string(field->cardinality_bin));
    if (sel.key == "field.interest")
        return value_matches(sel, field->interest ? "true" : "false");
    throw Error("unknown match selector: " + sel.key);
}

} // namespace kb_detail

/// Satisfaction count of one constraint on one chart. per_match counts the
/// encodings matching the pattern (zero when the when-clause fails);
/// per_chart yields 1 when the when-clause holds and the pattern matches
/// existentially (vacuously, when absent).
inline int evaluate(const ConstraintDef& constraint, const ChartSpec& chart) {
    for (const auto& atom : constraint.when_clause)
        if (!kb_detail::when_atom_holds(atom, chart)) return 0;
    auto matches = [&](const EncodingDef& enc) {
        for (const auto& sel : constraint.match_clause)
            if (!kb_detail::encoding_matches(sel, enc, chart)) return false;
        return true;
    };
    if (constraint.scope == Scope::per_match) {
        int count = 0;
        for (const auto& enc : chart.encodings)
            if (matches(enc)) ++count;
        return count;
    }
    if (!constraint.has_match) return 1;
    for (const auto& enc : chart.encodings)
        if (matches(enc)) return 1;
    return 0;
}

struct FeatureVector {
    std::vector<int> counts; // one per soft constraint, catalog order
    std::string catalog_hash;

    bool operator==(const FeatureVector&) const = default;

    long l1_norm() const {
        long sum = 0;
        for (int c : counts) sum += c;
        return sum;
    }
};

struct HardValidation {
    std::vector<std::string> violations; // names of hard constraints with count > 0
    bool ok() const { return violations.empty(); }
};

/// Lists every hard constraint with nonzero count; ok iff the list is empty.
inline HardValidation validate_hard(const ConstraintCatalog& catalog,
                                    const ChartSpec& chart) {
    HardValidation result;
    for (const auto& c : catalog.constraints)
        if (c.kind == ConstraintKind::hard && evaluate(c, chart) > 0)
            result.violations.push_back(c.name);
    return result;
}

/// counts[i] = evaluate(soft_i, chart). Refuses hard-invalid charts.
inline FeatureVector featurize(const ConstraintCatalog& catalog, const ChartSpec& chart) {
    HardValidation hv = validate_hard(catalog, chart);
    if (!hv.ok()) {
        std::string names;
        for (const auto& v : hv.violations) names += (names.empty() ? "" : ", ") + v;
        throw Error("featurize: chart violates hard constraints: " + names +
                    " (chart " + chart.source_id + ")");
    }
    FeatureVector fv;
    fv.catalog_hash = catalog.catalog_hash;
    fv.counts.reserve(catalog.soft_count());
    for (const auto& c : catalog.constraints)
        if (c.kind == ConstraintKind::soft) fv.counts.push_back(evaluate(c, chart));
    return fv;
}

} // namespace vizpref
