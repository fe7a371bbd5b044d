// Dictionary-format codec for chart specifications.
//
// The format is a strict subset of YAML block/flow syntax (see
// docs/dictionary-format.ebnf for the grammar). Two input shapes are
// accepted: the nested shape, where `mark` and `scale` arrive as separate
// view-list items, and the flat canonical shape, where one view object holds
// both. Output is always canonical: fields sorted by name, encodings sorted
// by channel order, unspecified facts omitted, byte-stable across runs.

#pragma once

#include "chart.hpp"
#include "error.hpp"

#include <cctype>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace vizpref {

namespace dict_detail {

struct Node {
    enum class Type { scalar, list, map } type = Type::scalar;
    std::string scalar;
    std::vector<Node> items;                           // list
    std::vector<std::pair<std::string, Node>> entries; // map, ordered
    int line = 0, col = 0;

    const Node* find(const std::string& key) const {
        for (const auto& [k, v] : entries)
            if (k == key) return &v;
        return nullptr;
    }
};

struct Line {
    int indent = 0;
    std::string content; // trimmed, comment-stripped
    int number = 0;
};

inline bool is_scalar_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' ||
           c == '.' || c == '+';
}

class BlockParser {
public:
    explicit BlockParser(std::string_view text) {
        int number = 0;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            std::size_t eol = text.find('\n', pos);
            std::string_view raw = text.substr(
                pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
            ++number;
            Line line;
            line.number = number;
            std::size_t i = 0;
            while (i < raw.size() && raw[i] == ' ') ++i;
            if (i < raw.size() && raw[i] == '\t')
                throw ParseError("tab indentation is not allowed", number,
                                 static_cast<int>(i) + 1);
            line.indent = static_cast<int>(i);
            std::string_view rest = raw.substr(i);
            // comment: '#' at start or preceded by a space
            std::size_t cut = rest.size();
            for (std::size_t j = 0; j < rest.size(); ++j)
                if (rest[j] == '#' && (j == 0 || rest[j - 1] == ' ')) {
                    cut = j;
                    break;
                }
            rest = rest.substr(0, cut);
            while (!rest.empty() && (rest.back() == ' ' || rest.back() == '\r'))
                rest.remove_suffix(1);
            line.content = std::string(rest);
            if (!line.content.empty()) lines_.push_back(line);
            if (eol == std::string_view::npos) break;
            pos = eol + 1;
        }
    }

    Node parse_document() {
        if (lines_.empty()) throw ParseError("empty document", 1, 1);
        if (lines_[0].indent != 0)
            throw ParseError("top level must not be indented", lines_[0].number, 1);
        Node doc = parse_block_map(0);
        if (pos_ < lines_.size())
            throw ParseError("unexpected content", lines_[pos_].number,
                             lines_[pos_].indent + 1);
        return doc;
    }

private:
    const Line* peek() const { return pos_ < lines_.size() ? &lines_[pos_] : nullptr; }

    Node parse_block_map(int indent) {
        Node map;
        map.type = Node::Type::map;
        map.line = peek() ? peek()->number : 0;
        while (const Line* line = peek()) {
            if (line->indent != indent || line->content.starts_with("- ") ||
                line->content == "-")
                break;
            auto [key, inline_value, value_col] = split_key(*line, line->indent);
            if (map.find(key) != nullptr)
                throw ParseError("duplicate key: " + key, line->number, line->indent + 1);
            ++pos_;
            Node value;
            if (!inline_value.empty()) {
                value = parse_inline(inline_value, line->number, value_col);
            } else {
                value = parse_nested_value(indent, line->number);
            }
            map.entries.emplace_back(key, std::move(value));
        }
        if (map.entries.empty()) {
            const Line* line = peek();
            throw ParseError("expected key: value", line ? line->number : 0,
                             line ? line->indent + 1 : 1);
        }
        return map;
    }

    // Value of a `key:` line with nothing inline: a nested block list at
    // indent >= owning map indent, or a nested block map at greater indent.
    Node parse_nested_value(int map_indent, int key_line) {
        const Line* next = peek();
        if (next != nullptr) {
            bool is_dash = next->content.starts_with("- ") || next->content == "-";
            if (is_dash && next->indent >= map_indent) return parse_block_list(next->indent);
            if (!is_dash && next->indent > map_indent) return parse_block_map(next->indent);
        }
        throw ParseError("expected nested block after key", key_line, map_indent + 1);
    }

    Node parse_block_list(int indent) {
        Node list;
        list.type = Node::Type::list;
        list.line = peek() ? peek()->number : 0;
        while (const Line* line = peek()) {
            if (line->indent != indent ||
                !(line->content.starts_with("- ") || line->content == "-"))
                break;
            std::string item = line->content == "-" ? "" : line->content.substr(2);
            int item_indent = indent + 2;
            int item_col = indent + 3;
            if (item.empty())
                throw ParseError("empty list item", line->number, line->indent + 1);
            if (item[0] == '{') {
                ++pos_;
                list.items.push_back(parse_flow_map(item, line->number, item_col));
            } else if (item.find(':') != std::string::npos) {
                // Block map whose first entry shares the dash line.
                Line first;
                first.indent = item_indent;
                first.content = item;
                first.number = line->number;
                ++pos_;
                Node map;
                map.type = Node::Type::map;
                map.line = line->number;
                auto [key, inline_value, value_col] = split_key(first, item_col - 1);
                Node value;
                if (!inline_value.empty())
                    value = parse_inline(inline_value, line->number, value_col);
                else
                    value = parse_nested_value(item_indent, line->number);
                map.entries.emplace_back(key, std::move(value));
                while (const Line* cont = peek()) {
                    if (cont->indent != item_indent || cont->content.starts_with("- "))
                        break;
                    auto [k2, v2, c2] = split_key(*cont, cont->indent);
                    if (map.find(k2) != nullptr)
                        throw ParseError("duplicate key: " + k2, cont->number,
                                         cont->indent + 1);
                    ++pos_;
                    Node val2;
                    if (!v2.empty())
                        val2 = parse_inline(v2, cont->number, c2);
                    else
                        val2 = parse_nested_value(item_indent, cont->number);
                    map.entries.emplace_back(k2, std::move(val2));
                }
                list.items.push_back(std::move(map));
            } else {
                ++pos_;
                Node scalar;
                scalar.type = Node::Type::scalar;
                scalar.scalar = item;
                scalar.line = line->number;
                scalar.col = item_col;
                list.items.push_back(std::move(scalar));
            }
        }
        if (list.items.empty()) {
            const Line* line = peek();
            throw ParseError("expected list item", line ? line->number : 0,
                             line ? line->indent + 1 : 1);
        }
        return list;
    }

    Node parse_inline(const std::string& text, int line, int col) {
        if (text[0] == '{') return parse_flow_map(text, line, col);
        for (char c : text)
            if (!is_scalar_char(c))
                throw ParseError(std::string("unexpected character '") + c + "' in value",
                                 line, col);
        Node scalar;
        scalar.type = Node::Type::scalar;
        scalar.scalar = text;
        scalar.line = line;
        scalar.col = col;
        return scalar;
    }

    Node parse_flow_map(const std::string& text, int line, int col) {
        Node map;
        map.type = Node::Type::map;
        map.line = line;
        map.col = col;
        std::size_t i = 0;
        auto fail = [&](const std::string& msg) -> ParseError {
            return ParseError(msg, line, col + static_cast<int>(i));
        };
        auto skip_spaces = [&] {
            while (i < text.size() && text[i] == ' ') ++i;
        };
        if (text[i] != '{') throw fail("expected '{'");
        ++i;
        skip_spaces();
        if (i < text.size() && text[i] == '}') {
            ++i;
        } else {
            while (true) {
                skip_spaces();
                std::size_t start = i;
                while (i < text.size() && is_scalar_char(text[i])) ++i;
                if (i == start) throw fail("expected key");
                std::string key = text.substr(start, i - start);
                if (map.find(key) != nullptr) throw fail("duplicate key: " + key);
                skip_spaces();
                if (i >= text.size() || text[i] != ':') throw fail("expected ':'");
                ++i;
                skip_spaces();
                start = i;
                while (i < text.size() && is_scalar_char(text[i])) ++i;
                if (i == start) throw fail("expected value");
                Node value;
                value.type = Node::Type::scalar;
                value.scalar = text.substr(start, i - start);
                value.line = line;
                value.col = col + static_cast<int>(start);
                map.entries.emplace_back(key, std::move(value));
                skip_spaces();
                if (i < text.size() && text[i] == ',') {
                    ++i;
                    continue;
                }
                if (i < text.size() && text[i] == '}') {
                    ++i;
                    break;
                }
                throw fail("expected ',' or '}'");
            }
        }
        skip_spaces();
        if (i != text.size()) throw fail("trailing content after '}'");
        return map;
    }

    // Splits "key: value" / "key:"; returns {key, inline_value, value_col}.
    std::tuple<std::string, std::string, int> split_key(const Line& line, int key_col0) {
        const std::string& s = line.content;
        std::size_t i = 0;
        while (i < s.size() && is_scalar_char(s[i])) ++i;
        if (i == 0 || i >= s.size() || s[i] != ':')
            throw ParseError("expected key: value", line.number, key_col0 + 1);
        std::string key = s.substr(0, i);
        ++i;
        if (i == s.size()) return {key, "", 0};
        if (s[i] != ' ')
            throw ParseError("expected space after ':'", line.number,
                             key_col0 + static_cast<int>(i) + 1);
        while (i < s.size() && s[i] == ' ') ++i;
        return {key, s.substr(i), key_col0 + static_cast<int>(i) + 1};
    }

    std::vector<Line> lines_;
    std::size_t pos_ = 0;
};

inline ParseError node_error(const std::string& msg, const Node& n) {
    return ParseError(msg, n.line, n.col == 0 ? 1 : n.col);
}

inline const std::string& expect_scalar(const Node& n, const std::string& what) {
    if (n.type != Node::Type::scalar) throw node_error("expected scalar for " + what, n);
    return n.scalar;
}

} // namespace dict_detail

inline Task parse_task_token(const std::string& s, const dict_detail::Node& at) {
    if (s == "value") return Task::value;
    if (s == "summary") return Task::summary;
    throw dict_detail::node_error("unknown task: " + s, at);
}

inline Mark parse_mark_token(const std::string& s, const dict_detail::Node& at) {
    if (s == "point") return Mark::point;
    if (s == "line") return Mark::line;
    if (s == "area") return Mark::area;
    if (s == "bar") return Mark::bar;
    if (s == "tick") return Mark::tick;
    throw dict_detail::node_error("unknown mark: " + s, at);
}

inline Channel parse_channel_token(const std::string& s, const dict_detail::Node& at) {
    if (s == "x") return Channel::x;
    if (s == "y") return Channel::y;
    if (s == "color") return Channel::color;
    if (s == "size") return Channel::size;
    if (s == "row") return Channel::row;
    if (s == "shape") return Channel::shape;
    if (s == "none") return Channel::none;
    throw dict_detail::node_error("unknown channel token: " + s, at);
}

inline ScaleType parse_scale_token(const std::string& s, const dict_detail::Node& at) {
    if (s == "linear") return ScaleType::linear;
    if (s == "ordinal") return ScaleType::ordinal;
    if (s == "categorical") return ScaleType::categorical;
    throw dict_detail::node_error("unknown scale token: " + s, at);
}

inline bool parse_bool_token(const std::string& s, const dict_detail::Node& at) {
    if (s == "true") return true;
    if (s == "false") return false;
    throw dict_detail::node_error("expected true or false, got: " + s, at);
}

inline Bin parse_bin_token(const std::string& s, const dict_detail::Node& at) {
    if (s == "low") return Bin::low;
    if (s == "high") return Bin::high;
    throw dict_detail::node_error("unknown bin: " + s, at);
}

/// Parses a dictionary-format document into a chart or partial specification.
/// Use ChartSpec::is_complete() to discriminate. Throws ParseError with
/// position on malformed input.
inline ChartSpec parse_dictionary(std::string_view text) {
    using dict_detail::Node;
    dict_detail::BlockParser parser(text);
    Node doc = parser.parse_document();

    ChartSpec spec;
    bool saw_view = false;
    bool explicit_fields = false;

    for (const auto& [key, value] : doc.entries) {
        if (key == "task") {
            spec.task = parse_task_token(dict_detail::expect_scalar(value, "task"), value);
        } else if (key == "field") {
            explicit_fields = true;
            if (value.type != Node::Type::list)
                throw dict_detail::node_error("field must be a list", value);
            for (const Node& item : value.items) {
                if (item.type != Node::Type::map)
                    throw dict_detail::node_error("field entry must be a mapping", item);
                FieldDef f;
                bool saw_name = false;
                for (const auto& [fk, fv] : item.entries) {
                    const std::string& s = dict_detail::expect_scalar(fv, fk);
                    if (fk == "name") {
                        f.name = s;
                        saw_name = true;
                    } else if (fk == "type") {
                        if (s == "quantitative") f.kind = FieldKind::quantitative;
                        else if (s == "categorical") f.kind = FieldKind::categorical;
                        else throw dict_detail::node_error("unknown field type: " + s, fv);
                    } else if (fk == "entropy") {
                        f.entropy_bin = parse_bin_token(s, fv);
                    } else if (fk == "cardinality") {
                        f.cardinality_bin = parse_bin_token(s, fv);
                    } else if (fk == "interest") {
                        f.interest = parse_bool_token(s, fv);
                    } else {
                        throw dict_detail::node_error("unknown field key: " + fk, fv);
                    }
                }
                if (!saw_name) throw dict_detail::node_error("field entry needs a name", item);
                if (spec.find_field(f.name) != nullptr)
                    throw dict_detail::node_error("duplicate field name: " + f.name, item);
                spec.fields.push_back(std::move(f));
            }
        } else if (key == "view") {
            saw_view = true;
            if (value.type != Node::Type::list)
                throw dict_detail::node_error("view must be a list", value);
            // Collect mark objects and scale entries across view items; the
            // nested shape delivers them as separate single-key items.
            std::vector<const Node*> marks;
            std::vector<const Node*> scales;
            for (const Node& item : value.items) {
                if (item.type != Node::Type::map)
                    throw dict_detail::node_error("view entry must be a mapping", item);
                for (const auto& [vk, vv] : item.entries) {
                    if (vk == "mark") {
                        if (vv.type != Node::Type::list)
                            throw dict_detail::node_error("mark must be a list", vv);
                        for (const Node& m : vv.items) marks.push_back(&m);
                    } else if (vk == "scale") {
                        if (vv.type != Node::Type::list)
                            throw dict_detail::node_error("scale must be a list", vv);
                        for (const Node& s : vv.items) scales.push_back(&s);
                    } else {
                        throw dict_detail::node_error("unknown view key: " + vk, vv);
                    }
                }
            }
            if (marks.empty())
                throw dict_detail::node_error("chart must declare at least one mark", value);
            if (marks.size() > 1)
                throw dict_detail::node_error("only one mark per chart is supported",
                                              *marks[1]);
            const Node& mark = *marks[0];
            if (mark.type != Node::Type::map)
                throw dict_detail::node_error("mark entry must be a mapping", mark);
            for (const auto& [mk, mv] : mark.entries) {
                if (mk == "type") {
                    spec.mark =
                        parse_mark_token(dict_detail::expect_scalar(mv, "mark type"), mv);
                } else if (mk == "encoding") {
                    if (mv.type != Node::Type::list)
                        throw dict_detail::node_error("encoding must be a list", mv);
                    for (const Node& enc : mv.items) {
                        if (enc.type != Node::Type::map)
                            throw dict_detail::node_error("encoding entry must be a mapping",
                                                          enc);
                        EncodingDef e;
                        bool saw_field = false;
                        for (const auto& [ek, ev] : enc.entries) {
                            const std::string& s = dict_detail::expect_scalar(ev, ek);
                            if (ek == "channel") e.channel = parse_channel_token(s, ev);
                            else if (ek == "field") {
                                e.field = s;
                                saw_field = true;
                            } else
                                throw dict_detail::node_error("unknown encoding key: " + ek,
                                                              ev);
                        }
                        if (!saw_field)
                            throw dict_detail::node_error("encoding requires a field", enc);
                        if (e.channel != Channel::none &&
                            spec.find_encoding_on(e.channel) != nullptr)
                            throw dict_detail::node_error(
                                "duplicate channel: " + to_string(e.channel), enc);
                        spec.encodings.push_back(std::move(e));
                    }
                } else {
                    throw dict_detail::node_error("unknown mark key: " + mk, mv);
                }
            }
            for (const Node* sc : scales) {
                if (sc->type != Node::Type::map)
                    throw dict_detail::node_error("scale entry must be a mapping", *sc);
                Channel channel = Channel::none;
                ScaleType type = ScaleType::unspecified;
                ZeroFlag zero = ZeroFlag::unspecified;
                bool saw_channel = false;
                for (const auto& [sk, sv] : sc->entries) {
                    const std::string& s = dict_detail::expect_scalar(sv, sk);
                    if (sk == "channel") {
                        channel = parse_channel_token(s, sv);
                        saw_channel = true;
                    } else if (sk == "type") {
                        type = parse_scale_token(s, sv);
                    } else if (sk == "zero") {
                        zero = parse_bool_token(s, sv) ? ZeroFlag::yes : ZeroFlag::no;
                    } else {
                        throw dict_detail::node_error("unknown scale key: " + sk, sv);
                    }
                }
                if (!saw_channel || channel == Channel::none)
                    throw dict_detail::node_error("scale entry requires a concrete channel",
                                                  *sc);
                if (zero != ZeroFlag::unspecified && type != ScaleType::linear)
                    throw dict_detail::node_error("zero is only valid on linear scales",
                                                  *sc);
                EncodingDef* target = nullptr;
                for (auto& e : spec.encodings)
                    if (e.channel == channel) target = &e;
                if (target == nullptr)
                    throw dict_detail::node_error(
                        "scale for unencoded channel: " + to_string(channel), *sc);
                if (target->scale_type != ScaleType::unspecified)
                    throw dict_detail::node_error(
                        "duplicate scale for channel: " + to_string(channel), *sc);
                target->scale_type = type;
                target->zero = zero;
            }
        } else {
            throw dict_detail::node_error("unknown top-level key: " + key, value);
        }
    }
    if (!saw_view) throw ParseError("document must declare a view", 1, 1);

    if (explicit_fields) {
        for (const auto& e : spec.encodings)
            if (spec.find_field(e.field) == nullptr)
                throw ParseError("dangling field reference: " + e.field, 1, 1);
    } else {
        // No field list: declare referenced fields implicitly, kind inferred
        // from the scale fact (none -> quantitative), statistics unknown.
        for (const auto& e : spec.encodings) {
            if (spec.find_field(e.field) != nullptr) continue;
            FieldDef f;
            f.name = e.field;
            f.kind = e.scale_type == ScaleType::categorical ? FieldKind::categorical
                                                            : FieldKind::quantitative;
            spec.fields.push_back(std::move(f));
        }
    }

    spec = canonicalized(std::move(spec));
    validate_spec(spec);
    return spec;
}

namespace dict_detail {

inline void append_field(std::string& out, const FieldDef& f) {
    out += "- { name: " + f.name + ", type: " + to_string(f.kind);
    if (f.entropy_bin != Bin::unknown) out += ", entropy: " + to_string(f.entropy_bin);
    if (f.cardinality_bin != Bin::unknown)
        out += ", cardinality: " + to_string(f.cardinality_bin);
    if (f.interest) out += ", interest: true";
    out += " }\n";
}

} // namespace dict_detail

/// Canonical dictionary serialization. Deterministic and byte-identical for
/// equal inputs: fields sorted by name, encodings by channel order,
/// unspecified facts omitted. Precondition: spec satisfies validate_spec.
inline std::string serialize_dictionary(const ChartSpec& spec_in) {
    ChartSpec spec = canonicalized(spec_in);
    validate_spec(spec);
    std::string out;
    if (spec.task) out += "task: " + to_string(*spec.task) + "\n";
    if (!spec.fields.empty()) {
        out += "field:\n";
        for (const auto& f : spec.fields) dict_detail::append_field(out, f);
    }
    out += "view:\n- mark:\n";
    bool mark_has_content = spec.mark.has_value() || !spec.encodings.empty();
    if (!mark_has_content) {
        out += "  - {}\n";
    } else {
        std::string enc_indent = "    ";
        if (spec.mark) {
            out += "  - type: " + to_string(*spec.mark) + "\n";
            if (!spec.encodings.empty()) out += "    encoding:\n";
        } else {
            out += "  - encoding:\n";
        }
        for (const auto& e : spec.encodings) {
            out += enc_indent + "- { ";
            if (e.channel != Channel::none) out += "channel: " + to_string(e.channel) + ", ";
            out += "field: " + e.field + " }\n";
        }
    }
    std::string scales;
    for (const auto& e : spec.encodings) {
        if (e.scale_type == ScaleType::unspecified) continue;
        scales += "  - { channel: " + to_string(e.channel) +
                  ", type: " + to_string(e.scale_type);
        if (e.zero != ZeroFlag::unspecified)
            scales += std::string(", zero: ") + (e.zero == ZeroFlag::yes ? "true" : "false");
        scales += " }\n";
    }
    if (!scales.empty()) out += "  scale:\n" + scales;
    return out;
}

} // namespace vizpref
