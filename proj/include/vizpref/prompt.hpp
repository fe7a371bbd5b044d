// Prompt templates and judge-answer parsing.
//
// Templates are UTF-8 text with named {{slot}} markers. The rank template
// must declare {{task_description}}, {{chart_1}}, {{chart_2}} and
// {{answer_format}}; the recommend template {{task_description}},
// {{partial_spec}} and {{format_instructions}}. Charts travel in dictionary
// format. Rendering is deterministic byte-for-byte.

#pragma once

#include "chart.hpp"
#include "dictionary.hpp"
#include "error.hpp"
#include "vega.hpp"

#include <map>
#include <regex>
#include <string>

namespace vizpref {

inline const char* task_description(Task task) {
    if (task == Task::value)
        return "a value task: reading or comparing the values of individual marks";
    return "a summary task: identifying or comparing aggregate properties of marks";
}

inline const char* kRankAnswerFormat =
    "Answer with a single final line containing exactly \"Chart 1\" or \"Chart 2\".";

inline const char* format_instructions(CompletionFormat format) {
    if (format == CompletionFormat::vegalite)
        return "Respond with a single Vega-Lite JSON object using only the keys "
               "\"mark\" and \"encoding\"; encoding entries may use only \"field\", "
               "\"type\" (quantitative, ordinal, or nominal) and \"scale\" with a "
               "\"zero\" flag. No prose.";
    return "Respond with a single chart specification in the dictionary format used "
           "above (task, field, view keys). No prose.";
}

/// Substitutes every {{slot}}; a slot missing from the template is an error
/// (the caller's content would silently vanish otherwise).
inline std::string render_template(const std::string& tpl,
                                   const std::map<std::string, std::string>& slots) {
    std::string out = tpl;
    for (const auto& [name, value] : slots) {
        std::string marker = "{{" + name + "}}";
        std::size_t pos = out.find(marker);
        if (pos == std::string::npos)
            throw Error("template is missing slot {{" + name + "}}");
        while (pos != std::string::npos) {
            out.replace(pos, marker.size(), value);
            pos = out.find(marker, pos + value.size());
        }
    }
    std::size_t leftover = out.find("{{");
    if (leftover != std::string::npos) {
        std::size_t end = out.find("}}", leftover);
        throw Error("template declares an unknown slot: " +
                    out.substr(leftover, end == std::string::npos
                                             ? std::string::npos
                                             : end - leftover + 2));
    }
    return out;
}

inline std::string render_rank_prompt(const std::string& tpl, const ChartSpec& chart_1,
                                      const ChartSpec& chart_2, Task task) {
    return render_template(tpl, {
                                    {"task_description", task_description(task)},
                                    {"chart_1", serialize_dictionary(chart_1)},
                                    {"chart_2", serialize_dictionary(chart_2)},
                                    {"answer_format", kRankAnswerFormat},
                                });
}

inline std::string render_recommend_prompt(const std::string& tpl,
                                           const ChartSpec& partial, Task task,
                                           CompletionFormat format) {
    return render_template(tpl, {
                                    {"task_description", task_description(task)},
                                    {"partial_spec", serialize_dictionary(partial)},
                                    {"format_instructions", format_instructions(format)},
                                });
}

enum class RankAnswer { chart_1, chart_2, unparseable };

inline std::string to_string(RankAnswer a) {
    switch (a) {
    case RankAnswer::chart_1: return "chart_1";
    case RankAnswer::chart_2: return "chart_2";
    case RankAnswer::unparseable: return "unparseable";
    }
    return "?";
}

/// Case-insensitive match of the final non-empty line against the answer
/// grammar: optional "answer:" prefix, then "chart 1" or "chart 2", with
/// light quoting and punctuation tolerated. Anything else is unparseable and
/// is treated downstream as an inconsistent response.
inline RankAnswer parse_rank_answer(const std::string& raw_text) {
    std::string last_line;
    std::size_t end = raw_text.size();
    while (end > 0) {
        std::size_t start = raw_text.rfind('\n', end - 1);
        std::size_t line_begin = start == std::string::npos ? 0 : start + 1;
        std::string line = raw_text.substr(line_begin, end - line_begin);
        bool blank = line.find_first_not_of(" \t\r") == std::string::npos;
        if (!blank) {
            last_line = line;
            break;
        }
        if (start == std::string::npos) break;
        end = start;
    }
    static const std::regex grammar(
        R"(^[\s"'*]*(?:answer\s*:\s*)?["'*]*chart\s*([12])["'*.!\s]*$)",
        std::regex::icase);
    std::smatch match;
    if (!std::regex_match(last_line, match, grammar)) return RankAnswer::unparseable;
    return match[1].str() == "1" ? RankAnswer::chart_1 : RankAnswer::chart_2;
}

/// Completion payload extraction: live models often wrap structured output in
/// a Markdown code fence; one outer fence (with optional language tag) is
/// stripped. Oracle and replay payloads pass through untouched.
inline std::string extract_completion_text(const std::string& raw_text) {
    std::size_t begin = raw_text.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return raw_text;
    if (raw_text.compare(begin, 3, "```") != 0) return raw_text;
    std::size_t line_end = raw_text.find('\n', begin);
    if (line_end == std::string::npos) return raw_text;
    std::size_t close = raw_text.rfind("```");
    if (close <= line_end) return raw_text;
    return raw_text.substr(line_end + 1, close - line_end - 1);
}

} // namespace vizpref
