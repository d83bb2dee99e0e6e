#include "elicit/prompts.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include <json.hpp>

#include "elicit/error.hpp"
#include "elicit/ingest.hpp"
#include "elicit/text.hpp"

namespace elicit::prompts {

namespace {

using nlohmann::json;

const std::string kRole =
    "The role of the Data Therapist is to elicit knowledge about the dataset from users by asking appropriate "
    "questions that, by answering, could help them understand their own data. The questions should aim to bridge the "
    "gap between reality (the situation, environment, and background surrounding the dataset) and the dataset "
    "itself. While the data is present, it does not, on its own, explain the background or issues. Ideally, "
    "annotations should be made so that even someone unfamiliar with the dataset can understand it by reading those "
    "annotations. Although the main goal is to help extract annotations by asking questions, the Data Therapist can "
    "also assist in other tasks related to annotation, such as validating questions.";

const std::string kTaskT1 =
    "Read the dataset. Generate 30 key questions you would ask the experts of the dataset that would help people who "
    "do not know about the data understand the dataset. The generated questions should (1) help clarify the dataset "
    "from a non-expert’s perspective and (2) bridge the gap between the explanations and the dataset itself.";

const std::string kTaskV1 =
    "Now, look at the answer and check if the answer makes sense, based on the question. If the answer makes no "
    "sense at all, then provide feedback to guide users to answer the question.";

const std::string kTaskT2 =
    "Read the dataset, the questions already used for annotation and all annotations. Generate 5 follow-up questions "
    "about the most recent annotation that would help people who do not know about the data understand it. Each "
    "question should dig into the context, assumptions or limitations behind that annotation and must not repeat a "
    "question listed above.";

const std::string kTaskV2 =
    "Now, compare the candidate annotation with the existing annotations and check whether the candidate contradicts "
    "any of them. If it does, provide feedback that names the conflicting annotation and guides the user to "
    "reconcile the two. If there are no existing annotations, the candidate passes.";

const std::string kTaskImportance =
    "Rate how important the question below is for understanding the dataset. Consider (1) the question's ability to "
    "clarify the dataset and (2) its potential to introduce novel insights. 1 means marginal, 5 means essential.";

const std::string kFormatImportance = "Respond with a single integer from 1 to 5 and nothing else.";

const std::string kFormatProse = "Respond with plain prose of at most 150 words, without headings or lists.";

std::string replenish_task(std::size_t count) {
    return "Read the dataset, the questions already used for annotation and all annotations. Generate " +
           std::to_string(count) +
           " additional key questions you would ask the experts of the dataset that would help people who do not "
           "know about the data understand the dataset. Do not repeat a question listed above.";
}

std::string questions_format(std::size_t count) {
    std::string themes;
    for (auto t : kAllThemes) {
        if (!themes.empty()) themes += ", ";
        themes += to_string(t);
    }
    return "Respond with a single fenced block labeled json and nothing else. The block holds a JSON array of exactly " +
           std::to_string(count) +
           " question objects. Each object has a \"text\" field holding the question and an optional \"theme\" field "
           "naming one of: " +
           themes +
           ".\nExample:\n```json\n[{\"text\": \"Who collected this data and for what purpose?\", \"theme\": "
           "\"motivation\"}]\n```";
}

const std::string kFormatVerdict =
    "Respond with a single fenced block labeled json and nothing else. The block holds one JSON object with a "
    "\"verdict\" field set to \"pass\" or \"fail\" and a \"feedback\" field. Leave \"feedback\" empty on pass; on "
    "fail, explain what is missing or conflicting so the user can revise the answer.\nExample:\n```json\n"
    "{\"verdict\": \"fail\", \"feedback\": \"The answer does not say who collected the data.\"}\n```";

std::string section(std::string_view head, std::string_view body) {
    std::string out(head);
    out.push_back('\n');
    out.append(body);
    return out;
}

std::string join_lines(const std::vector<std::string>& lines, std::string_view empty_marker) {
    if (lines.empty()) return std::string(empty_marker);
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i > 0) out.push_back('\n');
        out += lines[i];
    }
    return out;
}

std::string numbered_questions(const std::vector<std::string>& questions) {
    std::vector<std::string> lines;
    for (std::size_t i = 0; i < questions.size(); ++i) lines.push_back(std::to_string(i + 1) + ". " + questions[i]);
    return join_lines(lines, "(no questions answered yet)");
}

std::string annotations_in_order(const std::vector<Annotation>& annotations) {
    std::vector<const Annotation*> sorted;
    for (const auto& a : annotations) sorted.push_back(&a);
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const Annotation* a, const Annotation* b) { return a->sequence < b->sequence; });
    std::vector<std::string> lines;
    for (const auto* a : sorted) lines.push_back(describe_annotation(*a));
    return join_lines(lines, "(no annotations yet)");
}

// Most-recent-first, stopping before the segment exceeds budget characters.
std::string annotations_recent_first(const std::vector<Annotation>& annotations, std::size_t budget_chars) {
    std::vector<const Annotation*> sorted;
    for (const auto& a : annotations) sorted.push_back(&a);
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const Annotation* a, const Annotation* b) { return a->sequence > b->sequence; });
    std::vector<std::string> lines;
    std::size_t used = 0;
    for (const auto* a : sorted) {
        auto line = describe_annotation(*a);
        const std::size_t cost = line.size() + (lines.empty() ? 0 : 1);
        if (used + cost > budget_chars) break;
        used += cost;
        lines.push_back(std::move(line));
    }
    return join_lines(lines, kNoExistingAnnotations);
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string column_summary_line(const Dataset& ds, std::size_t c) {
    const auto& meta = ds.column(c);
    std::string line = "- " + meta.name + ": ";
    if (meta.inferred_type == ColumnType::numeric) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        double sum = 0;
        std::size_t n = 0;
        for (std::size_t r = 0; r < ds.row_count(); ++r) {
            const auto& cell = ds.cell(r, c);
            if (cell.is_null) continue;
            lo = std::min(lo, *cell.parsed);
            hi = std::max(hi, *cell.parsed);
            sum += *cell.parsed;
            ++n;
        }
        if (n == 0) return line + "no values";
        return line + "min=" + format_double(lo) + ", max=" + format_double(hi) +
               ", mean=" + format_double(sum / static_cast<double>(n));
    }
    std::set<std::string_view> distinct;
    for (std::size_t r = 0; r < ds.row_count(); ++r) {
        const auto& cell = ds.cell(r, c);
        if (!cell.is_null) distinct.insert(cell.raw);
    }
    return line + "distinct=" + std::to_string(distinct.size());
}

std::optional<std::string> extract_fenced(std::string_view text) {
    const auto open = text.find("```");
    if (open == std::string_view::npos) return std::nullopt;
    auto body_start = text.find('\n', open);
    if (body_start == std::string_view::npos) return std::nullopt;
    ++body_start;
    const auto close = text.find("```", body_start);
    if (close == std::string_view::npos) return std::nullopt;
    return std::string(text.substr(body_start, close - body_start));
}

// Outermost [...] or {...} span, for replies that skip the fence.
std::optional<std::string> extract_bracketed(std::string_view text, char open, char close) {
    const auto first = text.find(open);
    const auto last = text.rfind(close);
    if (first == std::string_view::npos || last == std::string_view::npos || last < first) return std::nullopt;
    return std::string(text.substr(first, last - first + 1));
}

json parse_structured(std::string_view output, char open, char close) {
    std::vector<std::string> candidates;
    if (auto fenced = extract_fenced(output)) candidates.push_back(*fenced);
    if (auto bracketed = extract_bracketed(output, open, close)) candidates.push_back(*bracketed);
    for (const auto& c : candidates) {
        auto parsed = json::parse(c, nullptr, false);
        if (!parsed.is_discarded()) return parsed;
    }
    throw Error(ErrorCode::MalformedOutput, "no parsable structured block in provider output");
}

} // namespace

std::string PromptTemplate::render() const {
    std::string out;
    for (std::size_t i = 0; i < composition.size(); ++i) {
        const auto& name = composition[i];
        const std::string* value = nullptr;
        if (auto it = local_slots.find(name); it != local_slots.end()) {
            value = &it->second;
        } else if (auto git = global_slots.find(name); git != global_slots.end()) {
            value = &git->second;
        }
        if (!value) throw Error(ErrorCode::UnboundSlot, name);
        if (i > 0) out += "\n\n";
        out += *value;
    }
    return out;
}

const std::string& role_text() { return kRole; }
const std::string& task_t1_text() { return kTaskT1; }
const std::string& task_v1_text() { return kTaskV1; }

namespace {

PromptTemplate with_role(std::vector<std::string> composition) {
    PromptTemplate t;
    t.global_slots["role"] = kRole;
    t.composition = std::move(composition);
    return t;
}

} // namespace

std::string render_role() { return with_role({"role"}).render(); }

std::string render_T1(std::string_view dataset_text) {
    if (trim(dataset_text).empty()) throw Error(ErrorCode::EmptyDataset, "dataset text is empty");
    auto t = with_role({"role", "dataset", "task", "output_format"});
    t.local_slots["dataset"] = section(heading::dataset, dataset_text);
    t.local_slots["task"] = section(heading::task, kTaskT1);
    t.local_slots["output_format"] = section(heading::output_format, questions_format(30));
    return t.render();
}

std::string render_replenish(std::string_view dataset_text, const std::vector<std::string>& questions_all,
                             const std::vector<Annotation>& annotations_all, std::size_t count) {
    if (trim(dataset_text).empty()) throw Error(ErrorCode::EmptyDataset, "dataset text is empty");
    auto t = with_role({"role", "dataset", "questions_all", "annotations_all", "task", "output_format"});
    t.local_slots["dataset"] = section(heading::dataset, dataset_text);
    t.local_slots["questions_all"] = section(heading::questions_all, numbered_questions(questions_all));
    t.local_slots["annotations_all"] = section(heading::annotations_all, annotations_in_order(annotations_all));
    t.local_slots["task"] = section(heading::task, replenish_task(count));
    t.local_slots["output_format"] = section(heading::output_format, questions_format(count));
    return t.render();
}

std::string render_T2(std::string_view dataset_text, const std::vector<std::string>& questions_all,
                      const std::vector<Annotation>& annotations_all, const std::optional<std::string>& question_rec,
                      const Annotation& annotation_rec) {
    if (annotations_all.empty()) throw Error(ErrorCode::NoAnnotations, "follow-up generation needs an annotation");
    auto t = with_role({"role", "dataset", "questions_all", "annotations_all", "question_rec", "annotation_rec", "task",
                        "output_format"});
    t.local_slots["dataset"] = section(heading::dataset, dataset_text);
    t.local_slots["questions_all"] = section(heading::questions_all, numbered_questions(questions_all));
    t.local_slots["annotations_all"] = section(heading::annotations_all, annotations_in_order(annotations_all));
    t.local_slots["question_rec"] =
        section(heading::question_recent, question_rec ? std::string_view(*question_rec) : kNoRecentQuestion);
    t.local_slots["annotation_rec"] = section(heading::annotation_recent, describe_annotation(annotation_rec));
    t.local_slots["task"] = section(heading::task, kTaskT2);
    t.local_slots["output_format"] = section(heading::output_format, questions_format(5));
    return t.render();
}

std::string render_V1(std::string_view question_text, std::string_view answer_text) {
    auto t = with_role({"role", "question", "answer", "task", "output_format"});
    t.local_slots["question"] = section(heading::question, question_text);
    t.local_slots["answer"] = section(heading::answer, answer_text);
    t.local_slots["task"] = section(heading::task, kTaskV1);
    t.local_slots["output_format"] = section(heading::output_format, kFormatVerdict);
    return t.render();
}

std::string render_V2(const std::vector<Annotation>& annotations_all, std::string_view candidate_text,
                      std::size_t budget_tokens) {
    auto t = with_role({"role", "existing", "candidate", "task", "output_format"});
    t.local_slots["existing"] =
        section(heading::existing_annotations, annotations_recent_first(annotations_all, budget_tokens * kCharsPerToken));
    t.local_slots["candidate"] = section(heading::candidate_annotation, candidate_text);
    t.local_slots["task"] = section(heading::task, kTaskV2);
    t.local_slots["output_format"] = section(heading::output_format, kFormatVerdict);
    return t.render();
}

std::string render_importance(std::string_view question_text, std::string_view dataset_text) {
    auto t = with_role({"role", "dataset", "question", "task", "output_format"});
    t.local_slots["dataset"] = section(heading::dataset, dataset_text);
    t.local_slots["question"] = section(heading::question, question_text);
    t.local_slots["task"] = section(heading::task, kTaskImportance);
    t.local_slots["output_format"] = section(heading::output_format, kFormatImportance);
    return t.render();
}

std::string render_theme_summary(Theme theme, const std::vector<QuestionAnswer>& answered) {
    std::vector<std::string> lines;
    for (const auto& qa : answered) {
        lines.push_back("Q: " + qa.question);
        lines.push_back("A: " + qa.answer);
    }
    auto t = with_role({"role", "theme", "answered", "task", "output_format"});
    t.local_slots["theme"] = section(heading::theme, to_string(theme));
    t.local_slots["answered"] = section(heading::answered_questions,
                                        "Count: " + std::to_string(answered.size()) + "\n" + join_lines(lines, ""));
    t.local_slots["task"] = section(
        heading::task, "Summarize what the answers establish about the " + std::string(to_string(theme)) +
                           " of the dataset, and state which aspects of this theme are still unexplained.");
    t.local_slots["output_format"] = section(heading::output_format, kFormatProse);
    return t.render();
}

std::string render_report(std::string_view dataset_text, const std::vector<Annotation>& annotations_all,
                          std::size_t budget_tokens) {
    auto t = with_role({"role", "dataset", "annotations_all", "task", "output_format"});
    t.local_slots["dataset"] = section(heading::dataset, dataset_text);
    t.local_slots["annotations_all"] =
        section(heading::annotations_all, "Count: " + std::to_string(annotations_all.size()) + "\n" +
                                              annotations_recent_first(annotations_all, budget_tokens * kCharsPerToken));
    t.local_slots["task"] =
        section(heading::task,
                "Write an overview of the dataset for a visualization designer who has never seen it, drawing only on "
                "the annotations above. Cover where the data comes from, what it contains, its known limitations and "
                "how it is meant to be used.");
    t.local_slots["output_format"] = section(heading::output_format, kFormatProse);
    return t.render();
}

std::string render_repair(std::string_view original_prompt, std::string_view parse_error) {
    std::string out(original_prompt);
    out += "\n\n";
    out += section(heading::repair, "Your previous response could not be parsed (" + std::string(parse_error) +
                                        "). Respond again with only the structured block described in the output "
                                        "format.");
    return out;
}

std::string describe_selection(const Selection& s) {
    auto join = [](const std::vector<std::size_t>& v) {
        std::string out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i > 0) out += ",";
            out += std::to_string(v[i]);
        }
        return out;
    };
    switch (s.kind) {
    case SelectionKind::whole_dataset:
        return "general";
    case SelectionKind::columns:
        return "columns " + join(s.column_indices);
    case SelectionKind::rows:
        return "rows " + join(s.row_indices);
    case SelectionKind::cells: {
        std::string out = "cells";
        for (const auto& c : s.cells) out += " (" + std::to_string(c.row) + "," + std::to_string(c.column) + ")";
        return out;
    }
    case SelectionKind::rectangle: {
        const auto& r = *s.rect;
        return "rows " + std::to_string(r.row_start) + "-" + std::to_string(r.row_end) + " x columns " +
               std::to_string(r.col_start) + "-" + std::to_string(r.col_end);
    }
    }
    return "general";
}

std::string describe_annotation(const Annotation& a) {
    return "#" + std::to_string(a.sequence) + " [" + describe_selection(a.selection) + "] " + a.text;
}

std::string serialize_dataset(const Dataset& ds, std::size_t budget_tokens) {
    const std::size_t budget = budget_tokens * kCharsPerToken;
    std::string head = "Name: " + ds.name() + "\nShape: " + std::to_string(ds.row_count()) + " rows x " +
                       std::to_string(ds.column_count()) + " columns\nColumns:";
    for (const auto& c : ds.columns()) {
        head += "\n- " + c.name + " [" + std::string(to_string(c.inferred_type)) +
                ", nulls=" + std::to_string(c.null_count) + "]";
    }
    if (head.size() >= budget) throw Error(ErrorCode::BudgetTooSmall, "dataset header exceeds the prompt budget");

    ingest::Record header_fields;
    for (const auto& c : ds.columns()) header_fields.push_back(c.name);
    const std::string header_line = ingest::format_record(header_fields);
    std::vector<std::string> row_lines(ds.row_count());
    for (std::size_t r = 0; r < ds.row_count(); ++r) {
        ingest::Record fields;
        for (std::size_t c = 0; c < ds.column_count(); ++c) fields.push_back(ds.cell(r, c).raw);
        row_lines[r] = ingest::format_record(fields);
    }

    std::string full = head + "\nRows:\n" + header_line;
    for (const auto& line : row_lines) full += "\n" + line;
    if (full.size() <= budget) return full;

    std::string summary = head + "\nColumn summary:";
    for (std::size_t c = 0; c < ds.column_count(); ++c) summary += "\n" + column_summary_line(ds, c);

    const std::size_t n = row_lines.size();
    auto render_with = [&](std::size_t keep) {
        std::string out = summary + "\nRows (first " + std::to_string(keep) + " and last " + std::to_string(keep) +
                          " of " + std::to_string(n) + "):\n" + header_line;
        for (std::size_t r = 0; r < keep; ++r) out += "\n" + row_lines[r];
        out += "\n... (" + std::to_string(n - 2 * keep) + " " + std::string(kElisionMarker) + ") ...";
        for (std::size_t r = n - keep; r < n; ++r) out += "\n" + row_lines[r];
        return out;
    };

    // Size grows monotonically with keep, so walk up until it stops fitting.
    std::string best = render_with(0);
    if (best.size() > budget) throw Error(ErrorCode::BudgetTooSmall, "dataset summary exceeds the prompt budget");
    for (std::size_t keep = 1; 2 * keep < n; ++keep) {
        auto candidate = render_with(keep);
        if (candidate.size() > budget) break;
        best = std::move(candidate);
    }
    return best;
}

std::vector<ParsedQuestion> parse_questions(std::string_view output, std::size_t expected_count) {
    const json parsed = parse_structured(output, '[', ']');
    const json* list = &parsed;
    if (parsed.is_object() && parsed.contains("questions")) list = &parsed["questions"];
    if (!list->is_array()) throw Error(ErrorCode::MalformedOutput, "structured block is not a list");

    std::vector<ParsedQuestion> out;
    for (const auto& item : *list) {
        ParsedQuestion q;
        if (item.is_string()) {
            q.text = item.get<std::string>();
        } else if (item.is_object() && item.contains("text") && item["text"].is_string()) {
            q.text = item["text"].get<std::string>();
            if (item.contains("theme") && item["theme"].is_string()) q.theme = parse_theme(item["theme"].get<std::string>());
        } else {
            throw Error(ErrorCode::MalformedOutput, "question entry without text");
        }
        q.text = std::string(trim(q.text));
        if (q.text.empty()) throw Error(ErrorCode::MalformedOutput, "empty question text");
        out.push_back(std::move(q));
    }
    if (out.size() != expected_count) {
        throw Error(ErrorCode::CountMismatch,
                    "expected " + std::to_string(expected_count) + " questions, got " + std::to_string(out.size()));
    }
    return out;
}

ParsedVerdict parse_verdict(std::string_view output) {
    const json parsed = parse_structured(output, '{', '}');
    if (!parsed.is_object() || !parsed.contains("verdict") || !parsed["verdict"].is_string()) {
        throw Error(ErrorCode::MalformedOutput, "verdict field missing");
    }
    const auto verdict = to_lower_ascii(trim(parsed["verdict"].get<std::string>()));
    ParsedVerdict out;
    if (verdict == "pass") {
        out.pass = true;
    } else if (verdict == "fail") {
        out.pass = false;
    } else {
        throw Error(ErrorCode::MalformedOutput, "verdict must be pass or fail");
    }
    if (parsed.contains("feedback") && parsed["feedback"].is_string()) {
        out.feedback = std::string(trim(parsed["feedback"].get<std::string>()));
    }
    if (out.pass) {
        out.feedback.clear();
    } else if (out.feedback.empty()) {
        out.feedback = kGenericRejection;
    }
    return out;
}

std::optional<int> parse_importance(std::string_view output) {
    for (std::size_t i = 0; i < output.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(output[i]))) continue;
        const bool negative = i > 0 && output[i - 1] == '-';
        long value = 0;
        while (i < output.size() && std::isdigit(static_cast<unsigned char>(output[i]))) {
            value = std::min<long>(value * 10 + (output[i] - '0'), 1000);
            ++i;
        }
        if (negative) value = -value;
        return static_cast<int>(std::clamp<long>(value, kMinScore, kMaxScore));
    }
    return std::nullopt;
}

std::string format_questions_block(const std::vector<ParsedQuestion>& questions) {
    json list = json::array();
    for (const auto& q : questions) {
        json item{{"text", q.text}};
        if (q.theme) item["theme"] = std::string(to_string(*q.theme));
        list.push_back(std::move(item));
    }
    return "```json\n" + list.dump(2) + "\n```";
}

std::string format_verdict_block(bool pass, std::string_view feedback) {
    json v{{"verdict", pass ? "pass" : "fail"}, {"feedback", std::string(feedback)}};
    return "```json\n" + v.dump() + "\n```";
}

std::optional<std::string> segment_body(std::string_view prompt, std::string_view head) {
    std::string needle = "\n\n" + std::string(head) + "\n";
    auto pos = prompt.find(needle);
    if (pos == std::string_view::npos) return std::nullopt;
    pos += needle.size();
    auto end = prompt.find("\n\n### ", pos);
    if (end == std::string_view::npos) end = prompt.size();
    return std::string(prompt.substr(pos, end - pos));
}

} // namespace elicit::prompts
