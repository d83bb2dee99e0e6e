#include "elicit/json_io.hpp"

#include "elicit/error.hpp"

namespace elicit {

using nlohmann::json;

json parse_json(std::string_view text) {
    auto doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw Error(ErrorCode::InvalidArgument, "body is not valid JSON");
    return doc;
}

template <typename T>
T field(const json& j, const char* name) {
    if (!j.is_object() || !j.contains(name)) throw Error(ErrorCode::InvalidArgument, std::string("missing field ") + name);
    try {
        return j.at(name).get<T>();
    } catch (const json::exception&) {
        throw Error(ErrorCode::InvalidArgument, std::string("field ") + name + " has the wrong type");
    }
}

template std::string field<std::string>(const json&, const char*);
template std::uint64_t field<std::uint64_t>(const json&, const char*);
template int field<int>(const json&, const char*);
template bool field<bool>(const json&, const char*);
template std::vector<std::size_t> field<std::vector<std::size_t>>(const json&, const char*);

namespace {

template <typename T, typename Parse>
T enum_field(const json& j, const char* name, Parse parse) {
    const auto text = field<std::string>(j, name);
    const auto value = parse(text);
    if (!value) throw Error(ErrorCode::InvalidArgument, std::string("bad value for ") + name + ": " + text);
    return *value;
}

} // namespace

void to_json(json& j, const Selection& s) {
    j = json{{"kind", to_string(s.kind)}};
    switch (s.kind) {
    case SelectionKind::whole_dataset:
        break;
    case SelectionKind::columns:
        j["column_indices"] = s.column_indices;
        break;
    case SelectionKind::rows:
        j["row_indices"] = s.row_indices;
        break;
    case SelectionKind::cells: {
        json cells = json::array();
        for (const auto& c : s.cells) cells.push_back({{"row", c.row}, {"column", c.column}});
        j["cells"] = std::move(cells);
        break;
    }
    case SelectionKind::rectangle:
        if (s.rect) {
            j["rect"] = {{"row_start", s.rect->row_start},
                         {"row_end", s.rect->row_end},
                         {"col_start", s.rect->col_start},
                         {"col_end", s.rect->col_end}};
        }
        break;
    }
}

void from_json(const json& j, Selection& s) {
    if (!j.is_object()) throw Error(ErrorCode::InvalidArgument, "selection must be an object");
    s = Selection{};
    s.kind = enum_field<SelectionKind>(j, "kind", parse_selection_kind);
    // Indices belonging to a different kind are kept so validation can reject them.
    if (j.contains("column_indices")) s.column_indices = field<std::vector<std::size_t>>(j, "column_indices");
    if (j.contains("row_indices")) s.row_indices = field<std::vector<std::size_t>>(j, "row_indices");
    if (j.contains("cells")) {
        if (!j["cells"].is_array()) throw Error(ErrorCode::InvalidArgument, "cells must be an array");
        for (const auto& c : j["cells"]) {
            s.cells.push_back({field<std::uint64_t>(c, "row"), field<std::uint64_t>(c, "column")});
        }
    }
    if (j.contains("rect")) {
        const auto& r = j["rect"];
        s.rect = CellRect{field<std::uint64_t>(r, "row_start"), field<std::uint64_t>(r, "row_end"),
                          field<std::uint64_t>(r, "col_start"), field<std::uint64_t>(r, "col_end")};
    }
}

void to_json(json& j, const Question& q) {
    j = json{{"id", q.id},
             {"text", q.text},
             {"origin", to_string(q.origin)},
             {"status", to_string(q.status)},
             {"originality", q.originality},
             {"recency", q.recency},
             {"importance", q.importance},
             {"importance_degraded", q.importance_degraded}};
    j["theme"] = q.theme ? json(to_string(*q.theme)) : json(nullptr);
    j["trigger_annotation_id"] = q.trigger_annotation_id ? json(*q.trigger_annotation_id) : json(nullptr);
}

void from_json(const json& j, Question& q) {
    q = Question{};
    q.id = field<std::string>(j, "id");
    q.text = field<std::string>(j, "text");
    q.origin = enum_field<QuestionOrigin>(j, "origin", parse_question_origin);
    q.status = enum_field<QuestionStatus>(j, "status", parse_question_status);
    q.originality = field<int>(j, "originality");
    q.recency = field<int>(j, "recency");
    q.importance = field<int>(j, "importance");
    q.importance_degraded = field<bool>(j, "importance_degraded");
    if (j.contains("theme") && !j["theme"].is_null()) q.theme = enum_field<Theme>(j, "theme", parse_theme);
    if (j.contains("trigger_annotation_id") && !j["trigger_annotation_id"].is_null()) {
        q.trigger_annotation_id = field<std::string>(j, "trigger_annotation_id");
    }
}

void to_json(json& j, const Annotation& a) {
    j = json{{"id", a.id},
             {"selection", a.selection},
             {"text", a.text},
             {"origin", to_string(a.origin)},
             {"sequence", a.sequence},
             {"created_at", a.created_at}};
    j["question_id"] = a.question_id ? json(*a.question_id) : json(nullptr);
}

void from_json(const json& j, Annotation& a) {
    a = Annotation{};
    a.id = field<std::string>(j, "id");
    if (!j.contains("selection")) throw Error(ErrorCode::InvalidArgument, "missing field selection");
    a.selection = j["selection"].get<Selection>();
    a.text = field<std::string>(j, "text");
    a.origin = enum_field<AnnotationOrigin>(j, "origin", parse_annotation_origin);
    a.sequence = field<std::uint64_t>(j, "sequence");
    a.created_at = field<std::string>(j, "created_at");
    if (j.contains("question_id") && !j["question_id"].is_null()) a.question_id = field<std::string>(j, "question_id");
}

namespace ingest {

void to_json(json& j, const IngestConfig& c) {
    j = json{{"max_rows", c.max_rows},
             {"max_columns", c.max_columns},
             {"null_tokens", c.null_tokens},
             {"delimiter", std::string(1, c.delimiter)}};
}

void from_json(const json& j, IngestConfig& c) {
    c = IngestConfig{};
    if (j.contains("max_rows")) c.max_rows = field<std::uint64_t>(j, "max_rows");
    if (j.contains("max_columns")) c.max_columns = field<std::uint64_t>(j, "max_columns");
    if (j.contains("null_tokens")) {
        try {
            c.null_tokens = j["null_tokens"].get<std::vector<std::string>>();
        } catch (const json::exception&) {
            throw Error(ErrorCode::InvalidArgument, "null_tokens must be a list of strings");
        }
    }
    if (j.contains("delimiter")) {
        const auto d = field<std::string>(j, "delimiter");
        if (d.size() != 1) throw Error(ErrorCode::InvalidArgument, "delimiter must be one character");
        c.delimiter = d[0];
    }
}

} // namespace ingest

} // namespace elicit
