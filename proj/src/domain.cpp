#include "elicit/domain.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "elicit/error.hpp"
#include "elicit/text.hpp"

namespace elicit {

namespace {

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(std::string_view name, const std::array<std::pair<Enum, std::string_view>, N>& table) {
    for (const auto& [value, text] : table) {
        if (text == name) return value;
    }
    return std::nullopt;
}

template <typename Enum, std::size_t N>
std::string_view name_of(Enum value, const std::array<std::pair<Enum, std::string_view>, N>& table) {
    for (const auto& [v, text] : table) {
        if (v == value) return text;
    }
    return "?";
}

constexpr std::array<std::pair<ColumnType, std::string_view>, 4> kColumnTypes{{
    {ColumnType::numeric, "numeric"},
    {ColumnType::categorical, "categorical"},
    {ColumnType::datetime, "datetime"},
    {ColumnType::text, "text"},
}};

constexpr std::array<std::pair<SelectionKind, std::string_view>, 5> kSelectionKinds{{
    {SelectionKind::whole_dataset, "whole_dataset"},
    {SelectionKind::columns, "columns"},
    {SelectionKind::rows, "rows"},
    {SelectionKind::cells, "cells"},
    {SelectionKind::rectangle, "rectangle"},
}};

constexpr std::array<std::pair<Theme, std::string_view>, kThemeCount> kThemes{{
    {Theme::motivation, "motivation"},
    {Theme::composition, "composition"},
    {Theme::collection_process, "collection_process"},
    {Theme::preprocessing, "preprocessing"},
    {Theme::uses, "uses"},
    {Theme::distribution, "distribution"},
    {Theme::maintenance, "maintenance"},
}};

constexpr std::array<std::pair<QuestionOrigin, std::string_view>, 2> kQuestionOrigins{{
    {QuestionOrigin::predefined, "predefined"},
    {QuestionOrigin::generated, "generated"},
}};

constexpr std::array<std::pair<QuestionStatus, std::string_view>, 4> kQuestionStatuses{{
    {QuestionStatus::pooled, "pooled"},
    {QuestionStatus::displayed, "displayed"},
    {QuestionStatus::answered, "answered"},
    {QuestionStatus::removed, "removed"},
}};

constexpr std::array<std::pair<AnnotationOrigin, std::string_view>, 2> kAnnotationOrigins{{
    {AnnotationOrigin::direct, "direct"},
    {AnnotationOrigin::answer, "answer"},
}};

void check_index(std::size_t index, std::size_t limit, const char* axis) {
    if (index >= limit) {
        throw Error(ErrorCode::OutOfBounds,
                    std::string(axis) + " index " + std::to_string(index) + " (size " + std::to_string(limit) + ")");
    }
}

} // namespace

std::string_view to_string(ColumnType type) noexcept { return name_of(type, kColumnTypes); }
std::optional<ColumnType> parse_column_type(std::string_view name) noexcept { return lookup(name, kColumnTypes); }
std::string_view to_string(SelectionKind kind) noexcept { return name_of(kind, kSelectionKinds); }
std::optional<SelectionKind> parse_selection_kind(std::string_view name) noexcept {
    return lookup(name, kSelectionKinds);
}
std::string_view to_string(Theme theme) noexcept { return name_of(theme, kThemes); }
std::optional<Theme> parse_theme(std::string_view name) noexcept { return lookup(name, kThemes); }
std::string_view to_string(QuestionOrigin origin) noexcept { return name_of(origin, kQuestionOrigins); }
std::string_view to_string(QuestionStatus status) noexcept { return name_of(status, kQuestionStatuses); }
std::optional<QuestionOrigin> parse_question_origin(std::string_view name) noexcept {
    return lookup(name, kQuestionOrigins);
}
std::optional<QuestionStatus> parse_question_status(std::string_view name) noexcept {
    return lookup(name, kQuestionStatuses);
}
std::string_view to_string(AnnotationOrigin origin) noexcept { return name_of(origin, kAnnotationOrigins); }
std::optional<AnnotationOrigin> parse_annotation_origin(std::string_view name) noexcept {
    return lookup(name, kAnnotationOrigins);
}

std::string_view to_string(Verdict verdict) noexcept {
    return verdict == Verdict::accepted ? "accepted" : "rejected";
}

std::string_view to_string(ValidationStage stage) noexcept {
    return stage == ValidationStage::faithfulness ? "faithfulness" : "contradiction";
}

Dataset::Dataset(std::string id, std::string name, std::vector<ColumnMeta> columns, std::vector<CellValue> cells)
    : id_(std::move(id)), name_(std::move(name)), columns_(std::move(columns)), cells_(std::move(cells)) {
    if (columns_.empty()) {
        if (!cells_.empty()) throw Error(ErrorCode::RaggedRow, "cells without columns");
        return;
    }
    if (cells_.size() % columns_.size() != 0) {
        throw Error(ErrorCode::RaggedRow, "cell count is not a multiple of the column count");
    }
    row_count_ = cells_.size() / columns_.size();

    std::set<std::string, std::less<>> seen;
    for (auto& column : columns_) {
        column.name = std::string(trim(column.name));
        if (!seen.insert(column.name).second) throw Error(ErrorCode::DuplicateColumn, column.name);
    }
}

Selection Selection::of_columns(std::vector<std::size_t> columns) {
    Selection s;
    s.kind = SelectionKind::columns;
    s.column_indices = std::move(columns);
    return s;
}

Selection Selection::of_rows(std::vector<std::size_t> rows) {
    Selection s;
    s.kind = SelectionKind::rows;
    s.row_indices = std::move(rows);
    return s;
}

Selection Selection::of_cells(std::vector<CellCoord> cells) {
    Selection s;
    s.kind = SelectionKind::cells;
    s.cells = std::move(cells);
    return s;
}

Selection Selection::of_rect(CellRect rect) {
    Selection s;
    s.kind = SelectionKind::rectangle;
    s.rect = rect;
    return s;
}

Selection validate_selection(Selection selection, std::size_t row_count, std::size_t column_count) {
    const bool carries_indices = !selection.column_indices.empty() || !selection.row_indices.empty() ||
                                 !selection.cells.empty() || selection.rect.has_value();
    switch (selection.kind) {
    case SelectionKind::whole_dataset:
        if (carries_indices) throw Error(ErrorCode::InvalidArgument, "whole_dataset selection carries indices");
        break;
    case SelectionKind::columns:
        if (selection.column_indices.empty()) throw Error(ErrorCode::EmptySelection, "no columns selected");
        for (auto c : selection.column_indices) check_index(c, column_count, "column");
        break;
    case SelectionKind::rows:
        if (selection.row_indices.empty()) throw Error(ErrorCode::EmptySelection, "no rows selected");
        for (auto r : selection.row_indices) check_index(r, row_count, "row");
        break;
    case SelectionKind::cells:
        if (selection.cells.empty()) throw Error(ErrorCode::EmptySelection, "no cells selected");
        for (auto cell : selection.cells) {
            check_index(cell.row, row_count, "row");
            check_index(cell.column, column_count, "column");
        }
        break;
    case SelectionKind::rectangle: {
        if (!selection.rect) throw Error(ErrorCode::EmptySelection, "rectangle without bounds");
        const auto& r = *selection.rect;
        if (r.row_start > r.row_end || r.col_start > r.col_end) {
            throw Error(ErrorCode::EmptySelection, "rectangle bounds are reversed");
        }
        check_index(r.row_end, row_count, "row");
        check_index(r.col_end, column_count, "column");
        break;
    }
    }
    return selection;
}

std::vector<CellCoord> selection_instances(const Selection& selection, const Dataset& dataset) {
    std::vector<CellCoord> out;
    switch (selection.kind) {
    case SelectionKind::whole_dataset:
        return out;
    case SelectionKind::columns:
        for (auto c : selection.column_indices) {
            for (std::size_t r = 0; r < dataset.row_count(); ++r) out.push_back({r, c});
        }
        break;
    case SelectionKind::rows:
        for (auto r : selection.row_indices) {
            for (std::size_t c = 0; c < dataset.column_count(); ++c) out.push_back({r, c});
        }
        break;
    case SelectionKind::cells:
        out = selection.cells;
        break;
    case SelectionKind::rectangle: {
        const auto& rect = *selection.rect;
        for (auto r = rect.row_start; r <= rect.row_end; ++r) {
            for (auto c = rect.col_start; c <= rect.col_end; ++c) out.push_back({r, c});
        }
        break;
    }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool status_transition_allowed(QuestionStatus from, QuestionStatus to) noexcept {
    switch (from) {
    case QuestionStatus::pooled:
        return to == QuestionStatus::displayed;
    case QuestionStatus::displayed:
        return to == QuestionStatus::answered || to == QuestionStatus::removed;
    default:
        return false;
    }
}

ValidationResult ValidationResult::reject(ValidationStage stage, std::string feedback) {
    ValidationResult r;
    r.verdict = Verdict::rejected;
    r.stage = stage;
    r.feedback = std::move(feedback);
    return r;
}

} // namespace elicit
