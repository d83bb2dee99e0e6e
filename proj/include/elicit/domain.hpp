#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace elicit {

// ---------------------------------------------------------------------------
// Tabular data

enum class ColumnType { numeric, categorical, datetime, text };

std::string_view to_string(ColumnType type) noexcept;
std::optional<ColumnType> parse_column_type(std::string_view name) noexcept;

struct ColumnMeta {
    std::string name;
    ColumnType inferred_type = ColumnType::text;
    std::size_t null_count = 0;

    friend bool operator==(const ColumnMeta&, const ColumnMeta&) = default;
};

// parsed holds the number for numeric columns and seconds since the Unix
// epoch (UTC) for datetime columns.
struct CellValue {
    std::string raw;
    std::optional<double> parsed;
    bool is_null = false;

    friend bool operator==(const CellValue&, const CellValue&) = default;
};

// Immutable rectangular table. The constructor enforces the grid invariants;
// use ingest::parse_tabular to build one from bytes.
class Dataset {
public:
    Dataset(std::string id, std::string name, std::vector<ColumnMeta> columns, std::vector<CellValue> cells);

    const std::string& id() const noexcept { return id_; }
    const std::string& name() const noexcept { return name_; }
    const std::vector<ColumnMeta>& columns() const noexcept { return columns_; }
    const ColumnMeta& column(std::size_t index) const { return columns_.at(index); }
    std::size_t row_count() const noexcept { return row_count_; }
    std::size_t column_count() const noexcept { return columns_.size(); }

    const CellValue& cell(std::size_t row, std::size_t column) const {
        return cells_[row * columns_.size() + column];
    }
    const std::vector<CellValue>& cells() const noexcept { return cells_; }

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    std::string id_;
    std::string name_;
    std::vector<ColumnMeta> columns_;
    std::vector<CellValue> cells_;
    std::size_t row_count_ = 0;
};

// ---------------------------------------------------------------------------
// Selections

enum class SelectionKind { whole_dataset, columns, rows, cells, rectangle };

std::string_view to_string(SelectionKind kind) noexcept;
std::optional<SelectionKind> parse_selection_kind(std::string_view name) noexcept;

struct CellCoord {
    std::size_t row = 0;
    std::size_t column = 0;

    friend auto operator<=>(const CellCoord&, const CellCoord&) = default;
};

// Inclusive bounds.
struct CellRect {
    std::size_t row_start = 0;
    std::size_t row_end = 0;
    std::size_t col_start = 0;
    std::size_t col_end = 0;

    friend bool operator==(const CellRect&, const CellRect&) = default;
};

// Indices always refer to ingest order, never to a sorted presentation.
struct Selection {
    SelectionKind kind = SelectionKind::whole_dataset;
    std::vector<std::size_t> column_indices;
    std::vector<std::size_t> row_indices;
    std::vector<CellCoord> cells;
    std::optional<CellRect> rect;

    static Selection whole_dataset() { return {}; }
    static Selection of_columns(std::vector<std::size_t> columns);
    static Selection of_rows(std::vector<std::size_t> rows);
    static Selection of_cells(std::vector<CellCoord> cells);
    static Selection of_rect(CellRect rect);

    bool is_general() const noexcept { return kind == SelectionKind::whole_dataset; }

    friend bool operator==(const Selection&, const Selection&) = default;
};

// Returns the selection unchanged when it fits a row_count x column_count grid.
// Throws Error{OutOfBounds} or Error{EmptySelection}.
Selection validate_selection(Selection selection, std::size_t row_count, std::size_t column_count);

// Exact, sorted, duplicate-free set of covered cells. whole_dataset yields an
// empty list. Precondition: the selection was validated against the dataset.
std::vector<CellCoord> selection_instances(const Selection& selection, const Dataset& dataset);

// ---------------------------------------------------------------------------
// Metadata genres

enum class Theme : std::uint8_t {
    motivation,
    composition,
    collection_process,
    preprocessing,
    uses,
    distribution,
    maintenance,
};

inline constexpr std::size_t kThemeCount = 7;
inline constexpr std::array<Theme, kThemeCount> kAllThemes{
    Theme::motivation, Theme::composition, Theme::collection_process, Theme::preprocessing,
    Theme::uses,       Theme::distribution, Theme::maintenance,
};

std::string_view to_string(Theme theme) noexcept;
std::optional<Theme> parse_theme(std::string_view name) noexcept;
constexpr std::size_t index_of(Theme theme) noexcept { return static_cast<std::size_t>(theme); }

// ---------------------------------------------------------------------------
// Questions

enum class QuestionOrigin { predefined, generated };
enum class QuestionStatus { pooled, displayed, answered, removed };

std::string_view to_string(QuestionOrigin origin) noexcept;
std::string_view to_string(QuestionStatus status) noexcept;
std::optional<QuestionOrigin> parse_question_origin(std::string_view name) noexcept;
std::optional<QuestionStatus> parse_question_status(std::string_view name) noexcept;

inline constexpr int kMinScore = 1;
inline constexpr int kMaxScore = 5;

struct Question {
    std::string id;
    std::string text;
    QuestionOrigin origin = QuestionOrigin::generated;
    std::optional<Theme> theme;
    QuestionStatus status = QuestionStatus::pooled;
    int originality = kMaxScore;
    int recency = kMaxScore;
    int importance = 3;
    bool importance_degraded = false;
    std::optional<std::string> trigger_annotation_id;

    friend bool operator==(const Question&, const Question&) = default;
};

// pooled -> displayed -> answered | removed. Nothing leaves answered/removed.
bool status_transition_allowed(QuestionStatus from, QuestionStatus to) noexcept;

// ---------------------------------------------------------------------------
// Annotations

enum class AnnotationOrigin { direct, answer };

std::string_view to_string(AnnotationOrigin origin) noexcept;
std::optional<AnnotationOrigin> parse_annotation_origin(std::string_view name) noexcept;

struct Annotation {
    std::string id;
    Selection selection;
    std::string text;
    AnnotationOrigin origin = AnnotationOrigin::direct;
    std::optional<std::string> question_id;
    std::uint64_t sequence = 0;
    std::string created_at;

    bool is_general() const noexcept { return selection.is_general(); }

    friend bool operator==(const Annotation&, const Annotation&) = default;
};

// ---------------------------------------------------------------------------
// Answer validation

enum class Verdict { accepted, rejected };
enum class ValidationStage { faithfulness, contradiction };

std::string_view to_string(Verdict verdict) noexcept;
std::string_view to_string(ValidationStage stage) noexcept;

struct ValidationResult {
    Verdict verdict = Verdict::accepted;
    std::string feedback;
    std::optional<ValidationStage> stage;

    static ValidationResult accept() { return {}; }
    static ValidationResult reject(ValidationStage stage, std::string feedback);

    bool accepted() const noexcept { return verdict == Verdict::accepted; }

    friend bool operator==(const ValidationResult&, const ValidationResult&) = default;
};

} // namespace elicit
