#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "elicit/domain.hpp"

namespace elicit::ingest {

struct IngestConfig {
    std::size_t max_rows = 10000;
    std::size_t max_columns = 20;
    std::vector<std::string> null_tokens{"", "NA", "N/A", "null"};
    char delimiter = ',';

    friend bool operator==(const IngestConfig&, const IngestConfig&) = default;
};

using Record = std::vector<std::string>;

// Splits delimited text into records. Double-quote quoting, quote doubling
// inside quoted fields, LF or CRLF record separators. A final line break
// does not start a new record. Throws Error{DecodeError} on an unterminated
// quote or garbage after a closing quote.
std::vector<Record> split_records(std::string_view text, char delimiter = ',');

// Inverse of split_records for a single record: quotes a field only when it
// contains the delimiter, a quote, CR or LF.
std::string format_record(const Record& fields, char delimiter = ',');

// Decimal number with an optional sign, optional fraction and optional
// exponent. Surrounding blanks are ignored. inf/nan and hex are rejected.
std::optional<double> parse_number(std::string_view text) noexcept;

// ISO-8601 calendar date (YYYY-MM-DD) or date-time
// (YYYY-MM-DD[T| ]HH:MM[:SS[.fraction]][Z|+HH:MM|-HH:MM]). Returns seconds
// since the Unix epoch, UTC. Anything else is rejected.
std::optional<double> parse_timestamp(std::string_view text) noexcept;

bool is_null_token(std::string_view raw, const IngestConfig& config) noexcept;

// numeric if every non-null value parses as a finite decimal, datetime if
// every non-null value is an ISO timestamp, categorical when the distinct
// count is at most max(20, 5% of the non-null count), text otherwise. A
// column with no non-null values is text.
ColumnType infer_column_type(const std::vector<std::string>& values, const IngestConfig& config = {});

// Header row required. Throws Error with LimitExceeded, RaggedRow,
// DuplicateColumn or DecodeError.
Dataset parse_tabular(std::string_view bytes, const IngestConfig& config = {}, std::string name = "dataset");

// Header plus raw cells, one record per row.
std::string serialize_tabular(const Dataset& dataset, char delimiter = ',');

} // namespace elicit::ingest
