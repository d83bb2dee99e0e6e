#include "elicit/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <unordered_set>

#include "elicit/error.hpp"
#include "elicit/hash.hpp"
#include "elicit/text.hpp"

namespace elicit::ingest {

namespace {

bool is_digit(char c) noexcept { return c >= '0' && c <= '9'; }

// Reads exactly `width` digits at `pos`.
std::optional<int> read_digits(std::string_view text, std::size_t pos, std::size_t width) noexcept {
    if (pos + width > text.size()) return std::nullopt;
    int value = 0;
    for (std::size_t i = 0; i < width; ++i) {
        const char c = text[pos + i];
        if (!is_digit(c)) return std::nullopt;
        value = value * 10 + (c - '0');
    }
    return value;
}

} // namespace

std::vector<Record> split_records(std::string_view text, char delimiter) {
    std::vector<Record> records;
    Record current;
    std::string field;
    std::size_t i = 0;
    const std::size_t n = text.size();
    std::size_t line = 1;

    auto end_record = [&] {
        current.push_back(std::move(field));
        field.clear();
        records.push_back(std::move(current));
        current.clear();
    };

    if (n == 0) return records;

    while (true) {
        // start of a field
        if (i < n && text[i] == '"') {
            ++i;
            while (true) {
                if (i >= n) throw Error(ErrorCode::DecodeError, "unterminated quoted field at line " + std::to_string(line));
                const char c = text[i];
                if (c == '"') {
                    if (i + 1 < n && text[i + 1] == '"') {
                        field.push_back('"');
                        i += 2;
                        continue;
                    }
                    ++i;
                    break;
                }
                if (c == '\n') ++line;
                field.push_back(c);
                ++i;
            }
            if (i < n && text[i] != delimiter && text[i] != '\n' && !(text[i] == '\r' && i + 1 < n && text[i + 1] == '\n')) {
                throw Error(ErrorCode::DecodeError, "unexpected character after closing quote at line " + std::to_string(line));
            }
        } else {
            while (i < n && text[i] != delimiter && text[i] != '\n' &&
                   !(text[i] == '\r' && i + 1 < n && text[i + 1] == '\n')) {
                field.push_back(text[i]);
                ++i;
            }
        }

        if (i >= n) {
            end_record();
            break;
        }
        if (text[i] == delimiter) {
            current.push_back(std::move(field));
            field.clear();
            ++i;
            continue;
        }
        // record separator
        i += text[i] == '\r' ? 2 : 1;
        ++line;
        end_record();
        if (i >= n) break;
    }
    return records;
}

std::string format_record(const Record& fields, char delimiter) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) out.push_back(delimiter);
        const auto& f = fields[i];
        const bool needs_quotes = f.find_first_of(std::string{delimiter, '"', '\r', '\n'}) != std::string::npos;
        if (!needs_quotes) {
            out += f;
            continue;
        }
        out.push_back('"');
        for (char c : f) {
            if (c == '"') out.push_back('"');
            out.push_back(c);
        }
        out.push_back('"');
    }
    return out;
}

std::optional<double> parse_number(std::string_view text) noexcept {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    if (text.empty()) return std::nullopt;
    // from_chars accepts "inf", "nan" and friends; require a digit or dot up front.
    const char lead = text.front() == '-' && text.size() > 1 ? text[1] : text.front();
    if (!is_digit(lead) && lead != '.') return std::nullopt;
    double value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value, std::chars_format::general);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) return std::nullopt;
    return value;
}

std::optional<double> parse_timestamp(std::string_view text) noexcept {
    using namespace std::chrono;
    text = trim(text);
    const auto y = read_digits(text, 0, 4);
    if (!y || text.size() < 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    const auto mo = read_digits(text, 5, 2);
    const auto d = read_digits(text, 8, 2);
    if (!mo || !d) return std::nullopt;
    const year_month_day date{year{*y}, month{static_cast<unsigned>(*mo)}, day{static_cast<unsigned>(*d)}};
    if (!date.ok()) return std::nullopt;
    double seconds = static_cast<double>(sys_days(date).time_since_epoch().count()) * 86400.0;
    if (text.size() == 10) return seconds;

    if (text[10] != 'T' && text[10] != ' ') return std::nullopt;
    const auto hh = read_digits(text, 11, 2);
    const auto mm = read_digits(text, 14, 2);
    if (!hh || !mm || text.size() < 16 || text[13] != ':' || *hh > 23 || *mm > 59) return std::nullopt;
    seconds += *hh * 3600.0 + *mm * 60.0;
    std::size_t pos = 16;
    if (pos < text.size() && text[pos] == ':') {
        const auto ss = read_digits(text, pos + 1, 2);
        if (!ss || *ss > 60) return std::nullopt;
        seconds += *ss;
        pos += 3;
        if (pos < text.size() && text[pos] == '.') {
            ++pos;
            double scale = 0.1;
            const std::size_t start = pos;
            while (pos < text.size() && is_digit(text[pos])) {
                seconds += (text[pos] - '0') * scale;
                scale /= 10;
                ++pos;
            }
            if (pos == start) return std::nullopt;
        }
    }
    if (pos == text.size()) return seconds;
    if (text[pos] == 'Z' && pos + 1 == text.size()) return seconds;
    if ((text[pos] == '+' || text[pos] == '-') && pos + 6 == text.size() && text[pos + 3] == ':') {
        const auto oh = read_digits(text, pos + 1, 2);
        const auto om = read_digits(text, pos + 4, 2);
        if (!oh || !om || *oh > 23 || *om > 59) return std::nullopt;
        const double offset = *oh * 3600.0 + *om * 60.0;
        return text[pos] == '+' ? seconds - offset : seconds + offset;
    }
    return std::nullopt;
}

bool is_null_token(std::string_view raw, const IngestConfig& config) noexcept {
    if (raw.empty()) return true;
    return std::find(config.null_tokens.begin(), config.null_tokens.end(), raw) != config.null_tokens.end();
}

ColumnType infer_column_type(const std::vector<std::string>& values, const IngestConfig& config) {
    std::size_t non_null = 0;
    bool all_numeric = true;
    bool all_datetime = true;
    std::unordered_set<std::string_view> distinct;
    for (const auto& v : values) {
        if (is_null_token(v, config)) continue;
        ++non_null;
        if (all_numeric && !parse_number(v)) all_numeric = false;
        if (all_datetime && !parse_timestamp(v)) all_datetime = false;
        distinct.insert(v);
    }
    if (non_null == 0) return ColumnType::text;
    if (all_numeric) return ColumnType::numeric;
    if (all_datetime) return ColumnType::datetime;
    const double threshold = std::max(20.0, 0.05 * static_cast<double>(non_null));
    return static_cast<double>(distinct.size()) <= threshold ? ColumnType::categorical : ColumnType::text;
}

Dataset parse_tabular(std::string_view bytes, const IngestConfig& config, std::string name) {
    if (config.max_rows < 1 || config.max_columns < 1) {
        throw Error(ErrorCode::InvalidArgument, "max_rows and max_columns must be at least 1");
    }
    if (!is_valid_utf8(bytes)) throw Error(ErrorCode::DecodeError, "input is not valid UTF-8");
    const std::uint64_t content_hash = StableHash{}.add(name).add(bytes).value();
    if (bytes.starts_with("\xEF\xBB\xBF")) bytes.remove_prefix(3);

    auto records = split_records(bytes, config.delimiter);
    if (records.empty()) throw Error(ErrorCode::DecodeError, "missing header row");

    const auto& header = records.front();
    if (header.size() > config.max_columns) {
        throw Error(ErrorCode::LimitExceeded, "columns limit " + std::to_string(config.max_columns));
    }
    const std::size_t rows = records.size() - 1;
    if (rows > config.max_rows) {
        throw Error(ErrorCode::LimitExceeded, "rows limit " + std::to_string(config.max_rows));
    }
    const std::size_t cols = header.size();
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != cols) {
            throw Error(ErrorCode::RaggedRow, "row " + std::to_string(r - 1) + " has " +
                                                  std::to_string(records[r].size()) + " fields, expected " +
                                                  std::to_string(cols));
        }
    }

    std::vector<ColumnMeta> columns(cols);
    std::vector<CellValue> cells(rows * cols);
    std::vector<std::string> column_values(rows);
    for (std::size_t c = 0; c < cols; ++c) {
        columns[c].name = std::string(trim(header[c]));
        for (std::size_t r = 0; r < rows; ++r) column_values[r] = records[r + 1][c];
        const ColumnType type = infer_column_type(column_values, config);
        columns[c].inferred_type = type;
        for (std::size_t r = 0; r < rows; ++r) {
            auto& cell = cells[r * cols + c];
            cell.raw = std::move(records[r + 1][c]);
            cell.is_null = is_null_token(cell.raw, config);
            if (cell.is_null) {
                ++columns[c].null_count;
            } else if (type == ColumnType::numeric) {
                cell.parsed = parse_number(cell.raw);
            } else if (type == ColumnType::datetime) {
                cell.parsed = parse_timestamp(cell.raw);
            }
        }
    }
    return Dataset("ds-" + to_hex(content_hash), std::move(name), std::move(columns), std::move(cells));
}

std::string serialize_tabular(const Dataset& dataset, char delimiter) {
    Record fields;
    for (const auto& c : dataset.columns()) fields.push_back(c.name);
    std::string out = format_record(fields, delimiter);
    out.push_back('\n');
    for (std::size_t r = 0; r < dataset.row_count(); ++r) {
        fields.clear();
        for (std::size_t c = 0; c < dataset.column_count(); ++c) fields.push_back(dataset.cell(r, c).raw);
        out += format_record(fields, delimiter);
        out.push_back('\n');
    }
    return out;
}

} // namespace elicit::ingest
