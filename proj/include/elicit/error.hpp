#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace elicit {

// Every failure the core can report. The names returned by error_name() are
// part of the HTTP contract (they appear verbatim in 4xx/5xx bodies).
enum class ErrorCode {
    OutOfBounds,
    EmptySelection,
    InvalidArgument,
    LimitExceeded,
    RaggedRow,
    DuplicateColumn,
    DecodeError,
    NonNumericColumn,
    EmptyColumn,
    EmptyDataset,
    BudgetTooSmall,
    UnboundSlot,
    NoAnnotations,
    MalformedOutput,
    CountMismatch,
    MalformedProviderOutput,
    AuthError,
    Timeout,
    RateLimited,
    TransportError,
    ProviderError,
    UnknownQuestion,
    NotDisplayed,
    RefillNotEnabled,
    PreconditionNotMet,
    SequenceConflict,
    StorageError,
    UnknownSession,
    CorruptLog,
    SessionBusy,
};

std::string_view error_name(ErrorCode code) noexcept;

// True for failures of the completion boundary. These are system errors and
// are never reported to the expert as an answer rejection.
constexpr bool is_provider_failure(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::AuthError:
    case ErrorCode::Timeout:
    case ErrorCode::RateLimited:
    case ErrorCode::TransportError:
    case ErrorCode::ProviderError:
    case ErrorCode::MalformedProviderOutput:
        return true;
    default:
        return false;
    }
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(error_name(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// CorruptLog carries the byte offset of the last intact record boundary.
class CorruptLogError : public Error {
public:
    CorruptLogError(std::uint64_t position, std::uint64_t good_events, const std::string& message)
        : Error(ErrorCode::CorruptLog, message), position_(position), good_events_(good_events) {}

    std::uint64_t position() const noexcept { return position_; }
    std::uint64_t good_events() const noexcept { return good_events_; }

private:
    std::uint64_t position_;
    std::uint64_t good_events_;
};

} // namespace elicit
