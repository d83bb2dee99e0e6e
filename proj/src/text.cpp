#include "elicit/text.hpp"

#include <cctype>

#include "elicit/error.hpp"
#include "elicit/hash.hpp"

namespace elicit {

std::string_view trim(std::string_view text) noexcept {
    const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
    while (!text.empty() && is_space(text.back())) text.remove_suffix(1);
    return text;
}

std::string to_lower_ascii(std::string_view text) {
    std::string out(text);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool is_valid_utf8(std::string_view bytes) noexcept {
    std::size_t i = 0;
    while (i < bytes.size()) {
        const auto c = static_cast<unsigned char>(bytes[i]);
        std::size_t extra = 0;
        std::uint32_t cp = 0;
        if (c < 0x80) {
            ++i;
            continue;
        } else if ((c & 0xE0) == 0xC0) {
            extra = 1;
            cp = c & 0x1F;
        } else if ((c & 0xF0) == 0xE0) {
            extra = 2;
            cp = c & 0x0F;
        } else if ((c & 0xF8) == 0xF0) {
            extra = 3;
            cp = c & 0x07;
        } else {
            return false;
        }
        if (i + extra >= bytes.size()) return false;
        for (std::size_t k = 1; k <= extra; ++k) {
            const auto cc = static_cast<unsigned char>(bytes[i + k]);
            if ((cc & 0xC0) != 0x80) return false;
            cp = (cp << 6) | (cc & 0x3F);
        }
        // overlong encodings, surrogates, out of range
        if ((extra == 1 && cp < 0x80) || (extra == 2 && cp < 0x800) || (extra == 3 && cp < 0x10000)) return false;
        if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
        i += extra + 1;
    }
    return true;
}

std::size_t utf8_length(std::string_view text) noexcept {
    std::size_t n = 0;
    for (unsigned char c : text) {
        if ((c & 0xC0) != 0x80) ++n;
    }
    return n;
}

std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) {
            if (start < text.size()) lines.emplace_back(text.substr(start));
            break;
        }
        lines.emplace_back(text.substr(start, end - start));
        start = end + 1;
    }
    return lines;
}

std::string to_hex(std::uint64_t value) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = kDigits[value & 0xF];
        value >>= 4;
    }
    return out;
}

std::string_view error_name(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::EmptySelection: return "EmptySelection";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::LimitExceeded: return "LimitExceeded";
    case ErrorCode::RaggedRow: return "RaggedRow";
    case ErrorCode::DuplicateColumn: return "DuplicateColumn";
    case ErrorCode::DecodeError: return "DecodeError";
    case ErrorCode::NonNumericColumn: return "NonNumericColumn";
    case ErrorCode::EmptyColumn: return "EmptyColumn";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::BudgetTooSmall: return "BudgetTooSmall";
    case ErrorCode::UnboundSlot: return "UnboundSlot";
    case ErrorCode::NoAnnotations: return "NoAnnotations";
    case ErrorCode::MalformedOutput: return "MalformedOutput";
    case ErrorCode::CountMismatch: return "CountMismatch";
    case ErrorCode::MalformedProviderOutput: return "MalformedProviderOutput";
    case ErrorCode::AuthError: return "AuthError";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::RateLimited: return "RateLimited";
    case ErrorCode::TransportError: return "TransportError";
    case ErrorCode::ProviderError: return "ProviderError";
    case ErrorCode::UnknownQuestion: return "UnknownQuestion";
    case ErrorCode::NotDisplayed: return "NotDisplayed";
    case ErrorCode::RefillNotEnabled: return "refill_not_enabled";
    case ErrorCode::PreconditionNotMet: return "PreconditionNotMet";
    case ErrorCode::SequenceConflict: return "SequenceConflict";
    case ErrorCode::StorageError: return "StorageError";
    case ErrorCode::UnknownSession: return "UnknownSession";
    case ErrorCode::CorruptLog: return "CorruptLog";
    case ErrorCode::SessionBusy: return "SessionBusy";
    }
    return "Unknown";
}

} // namespace elicit
