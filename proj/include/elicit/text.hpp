#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace elicit {

std::string_view trim(std::string_view text) noexcept;
std::string to_lower_ascii(std::string_view text);

bool is_valid_utf8(std::string_view bytes) noexcept;

// Number of Unicode code points; input is assumed to be valid UTF-8.
std::size_t utf8_length(std::string_view text) noexcept;

std::vector<std::string> split_lines(std::string_view text);

} // namespace elicit
