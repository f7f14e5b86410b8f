#pragma once

// Internal helpers shared by the parsing/serialization code. Not installed.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ledgerprint::detail {

std::vector<std::string_view> split(std::string_view line, char sep);

/// Strict double parse: whole token must be consumed, value must be finite.
std::optional<double> parse_double(std::string_view token);

/// Strict non-negative integer parse.
std::optional<uint64_t> parse_uint(std::string_view token);

/// Iterates lines of `text`, handling both \n and \r\n endings. Calls
/// fn(line_number, line) with 1-based line numbers; skips a trailing empty
/// fragment after the final newline.
template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
    size_t pos = 0;
    size_t line_no = 0;
    while (pos < text.size()) {
        size_t end = text.find('\n', pos);
        std::string_view line = end == std::string_view::npos ? text.substr(pos)
                                                              : text.substr(pos, end - pos);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        ++line_no;
        fn(line_no, line);
        if (end == std::string_view::npos) {
            break;
        }
        pos = end + 1;
    }
}

}  // namespace ledgerprint::detail
