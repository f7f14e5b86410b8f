#include "text_util.hpp"

#include "ledgerprint/format.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace ledgerprint {

std::string canonical_seconds(double value) {
    // Values below 1 need more decimal places than significant digits, so
    // the cap is well past 17 (a sub-microsecond timestamp like 4.9e-5 takes
    // ~21 places to round-trip).
    char buf[80];
    int len = 0;
    for (int prec = 6; prec <= 60; ++prec) {
        len = std::snprintf(buf, sizeof(buf), "%.*f", prec, value);
        char* end = nullptr;
        const double back = std::strtod(buf, &end);
        if (end == buf + len && back == value) {
            break;
        }
    }
    return std::string(buf, static_cast<size_t>(len));
}

namespace detail {

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    size_t pos = 0;
    while (true) {
        const size_t next = line.find(sep, pos);
        if (next == std::string_view::npos) {
            out.push_back(line.substr(pos));
            break;
        }
        out.push_back(line.substr(pos, next - pos));
        pos = next + 1;
    }
    return out;
}

std::optional<double> parse_double(std::string_view token) {
    if (token.empty()) {
        return std::nullopt;
    }
    const std::string buf(token);
    char* end = nullptr;
    const double value = std::strtod(buf.c_str(), &end);
    if (end != buf.c_str() + buf.size() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

std::optional<uint64_t> parse_uint(std::string_view token) {
    if (token.empty()) {
        return std::nullopt;
    }
    uint64_t value = 0;
    for (char c : token) {
        if (c < '0' || c > '9') {
            return std::nullopt;
        }
        const uint64_t digit = static_cast<uint64_t>(c - '0');
        if (value > (UINT64_MAX - digit) / 10) {
            return std::nullopt;
        }
        value = value * 10 + digit;
    }
    return value;
}

}  // namespace detail
}  // namespace ledgerprint
