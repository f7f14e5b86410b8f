#include "ledgerprint/kv_config.hpp"

#include "ledgerprint/errors.hpp"
#include "text_util.hpp"

#include <cctype>
#include <cmath>

namespace ledgerprint {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return s;
}

[[noreturn]] void fail(size_t line_no, const std::string& what) {
    throw ParseError("line " + std::to_string(line_no) + ": " + what);
}

bool valid_key(std::string_view key) {
    if (key.empty()) {
        return false;
    }
    for (char c : key) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' && c != '.') {
            return false;
        }
    }
    return true;
}

}  // namespace

KvConfig KvConfig::parse(std::string_view text) {
    KvConfig config;

    // Parses one scalar or array token; `raw` has comments already stripped.
    auto parse_value = [](size_t line_no, std::string_view raw, auto&& self) -> Value {
        raw = trim(raw);
        if (raw.empty()) {
            fail(line_no, "missing value");
        }
        Value v;
        if (raw.front() == '"') {
            if (raw.size() < 2 || raw.back() != '"') {
                fail(line_no, "unterminated string");
            }
            v.kind = Value::Kind::String;
            std::string out;
            for (size_t i = 1; i + 1 < raw.size(); ++i) {
                char c = raw[i];
                if (c == '\\' && i + 2 < raw.size()) {
                    char next = raw[++i];
                    switch (next) {
                        case 'n': out.push_back('\n'); break;
                        case 't': out.push_back('\t'); break;
                        case '"': out.push_back('"'); break;
                        case '\\': out.push_back('\\'); break;
                        default: out.push_back(next); break;
                    }
                } else if (c == '"') {
                    fail(line_no, "unexpected '\"' inside string");
                } else {
                    out.push_back(c);
                }
            }
            v.text = std::move(out);
            return v;
        }
        if (raw.front() == '[') {
            if (raw.back() != ']') {
                fail(line_no, "unterminated array (arrays must be single-line)");
            }
            v.kind = Value::Kind::Array;
            std::string_view body = trim(raw.substr(1, raw.size() - 2));
            if (body.empty()) {
                return v;
            }
            // Split on commas outside quotes.
            size_t start = 0;
            bool in_string = false;
            for (size_t i = 0; i <= body.size(); ++i) {
                if (i == body.size() || (body[i] == ',' && !in_string)) {
                    v.items.push_back(self(line_no, body.substr(start, i - start), self));
                    start = i + 1;
                } else if (body[i] == '"' && (i == 0 || body[i - 1] != '\\')) {
                    in_string = !in_string;
                }
            }
            return v;
        }
        if (raw == "true" || raw == "false") {
            v.kind = Value::Kind::Boolean;
            v.boolean = raw == "true";
            return v;
        }
        const auto num = detail::parse_double(raw);
        if (!num) {
            fail(line_no, "cannot parse value '" + std::string(raw) + "'");
        }
        v.kind = Value::Kind::Number;
        v.number = *num;
        v.number_is_integral =
            raw.find('.') == std::string_view::npos && raw.find('e') == std::string_view::npos &&
            raw.find('E') == std::string_view::npos;
        return v;
    };

    detail::for_each_line(text, [&](size_t line_no, std::string_view line) {
        // Strip comments, respecting quoted strings.
        bool in_string = false;
        size_t cut = line.size();
        for (size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) {
                in_string = !in_string;
            } else if (line[i] == '#' && !in_string) {
                cut = i;
                break;
            }
        }
        const std::string_view stripped = trim(line.substr(0, cut));
        if (stripped.empty()) {
            return;
        }
        const size_t eq = stripped.find('=');
        if (eq == std::string_view::npos) {
            fail(line_no, "expected 'key = value'");
        }
        const std::string key(trim(stripped.substr(0, eq)));
        if (!valid_key(key)) {
            fail(line_no, "invalid key '" + key + "'");
        }
        if (config.values_.count(key)) {
            fail(line_no, "duplicate key '" + key + "'");
        }
        config.values_[key] = parse_value(line_no, stripped.substr(eq + 1), parse_value);
    });
    return config;
}

const KvConfig::Value* KvConfig::find(const std::string& key) const {
    const auto it = values_.find(key);
    return it == values_.end() ? nullptr : &it->second;
}

bool KvConfig::has(const std::string& key) const { return find(key) != nullptr; }

double KvConfig::get_double(const std::string& key, double fallback) const {
    const Value* v = find(key);
    if (!v) {
        return fallback;
    }
    if (v->kind != Value::Kind::Number) {
        throw ConfigError("key '" + key + "': expected a number");
    }
    return v->number;
}

int64_t KvConfig::get_int(const std::string& key, int64_t fallback) const {
    const Value* v = find(key);
    if (!v) {
        return fallback;
    }
    if (v->kind != Value::Kind::Number || v->number != std::floor(v->number)) {
        throw ConfigError("key '" + key + "': expected an integer");
    }
    return static_cast<int64_t>(v->number);
}

uint64_t KvConfig::get_uint(const std::string& key, uint64_t fallback) const {
    const int64_t value = get_int(key, 0);
    if (!has(key)) {
        return fallback;
    }
    if (value < 0) {
        throw ConfigError("key '" + key + "': expected a non-negative integer");
    }
    return static_cast<uint64_t>(value);
}

bool KvConfig::get_bool(const std::string& key, bool fallback) const {
    const Value* v = find(key);
    if (!v) {
        return fallback;
    }
    if (v->kind != Value::Kind::Boolean) {
        throw ConfigError("key '" + key + "': expected true/false");
    }
    return v->boolean;
}

std::string KvConfig::get_string(const std::string& key, const std::string& fallback) const {
    const Value* v = find(key);
    if (!v) {
        return fallback;
    }
    if (v->kind != Value::Kind::String) {
        throw ConfigError("key '" + key + "': expected a quoted string");
    }
    return v->text;
}

std::vector<double> KvConfig::get_double_array(const std::string& key,
                                               const std::vector<double>& fallback) const {
    const Value* v = find(key);
    if (!v) {
        return fallback;
    }
    if (v->kind != Value::Kind::Array) {
        throw ConfigError("key '" + key + "': expected an array");
    }
    std::vector<double> out;
    for (const auto& item : v->items) {
        if (item.kind != Value::Kind::Number) {
            throw ConfigError("key '" + key + "': expected numeric array elements");
        }
        out.push_back(item.number);
    }
    return out;
}

std::vector<int64_t> KvConfig::get_int_array(const std::string& key,
                                             const std::vector<int64_t>& fallback) const {
    const Value* v = find(key);
    if (!v) {
        return fallback;
    }
    if (v->kind != Value::Kind::Array) {
        throw ConfigError("key '" + key + "': expected an array");
    }
    std::vector<int64_t> out;
    for (const auto& item : v->items) {
        if (item.kind != Value::Kind::Number || item.number != std::floor(item.number)) {
            throw ConfigError("key '" + key + "': expected integer array elements");
        }
        out.push_back(static_cast<int64_t>(item.number));
    }
    return out;
}

std::vector<std::string> KvConfig::get_string_array(
    const std::string& key, const std::vector<std::string>& fallback) const {
    const Value* v = find(key);
    if (!v) {
        return fallback;
    }
    if (v->kind != Value::Kind::Array) {
        throw ConfigError("key '" + key + "': expected an array");
    }
    std::vector<std::string> out;
    for (const auto& item : v->items) {
        if (item.kind != Value::Kind::String) {
            throw ConfigError("key '" + key + "': expected string array elements");
        }
        out.push_back(item.text);
    }
    return out;
}

std::vector<std::string> KvConfig::keys() const {
    std::vector<std::string> out;
    out.reserve(values_.size());
    for (const auto& [key, value] : values_) {
        out.push_back(key);
    }
    return out;
}

}  // namespace ledgerprint
