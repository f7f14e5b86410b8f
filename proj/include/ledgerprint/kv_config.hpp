#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace ledgerprint {

/// Flat key-value config reader (TOML-style subset).
///
/// Supported per line: `key = value` with value one of
///   - quoted string:            name = "out/results"
///   - boolean:                  log_scale = true
///   - number:                   max_delay_s = 0.5
///   - single-line array:        delays_s = [0, 0.5, 2, 30]
/// plus blank lines and `#` comments. No tables, no nesting.
class KvConfig {
public:
    static KvConfig parse(std::string_view text);

    bool has(const std::string& key) const;

    /// Typed getters with defaults; throw ConfigError on a type mismatch.
    double get_double(const std::string& key, double fallback) const;
    int64_t get_int(const std::string& key, int64_t fallback) const;
    uint64_t get_uint(const std::string& key, uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::vector<double> get_double_array(const std::string& key,
                                         const std::vector<double>& fallback) const;
    std::vector<int64_t> get_int_array(const std::string& key,
                                       const std::vector<int64_t>& fallback) const;
    std::vector<std::string> get_string_array(const std::string& key,
                                              const std::vector<std::string>& fallback) const;

    /// All keys, sorted.
    std::vector<std::string> keys() const;

private:
    struct Value {
        enum class Kind { Number, Boolean, String, Array } kind = Kind::Number;
        double number = 0.0;
        bool boolean = false;
        bool number_is_integral = false;
        std::string text;
        std::vector<Value> items;
    };

    const Value* find(const std::string& key) const;

    std::map<std::string, Value> values_;
};

}  // namespace ledgerprint
