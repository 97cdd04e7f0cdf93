#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace tanglab {

/// Parsed key-value config with [section] headers. Duplicate keys are kept
/// in file order (polynomial term lists rely on this).
struct KeyValueConfig {
    // section -> ordered (key, whitespace-split tokens)
    std::map<std::string, std::vector<std::pair<std::string, std::vector<std::string>>>> sections;

    [[nodiscard]] bool has_section(const std::string& name) const;

    /// All values for `key` in `section`, one entry per occurrence.
    [[nodiscard]] std::vector<std::vector<std::string>> values(const std::string& section,
                                                               const std::string& key) const;

    /// Single required scalar; throws validation_error if missing or repeated.
    [[nodiscard]] std::string scalar(const std::string& section, const std::string& key) const;

    [[nodiscard]] double number(const std::string& section, const std::string& key) const;
    [[nodiscard]] int integer(const std::string& section, const std::string& key) const;
    [[nodiscard]] std::vector<double> number_list(const std::string& section,
                                                  const std::string& key) const;
};

[[nodiscard]] KeyValueConfig parse_key_value_text(const std::string& text);
[[nodiscard]] KeyValueConfig parse_key_value_file(const std::string& path);

[[nodiscard]] double parse_double(const std::string& token);
[[nodiscard]] int parse_int(const std::string& token);

/// Shortest round-trippable decimal form; '.' decimal point regardless of locale.
[[nodiscard]] std::string format_double(double v);

/// Writes rows as CSV with a header line, '.' decimals, LF endings.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

void write_text_file(const std::string& path, const std::string& content);

} // namespace tanglab
