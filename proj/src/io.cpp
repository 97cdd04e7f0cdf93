#include "tanglab/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "tanglab/errors.hpp"

namespace tanglab {

namespace {

std::string strip(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_tokens(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

} // namespace

bool KeyValueConfig::has_section(const std::string& name) const {
    return sections.find(name) != sections.end();
}

std::vector<std::vector<std::string>> KeyValueConfig::values(const std::string& section,
                                                             const std::string& key) const {
    std::vector<std::vector<std::string>> out;
    const auto it = sections.find(section);
    if (it == sections.end()) return out;
    for (const auto& [k, toks] : it->second) {
        if (k == key) out.push_back(toks);
    }
    return out;
}

std::string KeyValueConfig::scalar(const std::string& section, const std::string& key) const {
    const auto vals = values(section, key);
    if (vals.size() != 1 || vals.front().size() != 1) {
        throw validation_error("config: expected exactly one scalar for [" + section + "] " + key);
    }
    return vals.front().front();
}

double KeyValueConfig::number(const std::string& section, const std::string& key) const {
    return parse_double(scalar(section, key));
}

int KeyValueConfig::integer(const std::string& section, const std::string& key) const {
    return parse_int(scalar(section, key));
}

std::vector<double> KeyValueConfig::number_list(const std::string& section,
                                                const std::string& key) const {
    const auto vals = values(section, key);
    if (vals.size() != 1) {
        throw validation_error("config: expected one entry for [" + section + "] " + key);
    }
    std::vector<double> out;
    out.reserve(vals.front().size());
    for (const auto& tok : vals.front()) out.push_back(parse_double(tok));
    return out;
}

KeyValueConfig parse_key_value_text(const std::string& text) {
    KeyValueConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = strip(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw validation_error("config line " + std::to_string(lineno) +
                                       ": unterminated section header");
            }
            section = strip(line.substr(1, line.size() - 2));
            cfg.sections[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw validation_error("config line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = strip(line.substr(0, eq));
        if (key.empty()) {
            throw validation_error("config line " + std::to_string(lineno) + ": empty key");
        }
        cfg.sections[section].emplace_back(key, split_tokens(line.substr(eq + 1)));
    }
    return cfg;
}

KeyValueConfig parse_key_value_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw validation_error("cannot open config file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_key_value_text(buf.str());
}

double parse_double(const std::string& token) {
    double v = 0.0;
    const auto* begin = token.data();
    const auto* end = begin + token.size();
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end) {
        throw validation_error("not a number: '" + token + "'");
    }
    return v;
}

int parse_int(const std::string& token) {
    int v = 0;
    const auto* begin = token.data();
    const auto* end = begin + token.size();
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end) {
        throw validation_error("not an integer: '" + token + "'");
    }
    return v;
}

std::string format_double(double v) {
    char buf[64];
    // %.17g round-trips doubles; trim to shorter forms when exact.
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        double back = 0.0;
        std::sscanf(buf, "%lf", &back);
        if (back == v || (v != v && back != back)) break;
    }
    return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw validation_error("cannot open output file: " + path);
    }
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) out << ',';
        out << header[i];
    }
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << row[i];
        }
        out << '\n';
    }
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw validation_error("cannot open output file: " + path);
    }
    out << content;
}

} // namespace tanglab
