#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace sc2dec {

inline bool starts_with(std::string_view s, std::string_view prefix) {
    return s.size() >= prefix.size() && s.substr(0, prefix.size()) == prefix;
}

inline bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

inline std::string_view trim_view(std::string_view s) {
    size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::string trim(std::string_view s) { return std::string(trim_view(s)); }

inline std::string rtrim(std::string_view s) {
    size_t e = s.find_last_not_of(" \t\r\n");
    if (e == std::string_view::npos) return {};
    return std::string(s.substr(0, e + 1));
}

// Splits on '\n'; a trailing newline does not produce a final empty element.
inline std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) {
            if (pos < text.size()) lines.emplace_back(text.substr(pos));
            break;
        }
        std::string_view line = text.substr(pos, nl - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.emplace_back(line);
        pos = nl + 1;
    }
    return lines;
}

inline std::string join_lines(const std::vector<std::string>& lines) {
    std::string out;
    for (size_t i = 0; i < lines.size(); ++i) {
        if (i) out += '\n';
        out += lines[i];
    }
    return out;
}

inline std::vector<std::string> split_on(std::string_view text, char sep) {
    std::vector<std::string> parts;
    size_t pos = 0;
    while (true) {
        size_t at = text.find(sep, pos);
        if (at == std::string_view::npos) {
            parts.emplace_back(text.substr(pos));
            break;
        }
        parts.emplace_back(text.substr(pos, at - pos));
        pos = at + 1;
    }
    return parts;
}

// Collapses runs of spaces/tabs to a single space and trims the ends.
inline std::string collapse_spaces(std::string_view s) {
    std::string out;
    bool in_ws = false;
    for (char c : trim_view(s)) {
        if (c == ' ' || c == '\t') {
            in_ws = true;
            continue;
        }
        if (in_ws && !out.empty()) out += ' ';
        in_ws = false;
        out += c;
    }
    return out;
}

}  // namespace sc2dec
