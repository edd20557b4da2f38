#pragma once

// Minimal CSV field splitting for relation files; fields may be double-quoted
// with either "" or \" as the escaped quote.

#include <cctype>
#include <stdexcept>
#include <string>
#include <vector>

namespace uprov::csv {

struct Field {
    std::string text;
    bool quoted = false;
};

inline std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

inline std::vector<Field> split(const std::string& line) {
    std::vector<Field> out;
    std::size_t i = 0;
    for (;;) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        Field f;
        if (i < line.size() && line[i] == '"') {
            f.quoted = true;
            ++i;
            for (;;) {
                if (i >= line.size()) throw std::runtime_error("unterminated quoted field");
                char c = line[i];
                if (c == '\\' && i + 1 < line.size()) {
                    f.text += line[i + 1];
                    i += 2;
                } else if (c == '"') {
                    if (i + 1 < line.size() && line[i + 1] == '"') {
                        f.text += '"';
                        i += 2;
                    } else {
                        ++i;
                        break;
                    }
                } else {
                    f.text += c;
                    ++i;
                }
            }
            while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
            if (i < line.size() && line[i] != ',') throw std::runtime_error("text after closing quote");
        } else {
            auto comma = line.find(',', i);
            std::size_t end = comma == std::string::npos ? line.size() : comma;
            f.text = trim(line.substr(i, end - i));
            i = end;
        }
        out.push_back(std::move(f));
        if (i >= line.size()) break;
        ++i;  // the comma
    }
    return out;
}

inline bool looks_numeric(const std::string& s) {
    std::size_t i = 0;
    if (i < s.size() && (s[i] == '-' || s[i] == '+')) ++i;
    bool digits = false, dot = false;
    for (; i < s.size(); ++i) {
        if (std::isdigit(static_cast<unsigned char>(s[i])))
            digits = true;
        else if (s[i] == '.' && !dot)
            dot = true;
        else
            return false;
    }
    return digits;
}

}  // namespace uprov::csv
