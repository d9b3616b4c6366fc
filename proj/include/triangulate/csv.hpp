#ifndef TRIANGULATE_CSV_HPP
#define TRIANGULATE_CSV_HPP

#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "triangulate/errors.hpp"

namespace triangulate::csv {

// Minimal RFC-4180-ish reader: comma separated, double quotes for
// fields containing commas or quotes, no embedded newlines.
inline std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

inline std::vector<std::vector<std::string>> read(std::istream& in) {
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        rows.push_back(split_line(line));
    }
    return rows;
}

inline std::vector<std::vector<std::string>> read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open file: " + path);
    return read(in);
}

inline double to_double(const std::string& s, const std::string& context) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size())
            throw InputError("trailing characters");
        return v;
    } catch (const InputError&) {
        throw InputError("cannot parse number '" + s + "' in " + context);
    } catch (const std::exception&) {
        throw InputError("cannot parse number '" + s + "' in " + context);
    }
}

}  // namespace triangulate::csv

#endif
