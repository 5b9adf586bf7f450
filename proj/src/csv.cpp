#include "csv.hpp"

#include <fstream>
#include <sstream>

#include "provbench/errors.hpp"

namespace provbench::detail {

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::StoreReadFailure, "cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        switch (c) {
        case '"': quoted = true; any = true; break;
        case ',':
            row.push_back(field);
            field.clear();
            any = true;
            break;
        case '\r': break;
        case '\n':
            if (any || !field.empty() || !row.empty()) {
                row.push_back(field);
                rows.push_back(row);
            }
            row.clear();
            field.clear();
            any = false;
            break;
        default: field += c; any = true; break;
        }
    }
    if (quoted) throw Error(ErrorKind::SchemaError, "unterminated quoted csv field");
    if (any || !field.empty() || !row.empty()) {
        row.push_back(field);
        rows.push_back(row);
    }
    return rows;
}

} // namespace provbench::detail
