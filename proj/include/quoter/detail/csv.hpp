#ifndef QUOTER_DETAIL_CSV_HPP
#define QUOTER_DETAIL_CSV_HPP

#include <cstdio>
#include <string>

namespace quoter::detail {

// All numeric output is printed with 9 significant digits so golden-file
// comparisons are stable without being bit-fragile.
inline std::string format_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

// RFC-4180 quoting: wrap in quotes when the field contains a comma, a quote
// or a line break, doubling embedded quotes.
inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

}  // namespace quoter::detail

#endif  // QUOTER_DETAIL_CSV_HPP
