#include "bms/common/text.hpp"

#include "bms/errors.hpp"

#include <charconv>

namespace bms::text {

std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

bool try_parse_double(std::string_view s, double& v) {
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

double parse_double(std::string_view s, std::size_t line) {
    double v = 0.0;
    if (!try_parse_double(s, v)) throw ParseError(line, "not a number: '" + std::string(s) + "'");
    return v;
}

std::vector<std::string> split_csv(std::string_view line) {
    std::vector<std::string> cells;
    auto trim = [](std::string_view c) {
        while (!c.empty() && (c.front() == ' ' || c.front() == '\t')) c.remove_prefix(1);
        while (!c.empty() && (c.back() == ' ' || c.back() == '\t' || c.back() == '\r')) c.remove_suffix(1);
        return std::string(c);
    };
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            cells.push_back(trim(line.substr(start)));
            return cells;
        }
        cells.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
}

}  // namespace bms::text
