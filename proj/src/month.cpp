#include "decum/month.hpp"

#include <charconv>
#include <cstdio>

#include "decum/errors.hpp"

namespace decum {

MonthIndex MonthIndex::from_serial(long serial) {
    long y = serial / 12;
    long m = serial % 12;
    if (m < 0) {  // keep month positive for negative years
        m += 12;
        y -= 1;
    }
    return MonthIndex{static_cast<int>(y), static_cast<int>(m + 1)};
}

std::string MonthIndex::str() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
    return buf;
}

namespace {

bool parse_int(const std::string& s, std::size_t begin, std::size_t end, int& out) {
    if (begin >= end || end > s.size()) return false;
    auto res = std::from_chars(s.data() + begin, s.data() + end, out);
    return res.ec == std::errc{} && res.ptr == s.data() + end;
}

[[noreturn]] void bad(const std::string& text) {
    throw ValidationError("unparseable month '" + text + "' (want YYYY-MM or YYYY.MM)");
}

}  // namespace

MonthIndex parse_month(const std::string& text) {
    int year = 0, month = 0;
    if (auto dash = text.find('-'); dash != std::string::npos) {
        if (!parse_int(text, 0, dash, year) || !parse_int(text, dash + 1, text.size(), month))
            bad(text);
    } else if (auto dot = text.find('.'); dot != std::string::npos) {
        if (!parse_int(text, 0, dot, year)) bad(text);
        std::string frac = text.substr(dot + 1);
        // The fractional encoding is positional, not numeric: ".1" is
        // October (a dropped trailing zero) while ".01" is January.
        if (frac == "1") {
            month = 10;
        } else if (frac.size() == 1 || frac.size() == 2) {
            if (!parse_int(text, dot + 1, text.size(), month)) bad(text);
        } else {
            bad(text);
        }
    } else {
        bad(text);
    }
    if (month < 1 || month > 12)
        throw ValidationError("month out of range in '" + text + "'");
    return MonthIndex{year, month};
}

}  // namespace decum
