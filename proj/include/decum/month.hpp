#pragma once
#include <compare>
#include <string>

namespace decum {

// A calendar month.  All window arithmetic runs on a flat serial number
// (year * 12 + month - 1) so there is never any day-count ambiguity.
struct MonthIndex {
    int year = 0;
    int month = 1;  // 1..12

    static MonthIndex from_serial(long serial);

    long serial() const { return static_cast<long>(year) * 12 + (month - 1); }
    MonthIndex plus(long months) const { return from_serial(serial() + months); }

    friend auto operator<=>(const MonthIndex&, const MonthIndex&) = default;

    // "1871-01"
    std::string str() const;
};

// Accepts "YYYY-MM" and the legacy fractional form "YYYY.MM" where the
// fraction keeps its printed digits: .01 is January, .1 is October, .12 is
// December.  Throws ValidationError on anything else.
MonthIndex parse_month(const std::string& text);

}  // namespace decum
