// Copyright 2026 fcd contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fcd/error.hpp"

namespace fcd {

/// Proleptic Gregorian calendar date. Time-of-day is never tracked; the
/// detection lag metric is reported in whole days.
struct Date {
    int year = 1970;
    int month = 1; // 1..12
    int day = 1;   // 1..31

    friend bool operator==(const Date&, const Date&) = default;
};

/// Days since 1970-01-01 (negative before). Howard Hinnant's algorithm.
inline int64_t days_from_civil(const Date& d) {
    int y = d.year;
    const int m = d.month;
    y -= m <= 2;
    const int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d.day - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<int64_t>(doe) - 719468;
}

inline Date civil_from_days(int64_t z) {
    z += 719468;
    const int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int64_t y = static_cast<int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return Date{static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
}

inline bool is_valid_date(const Date& d) {
    if (d.month < 1 || d.month > 12 || d.day < 1) return false;
    static const int mdays[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    int dim = mdays[d.month - 1];
    const bool leap = (d.year % 4 == 0 && d.year % 100 != 0) || d.year % 400 == 0;
    if (d.month == 2 && leap) dim = 29;
    return d.day <= dim;
}

/// Parses strict "YYYY-MM-DD". Throws validation_error on any deviation.
inline Date parse_date(const std::string& s) {
    auto fail = [&] { throw validation_error("date", "expected YYYY-MM-DD, got '" + s + "'"); };
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') fail();
    for (int i : {0, 1, 2, 3, 5, 6, 8, 9})
        if (s[i] < '0' || s[i] > '9') fail();
    Date d;
    d.year = std::stoi(s.substr(0, 4));
    d.month = std::stoi(s.substr(5, 2));
    d.day = std::stoi(s.substr(8, 2));
    if (!is_valid_date(d)) fail();
    return d;
}

inline std::string format_date(const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", d.year, d.month, d.day);
    return buf;
}

/// a - b in days.
inline int64_t days_between(const Date& a, const Date& b) {
    return days_from_civil(a) - days_from_civil(b);
}

inline Date add_days(const Date& d, int64_t n) { return civil_from_days(days_from_civil(d) + n); }

inline std::vector<Date> parse_dates(const std::vector<std::string>& raw) {
    std::vector<Date> out;
    out.reserve(raw.size());
    for (const auto& s : raw) out.push_back(parse_date(s));
    return out;
}

} // namespace fcd
