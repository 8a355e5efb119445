// dates.hpp
// ISO-8601 date labels. Dates are opaque ordered strings everywhere in the
// toolkit; this header only validates the format and provides serial<->civil
// conversion for building synthetic calendars.

#pragma once

#include <cstdint>
#include <string>

#include "cointkit/errors.hpp"

namespace cointkit {

/// True if `s` looks like YYYY-MM-DD with a plausible month/day.
inline bool is_iso_date(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    for (int i : {0, 1, 2, 3, 5, 6, 8, 9}) {
        if (s[i] < '0' || s[i] > '9') return false;
    }
    const int month = (s[5] - '0') * 10 + (s[6] - '0');
    const int day = (s[8] - '0') * 10 + (s[9] - '0');
    return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

inline void require_iso_date(const std::string& s, const std::string& what) {
    if (!is_iso_date(s)) throw io_error(what + ": not an ISO-8601 date: '" + s + "'");
}

/// Days since 1970-01-01 for a proleptic Gregorian civil date.
/// Howard Hinnant's days_from_civil algorithm.
inline std::int64_t civil_to_serial(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2u) / 5u + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline void serial_to_civil(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yy + (m <= 2));
}

inline std::string serial_to_iso(std::int64_t serial) {
    int y, m, d;
    serial_to_civil(serial, y, m, d);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
    return buf;
}

inline std::int64_t iso_to_serial(const std::string& s) {
    require_iso_date(s, "date");
    const int y = std::stoi(s.substr(0, 4));
    const int m = std::stoi(s.substr(5, 2));
    const int d = std::stoi(s.substr(8, 2));
    return civil_to_serial(y, m, d);
}

} // namespace cointkit
