#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "aba/errors.hpp"

namespace aba {

// Proleptic Gregorian calendar date.
struct Date {
    int year = 1970;
    unsigned month = 1;
    unsigned day = 1;

    friend bool operator==(const Date&, const Date&) = default;
    friend auto operator<=>(const Date&, const Date&) = default;

    // Days since 1970-01-01 (Howard Hinnant's days_from_civil).
    std::int64_t serial() const {
        const int y = year - (month <= 2 ? 1 : 0);
        const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
        const auto yoe = static_cast<unsigned>(y - era * 400);
        const unsigned mp = month > 2 ? month - 3 : month + 9;
        const unsigned doy = (153 * mp + 2) / 5 + day - 1;
        const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
        return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
    }

    static Date from_serial(std::int64_t z) {
        z += 719468;
        const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
        const auto doe = static_cast<unsigned>(z - era * 146097);
        const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
        const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
        const unsigned mp = (5 * doy + 2) / 153;
        const unsigned d = doy - (153 * mp + 2) / 5 + 1;
        const unsigned m = mp < 10 ? mp + 3 : mp - 9;
        const auto y = static_cast<int>(static_cast<std::int64_t>(yoe) + era * 400 + (m <= 2 ? 1 : 0));
        return Date{y, m, d};
    }

    Date plus_days(std::int64_t n) const { return from_serial(serial() + n); }

    static bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

    static unsigned days_in_month(int y, unsigned m) {
        static constexpr unsigned kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
        return m == 2 && is_leap(y) ? 29 : kDays[m - 1];
    }

    unsigned days_in_month() const { return days_in_month(year, month); }

    // Strict YYYY-MM-DD. Throws DataError.
    static Date parse(std::string_view text) {
        auto fail = [&] { return DataError("invalid ISO-8601 date '" + std::string(text) + "'"); };
        if (text.size() != 10 || text[4] != '-' || text[7] != '-') {
            throw fail();
        }
        auto number = [&](std::string_view part) {
            int v = 0;
            const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
            if (ec != std::errc{} || ptr != part.data() + part.size()) {
                throw fail();
            }
            return v;
        };
        const int y = number(text.substr(0, 4));
        const int m = number(text.substr(5, 2));
        const int d = number(text.substr(8, 2));
        if (m < 1 || m > 12 || d < 1 || d > static_cast<int>(days_in_month(y, static_cast<unsigned>(m)))) {
            throw fail();
        }
        return Date{y, static_cast<unsigned>(m), static_cast<unsigned>(d)};
    }

    std::string to_string() const {
        char buf[16];
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", year, month, day);
        return buf;
    }
};

// One day of one sub-campaign's observed spend and outcomes.
struct LoggedRecord {
    Date date;
    std::string group_id;
    std::string sub_campaign_id;
    std::string channel;
    double cost = 0.0;
    std::int64_t clicks = 0;
    std::int64_t conversions = 0;

    friend bool operator==(const LoggedRecord&, const LoggedRecord&) = default;
};

inline constexpr std::string_view kLoggedCsvHeader = "date,group_id,sub_campaign_id,channel,cost,clicks,conversions";

// Shortest decimal string that parses back to the same double.
inline std::string format_decimal(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

namespace detail {

inline std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

inline double parse_double(std::string_view s, std::string_view field, std::size_t row) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
        throw DataError("field '" + std::string(field) + "' is not a decimal number: '" + std::string(s) + "'", row);
    }
    return v;
}

inline std::int64_t parse_count(std::string_view s, std::string_view field, std::size_t row) {
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
        throw DataError("field '" + std::string(field) + "' is not an integer: '" + std::string(s) + "'", row);
    }
    return v;
}

inline std::string_view chomp(std::string_view line) {
    if (!line.empty() && line.back() == '\r') {
        line.remove_suffix(1);
    }
    return line;
}

} // namespace detail

inline std::vector<LoggedRecord> read_logged_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || detail::chomp(line) != kLoggedCsvHeader) {
        throw DataError("logged CSV header must be exactly '" + std::string(kLoggedCsvHeader) + "'", 1);
    }
    std::vector<LoggedRecord> records;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        const auto text = detail::chomp(line);
        if (text.empty()) {
            continue;
        }
        const auto f = detail::split(text, ',');
        if (f.size() != 7) {
            throw DataError("expected 7 fields, found " + std::to_string(f.size()), row);
        }
        LoggedRecord r;
        try {
            r.date = Date::parse(f[0]);
        } catch (const DataError& e) {
            throw DataError(e.what(), row);
        }
        r.group_id = f[1];
        r.sub_campaign_id = f[2];
        r.channel = f[3];
        r.cost = detail::parse_double(f[4], "cost", row);
        r.clicks = detail::parse_count(f[5], "clicks", row);
        r.conversions = detail::parse_count(f[6], "conversions", row);
        if (!(r.cost >= 0.0) || r.clicks < 0 || r.conversions < 0) {
            throw DataError("cost, clicks and conversions must be nonnegative", row);
        }
        records.push_back(std::move(r));
    }
    return records;
}

inline std::vector<LoggedRecord> read_logged_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open logged CSV '" + path + "'");
    }
    return read_logged_csv(in);
}

inline void write_logged_csv(std::ostream& out, const std::vector<LoggedRecord>& records) {
    out << kLoggedCsvHeader << '\n';
    for (const auto& r : records) {
        out << r.date.to_string() << ',' << r.group_id << ',' << r.sub_campaign_id << ',' << r.channel << ','
            << format_decimal(r.cost) << ',' << r.clicks << ',' << r.conversions << '\n';
    }
}

inline void write_logged_csv(const std::string& path, const std::vector<LoggedRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write logged CSV '" + path + "'");
    }
    write_logged_csv(out, records);
}

inline std::string to_csv_string(const std::vector<LoggedRecord>& records) {
    std::ostringstream out;
    write_logged_csv(out, records);
    return out.str();
}

} // namespace aba
