#include "xts/time_series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "xts/common.hpp"

namespace xts {

namespace {

// Days since 1970-01-01 for a proleptic Gregorian date (Hinnant's algorithm).
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return static_cast<std::int64_t>(era) * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
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

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string trim(std::string s) {
    const auto issp = [](unsigned char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && issp(s.front())) s.erase(s.begin());
    while (!s.empty() && issp(s.back())) s.pop_back();
    return s;
}

}  // namespace

Date parse_date(const std::string& iso) {
    int y = 0, m = 0, d = 0;
    char extra = 0;
    if (std::sscanf(iso.c_str(), "%d-%d-%d%c", &y, &m, &d, &extra) != 3 ||
        m < 1 || m > 12 || d < 1 || d > 31) {
        throw DataError("invalid ISO-8601 date: '" + iso + "'");
    }
    return Date{days_from_civil(y, m, d)};
}

std::string format_date(Date date) {
    int y, m, d;
    civil_from_days(date.days, y, m, d);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
    return buf;
}

TimeSeries::TimeSeries(std::vector<Date> timestamps, Eigen::VectorXd values)
    : timestamps_(std::move(timestamps)), values_(std::move(values)) {
    if (static_cast<long>(timestamps_.size()) != values_.size())
        throw DataError("timestamp/value length mismatch");
    for (std::size_t i = 0; i < timestamps_.size(); ++i) {
        if (i > 0 && !(timestamps_[i - 1] < timestamps_[i]))
            throw DataError("duplicate timestamp or non-increasing dates at " +
                            format_date(timestamps_[i]));
        if (!std::isfinite(values_[static_cast<long>(i)]))
            throw DataError("non-finite value at " + format_date(timestamps_[i]));
    }
}

TimeSeries make_series(std::vector<std::pair<std::string, double>> rows) {
    std::vector<std::pair<Date, double>> parsed;
    parsed.reserve(rows.size());
    for (const auto& [ds, v] : rows) parsed.emplace_back(parse_date(ds), v);
    std::stable_sort(parsed.begin(), parsed.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<Date> ts;
    Eigen::VectorXd vals(static_cast<long>(parsed.size()));
    for (std::size_t i = 0; i < parsed.size(); ++i) {
        ts.push_back(parsed[i].first);
        vals[static_cast<long>(i)] = parsed[i].second;
    }
    return TimeSeries(std::move(ts), std::move(vals));
}

TimeSeries load_csv(const std::string& path, const std::string& value_column) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open file: " + path);

    std::string line;
    if (!std::getline(in, line)) throw DataError("empty file: " + path);
    const auto header = split_line(line);
    int date_col = -1, value_col = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        const std::string name = trim(header[i]);
        if (name == "date") date_col = static_cast<int>(i);
        if (name == value_column) value_col = static_cast<int>(i);
    }
    if (date_col < 0) throw DataError(path + ": header has no 'date' column");
    if (value_col < 0) throw DataError(path + ": header has no '" + value_column + "' column");

    std::vector<std::pair<std::string, double>> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto fields = split_line(line);
        if (static_cast<int>(fields.size()) <= std::max(date_col, value_col))
            throw DataError(path + ": row " + std::to_string(lineno) + ": too few fields");
        const std::string vstr = trim(fields[value_col]);
        char* end = nullptr;
        const double v = std::strtod(vstr.c_str(), &end);
        if (end == vstr.c_str() || *end != '\0')
            throw DataError(path + ": row " + std::to_string(lineno) +
                            ": cannot parse value '" + vstr + "'");
        try {
            parse_date(trim(fields[date_col]));
        } catch (const DataError& e) {
            throw DataError(path + ": row " + std::to_string(lineno) + ": " + e.what());
        }
        rows.emplace_back(trim(fields[date_col]), v);
    }
    try {
        return make_series(std::move(rows));
    } catch (const DataError& e) {
        throw DataError(path + ": " + e.what());
    }
}

TimeSeries log_returns(const TimeSeries& s) {
    if (s.size() < 2) throw DataError("log_returns needs at least two observations");
    const auto& v = s.values();
    Eigen::VectorXd r(v.size() - 1);
    for (long t = 1; t < v.size(); ++t) {
        if (v[t] <= 0.0 || v[t - 1] <= 0.0)
            throw DataError("non-positive price at " + format_date(s.timestamps()[t]));
        r[t - 1] = std::log(v[t]) - std::log(v[t - 1]);
    }
    std::vector<Date> ts(s.timestamps().begin() + 1, s.timestamps().end());
    return TimeSeries(std::move(ts), std::move(r));
}

void write_csv(const TimeSeries& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write file: " + path);
    out << "date,value\n";
    for (std::size_t i = 0; i < s.size(); ++i)
        out << format_date(s.timestamps()[i]) << ','
            << format_double(s.values()[static_cast<long>(i)]) << '\n';
}

}  // namespace xts
