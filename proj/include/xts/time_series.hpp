#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace xts {

// Calendar date stored as days since 1970-01-01 (proleptic Gregorian).
struct Date {
    std::int64_t days = 0;

    auto operator<=>(const Date&) const = default;
};

Date parse_date(const std::string& iso);   // "YYYY-MM-DD"
std::string format_date(Date d);

// Dated scalar observations (prices or log-returns).
// Timestamps strictly increasing, values finite.
class TimeSeries {
public:
    TimeSeries() = default;
    TimeSeries(std::vector<Date> timestamps, Eigen::VectorXd values);

    std::size_t size() const { return timestamps_.size(); }
    const std::vector<Date>& timestamps() const { return timestamps_; }
    const Eigen::VectorXd& values() const { return values_; }

private:
    std::vector<Date> timestamps_;
    Eigen::VectorXd values_;
};

// Load a CSV with header row; `date` column ISO-8601, value column selectable
// by name (defaults to "value"). Rows are sorted by date before validation.
TimeSeries load_csv(const std::string& path, const std::string& value_column = "value");

// Parse already-split (date, value) string rows; shared by load_csv and tests.
TimeSeries make_series(std::vector<std::pair<std::string, double>> rows);

// r_t = ln(p_t) - ln(p_{t-1}); length shrinks by one.
TimeSeries log_returns(const TimeSeries& s);

// Write a series back out with the same `date,value` conventions.
void write_csv(const TimeSeries& s, const std::string& path);

}  // namespace xts
