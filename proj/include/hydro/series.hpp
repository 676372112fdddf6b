#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hydro {

using Date = std::chrono::sys_days;

// Daily step in years. Leap days are not special-cased.
inline constexpr double kDailyStep = 1.0 / 365.0;

// Parse an ISO-8601 calendar date (YYYY-MM-DD). Throws ParseError.
[[nodiscard]] Date parse_date(std::string_view text);
[[nodiscard]] std::string format_date(Date d);

enum class Region { Unspecified, Antioquia, Caribbean, Center, East, Valle };

[[nodiscard]] Region parse_region(std::string_view text);
[[nodiscard]] std::string_view region_name(Region r);

struct RiverRecord {
    Region region = Region::Unspecified;
    std::string reservoir;
    std::string river;
    Date date{};
    double discharge = 0.0;  // m^3/s, >= 0
};

// Uniformly sampled observations; value i belongs to calendar day start_date + i.
class TimeSeries {
public:
    TimeSeries(Date start_date, std::vector<double> values, double dt_years = kDailyStep,
               std::string label = {});

    [[nodiscard]] Date start_date() const noexcept { return start_; }
    [[nodiscard]] Date end_date() const noexcept;
    [[nodiscard]] Date date_at(std::size_t i) const noexcept;
    [[nodiscard]] double dt_years() const noexcept { return dt_; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] double operator[](std::size_t i) const noexcept { return values_[i]; }
    [[nodiscard]] const std::string& label() const noexcept { return label_; }

    // Same metadata, new values (must be non-empty).
    [[nodiscard]] TimeSeries with_values(std::vector<double> values) const;

private:
    Date start_;
    double dt_;
    std::vector<double> values_;
    std::string label_;
};

struct DescriptiveStats {
    double mean = 0.0;
    double std_dev = 0.0;  // n-1 denominator
    std::size_t n = 0;
};

// Column names of the raw discharge CSV. Empty region/reservoir means "not present".
struct CsvSchema {
    std::string date = "date";
    std::string region = "region";
    std::string reservoir = "reservoir";
    std::string river = "river";
    std::string discharge = "discharge";
};

struct GapPolicy {
    bool interpolate = false;
    int max_gap_days = 3;
};

[[nodiscard]] std::vector<RiverRecord> ingest_csv(const std::filesystem::path& path,
                                                  const CsvSchema& schema = {});
[[nodiscard]] std::vector<RiverRecord> parse_records(std::string_view csv_text,
                                                     const CsvSchema& schema = {});

// Sum of all rivers per calendar day over the full covered span.
[[nodiscard]] TimeSeries aggregate_system(const std::vector<RiverRecord>& records,
                                          const GapPolicy& gaps = {});

[[nodiscard]] TimeSeries log_transform(const TimeSeries& series);
[[nodiscard]] TimeSeries exp_transform(const TimeSeries& series);

// Inclusive on both ends.
[[nodiscard]] TimeSeries slice_period(const TimeSeries& series, Date start, Date end);

[[nodiscard]] TimeSeries difference(const TimeSeries& series);
[[nodiscard]] DescriptiveStats describe(const TimeSeries& series);
[[nodiscard]] DescriptiveStats describe(std::span<const double> values);

// Series CSV: header "date,value", one row per day.
void write_series_csv(const std::filesystem::path& path, const TimeSeries& series);
[[nodiscard]] TimeSeries read_series_csv(const std::filesystem::path& path);

}  // namespace hydro
