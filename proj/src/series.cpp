#include "hydro/series.hpp"

#include "hydro/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <unordered_map>

namespace hydro {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

// Splits one CSV line. Double quotes group fields; "" inside quotes is a literal quote.
std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.emplace_back(trim(field));
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    out.emplace_back(trim(field));
    return out;
}

std::optional<double> parse_double(std::string_view text) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end || text.empty()) return std::nullopt;
    return value;
}

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        auto line = text.substr(pos, nl - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        pos = nl + 1;
    }
    return lines;
}

}  // namespace

Date parse_date(std::string_view text) {
    text = trim(text);
    int y = 0;
    unsigned m = 0, d = 0;
    char tail = 0;
    const std::string s(text);
    if (std::sscanf(s.c_str(), "%d-%u-%u%c", &y, &m, &d, &tail) != 3 || s.size() != 10) {
        throw ParseError("invalid date '" + s + "' (expected YYYY-MM-DD)");
    }
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m},
                                          std::chrono::day{d}};
    if (!ymd.ok()) throw ParseError("invalid calendar date '" + s + "'");
    return Date{ymd};
}

std::string format_date(Date d) {
    const std::chrono::year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

Region parse_region(std::string_view text) {
    const auto key = lower(trim(text));
    if (key == "antioquia") return Region::Antioquia;
    if (key == "caribbean" || key == "caribe") return Region::Caribbean;
    if (key == "center" || key == "centro") return Region::Center;
    if (key == "east" || key == "oriente") return Region::East;
    if (key == "valle") return Region::Valle;
    throw ParseError("unknown region '" + std::string(text) + "'");
}

std::string_view region_name(Region r) {
    switch (r) {
        case Region::Antioquia: return "Antioquia";
        case Region::Caribbean: return "Caribbean";
        case Region::Center: return "Center";
        case Region::East: return "East";
        case Region::Valle: return "Valle";
        case Region::Unspecified: break;
    }
    return "";
}

TimeSeries::TimeSeries(Date start_date, std::vector<double> values, double dt_years,
                       std::string label)
    : start_(start_date), dt_(dt_years), values_(std::move(values)), label_(std::move(label)) {
    if (values_.empty()) throw SizeError("time series must be non-empty");
    if (!(dt_ > 0.0) || !std::isfinite(dt_)) throw DomainError("time step must be positive");
}

Date TimeSeries::end_date() const noexcept { return date_at(values_.size() - 1); }

Date TimeSeries::date_at(std::size_t i) const noexcept {
    return start_ + std::chrono::days{static_cast<long>(i)};
}

TimeSeries TimeSeries::with_values(std::vector<double> values) const {
    return TimeSeries(start_, std::move(values), dt_, label_);
}

std::vector<RiverRecord> parse_records(std::string_view csv_text, const CsvSchema& schema) {
    std::vector<RiverRecord> records;
    const auto lines = split_lines(csv_text);
    std::size_t first = 0;
    while (first < lines.size() && trim(lines[first]).empty()) ++first;
    if (first == lines.size()) return records;

    const auto header = split_csv_line(lines[first]);
    auto column = [&](const std::string& name, bool required) -> std::optional<std::size_t> {
        if (name.empty()) {
            if (required) throw SchemaError("schema leaves a required column unnamed");
            return std::nullopt;
        }
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (lower(header[i]) == lower(name)) return i;
        }
        if (required) throw SchemaError("missing column '" + name + "'");
        return std::nullopt;
    };
    const std::size_t date_col = *column(schema.date, true);
    const std::size_t river_col = *column(schema.river, true);
    const std::size_t discharge_col = *column(schema.discharge, true);
    const auto region_col = column(schema.region, false);
    const auto reservoir_col = column(schema.reservoir, false);

    for (std::size_t li = first + 1; li < lines.size(); ++li) {
        if (trim(lines[li]).empty()) continue;
        const long row = static_cast<long>(li + 1);
        const auto fields = split_csv_line(lines[li]);
        if (fields.size() != header.size()) {
            throw ParseError("expected " + std::to_string(header.size()) + " fields, found " +
                                 std::to_string(fields.size()),
                             row);
        }
        RiverRecord rec;
        try {
            rec.date = parse_date(fields[date_col]);
            if (region_col) rec.region = parse_region(fields[*region_col]);
        } catch (const ParseError& e) {
            throw ParseError(e.what(), row);
        }
        rec.river = fields[river_col];
        if (rec.river.empty()) throw ParseError("empty river name", row);
        if (reservoir_col) rec.reservoir = fields[*reservoir_col];
        const auto q = parse_double(fields[discharge_col]);
        if (!q || !std::isfinite(*q)) {
            throw ParseError("invalid discharge '" + fields[discharge_col] + "'", row);
        }
        if (*q < 0.0) {
            throw DomainError("row " + std::to_string(row) + ": negative discharge " +
                              fields[discharge_col]);
        }
        rec.discharge = *q;
        records.push_back(std::move(rec));
    }

    std::stable_sort(records.begin(), records.end(), [](const auto& a, const auto& b) {
        return a.river != b.river ? a.river < b.river : a.date < b.date;
    });
    for (std::size_t i = 1; i < records.size(); ++i) {
        if (records[i].river == records[i - 1].river && records[i].date == records[i - 1].date) {
            throw DomainError("duplicate record for river '" + records[i].river + "' on " +
                              format_date(records[i].date));
        }
    }
    return records;
}

std::vector<RiverRecord> ingest_csv(const std::filesystem::path& path, const CsvSchema& schema) {
    return parse_records(read_file(path), schema);
}

TimeSeries aggregate_system(const std::vector<RiverRecord>& records, const GapPolicy& gaps) {
    if (records.empty()) throw SizeError("no records to aggregate");
    std::map<Date, double> totals;
    for (const auto& r : records) totals[r.date] += r.discharge;

    const Date first = totals.begin()->first;
    const Date last = totals.rbegin()->first;
    const auto span = static_cast<std::size_t>((last - first).count()) + 1;
    std::vector<double> values(span);
    std::vector<bool> present(span, false);
    for (const auto& [date, total] : totals) {
        const auto i = static_cast<std::size_t>((date - first).count());
        values[i] = total;
        present[i] = true;
    }

    for (std::size_t i = 0; i < span; ++i) {
        if (present[i]) continue;
        std::size_t j = i;
        while (!present[j]) ++j;  // last day is always present
        const auto gap = j - i;
        if (!gaps.interpolate || gap > static_cast<std::size_t>(gaps.max_gap_days)) {
            throw GapError("no discharge records on " +
                           format_date(first + std::chrono::days{static_cast<long>(i)}) +
                           " (gap of " + std::to_string(gap) + " day(s))");
        }
        const double lo = values[i - 1];
        const double hi = values[j];
        for (std::size_t t = i; t < j; ++t) {
            const double w = static_cast<double>(t - i + 1) / static_cast<double>(gap + 1);
            values[t] = lo + w * (hi - lo);
        }
        i = j;
    }
    return TimeSeries(first, std::move(values), kDailyStep, "system");
}

TimeSeries log_transform(const TimeSeries& series) {
    std::vector<double> out(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (!(series[i] > 0.0)) {
            throw DomainError("log of nonpositive value " + std::to_string(series[i]) +
                              " at index " + std::to_string(i));
        }
        out[i] = std::log(series[i]);
    }
    return series.with_values(std::move(out));
}

TimeSeries exp_transform(const TimeSeries& series) {
    std::vector<double> out(series.size());
    std::transform(series.values().begin(), series.values().end(), out.begin(),
                   [](double v) { return std::exp(v); });
    return series.with_values(std::move(out));
}

TimeSeries slice_period(const TimeSeries& series, Date start, Date end) {
    if (!(start < end)) {
        throw RangeError("slice start " + format_date(start) + " is not before end " +
                         format_date(end));
    }
    if (start < series.start_date() || end > series.end_date()) {
        throw RangeError("slice " + format_date(start) + ".." + format_date(end) +
                         " outside series span " + format_date(series.start_date()) + ".." +
                         format_date(series.end_date()));
    }
    const auto i0 = static_cast<std::size_t>((start - series.start_date()).count());
    const auto i1 = static_cast<std::size_t>((end - series.start_date()).count());
    std::vector<double> values(series.values().begin() + static_cast<std::ptrdiff_t>(i0),
                               series.values().begin() + static_cast<std::ptrdiff_t>(i1) + 1);
    return TimeSeries(start, std::move(values), series.dt_years(), series.label());
}

TimeSeries difference(const TimeSeries& series) {
    if (series.size() < 2) throw SizeError("difference needs at least 2 observations");
    std::vector<double> out(series.size() - 1);
    for (std::size_t i = 0; i + 1 < series.size(); ++i) out[i] = series[i + 1] - series[i];
    return TimeSeries(series.date_at(1), std::move(out), series.dt_years(), series.label());
}

DescriptiveStats describe(std::span<const double> values) {
    const auto n = values.size();
    if (n < 2) throw SizeError("descriptive statistics need at least 2 observations");
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / static_cast<double>(n - 1)), n};
}

DescriptiveStats describe(const TimeSeries& series) { return describe(series.values()); }

void write_series_csv(const std::filesystem::path& path, const TimeSeries& series) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << "date,value\n";
    char buf[64];
    for (std::size_t i = 0; i < series.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", series[i]);
        out << format_date(series.date_at(i)) << ',' << buf << '\n';
    }
    if (!out) throw IoError("failed writing " + path.string());
}

TimeSeries read_series_csv(const std::filesystem::path& path) {
    const auto text = read_file(path);
    const auto lines = split_lines(text);
    std::vector<double> values;
    std::optional<Date> start;
    std::size_t date_col = 0, value_col = 1;
    bool have_header = false;
    for (std::size_t li = 0; li < lines.size(); ++li) {
        if (trim(lines[li]).empty()) continue;
        const auto fields = split_csv_line(lines[li]);
        const long row = static_cast<long>(li + 1);
        if (!have_header) {
            have_header = true;
            auto find = [&](std::string_view name) -> std::size_t {
                for (std::size_t i = 0; i < fields.size(); ++i)
                    if (lower(fields[i]) == name) return i;
                throw SchemaError("series file " + path.string() + " lacks column '" +
                                  std::string(name) + "'");
            };
            date_col = find("date");
            value_col = find("value");
            continue;
        }
        if (fields.size() <= std::max(date_col, value_col)) throw ParseError("short row", row);
        Date d{};
        try {
            d = parse_date(fields[date_col]);
        } catch (const ParseError& e) {
            throw ParseError(e.what(), row);
        }
        const auto v = parse_double(fields[value_col]);
        if (!v) throw ParseError("invalid value '" + fields[value_col] + "'", row);
        if (!start) {
            start = d;
        } else if (d != *start + std::chrono::days{static_cast<long>(values.size())}) {
            throw GapError("series file is not a contiguous daily grid at " + format_date(d));
        }
        values.push_back(*v);
    }
    if (!start) throw SizeError("series file " + path.string() + " has no observations");
    return TimeSeries(*start, std::move(values), kDailyStep, path.stem().string());
}

}  // namespace hydro
