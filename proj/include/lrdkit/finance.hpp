#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "lrdkit/date.hpp"
#include "lrdkit/error.hpp"
#include "lrdkit/series.hpp"

namespace lrdkit {

/// One trading day.
struct OhlcvBar {
    Date date;
    double open = 0.0;
    double high = 0.0;
    double low = 0.0;
    double close = 0.0;
    double volume = 0.0;

    /// Throws InvalidBar unless prices are positive and finite,
    /// low <= min(open, close), high >= max(open, close) and volume >= 0.
    void validate() const {
        for (double p : {open, high, low, close}) {
            if (!std::isfinite(p) || !(p > 0.0)) {
                throw InvalidBar(format_iso_date(date) + ": prices must be positive and finite");
            }
        }
        if (!(low <= high)) throw InvalidBar(format_iso_date(date) + ": low > high");
        if (low > std::min(open, close)) {
            throw InvalidBar(format_iso_date(date) + ": low above open/close");
        }
        if (high < std::max(open, close)) {
            throw InvalidBar(format_iso_date(date) + ": high below open/close");
        }
        if (!std::isfinite(volume) || volume < 0.0) {
            throw InvalidBar(format_iso_date(date) + ": volume must be nonnegative");
        }
    }
};

/// Garman-Klass daily variance (ln(H/L))^2 / 2 - (2 ln 2 - 1)(ln(C/O))^2.
/// Zero for a flat bar.
inline double garman_klass(const OhlcvBar& bar) {
    bar.validate();
    const double hl = std::log(bar.high / bar.low);
    const double co = std::log(bar.close / bar.open);
    return 0.5 * hl * hl - (2.0 * std::numbers::ln2 - 1.0) * co * co;
}

inline TimeSeries garman_klass_series(std::span<const OhlcvBar> bars, std::string label = "gk_variance") {
    std::vector<double> v;
    std::vector<Date> d;
    v.reserve(bars.size());
    d.reserve(bars.size());
    for (const auto& b : bars) {
        v.push_back(garman_klass(b));
        d.push_back(b.date);
    }
    return TimeSeries(std::move(v), std::move(label), std::move(d));
}

inline TimeSeries volume_series(std::span<const OhlcvBar> bars, std::string label = "volume") {
    std::vector<double> v;
    std::vector<Date> d;
    for (const auto& b : bars) {
        v.push_back(b.volume);
        d.push_back(b.date);
    }
    return TimeSeries(std::move(v), std::move(label), std::move(d));
}

struct LogTransformed {
    TimeSeries series;
    /// True where the input was below the floor and ln(floor) was used.
    std::vector<bool> clamped;
    double floor = 0.0;

    [[nodiscard]] std::size_t clamped_count() const {
        return static_cast<std::size_t>(std::count(clamped.begin(), clamped.end(), true));
    }
};

/// Natural log of max(value, floor). Without an explicit floor, the
/// smallest positive value times 1e-3 is used.
inline LogTransformed log_transform(const TimeSeries& series, std::optional<double> floor = std::nullopt) {
    series.validate();
    double smallest_positive = std::numeric_limits<double>::infinity();
    for (double v : series.values) {
        if (v > 0.0) smallest_positive = std::min(smallest_positive, v);
    }
    if (!std::isfinite(smallest_positive)) {
        throw InvalidInput("log_transform: series '" + series.label + "' has no positive value");
    }
    LogTransformed out;
    out.floor = floor.value_or(smallest_positive * 1e-3);
    if (!(out.floor > 0.0) || !std::isfinite(out.floor)) {
        throw InvalidInput("log_transform: floor must be positive");
    }
    out.series.label = "log_" + series.label;
    out.series.dates = series.dates;
    out.series.values.reserve(series.size());
    out.clamped.reserve(series.size());
    for (double v : series.values) {
        const bool clamp = v < out.floor;
        out.clamped.push_back(clamp);
        out.series.values.push_back(std::log(clamp ? out.floor : v));
    }
    return out;
}

/// A contiguous run of daily search-interest values on the 0-100 scale.
struct TrendsSegment {
    Date start_date;
    std::vector<double> values;

    TrendsSegment(Date start, std::vector<double> v) : start_date(start), values(std::move(v)) {
        if (values.empty()) throw InvalidInput("TrendsSegment: empty segment");
        for (double x : values) {
            if (!std::isfinite(x) || x < 0.0 || x > 100.0) {
                throw InvalidInput("TrendsSegment starting " + format_iso_date(start) +
                                   ": value outside [0, 100]");
            }
        }
    }

    /// Requires consecutive calendar days.
    static TrendsSegment from_series(const TimeSeries& s) {
        if (!s.dates || s.dates->empty()) throw InvalidInput("TrendsSegment: series has no dates");
        const auto& d = *s.dates;
        for (std::size_t i = 1; i < d.size(); ++i) {
            if (days_between(d[i - 1], d[i]) != 1) {
                throw InvalidInput("TrendsSegment '" + s.label + "': dates not contiguous at " +
                                   format_iso_date(d[i]));
            }
        }
        return TrendsSegment(d.front(), s.values);
    }

    [[nodiscard]] Date end_date() const {
        return add_days(start_date, static_cast<long>(values.size()) - 1);
    }
};

/// Chains overlapping segments into one daily series. Each later segment
/// is multiplied by mean(chained, overlap) / mean(segment, overlap) where
/// the overlap is every date the two share; overlap values come from the
/// already chained (earlier) data.
inline TimeSeries chain_segments(std::span<const TrendsSegment> segments, std::size_t overlap_days) {
    if (segments.empty()) throw InvalidInput("chain_segments: no segments");
    if (overlap_days == 0) throw InvalidInput("chain_segments: overlap_days must be positive");
    const Date origin = segments.front().start_date;
    std::vector<double> values = segments.front().values;

    for (std::size_t k = 1; k < segments.size(); ++k) {
        const auto& seg = segments[k];
        const long chained_end = static_cast<long>(values.size()) - 1;  // offset from origin
        const long seg_start = days_between(origin, seg.start_date);
        const long seg_end = seg_start + static_cast<long>(seg.values.size()) - 1;
        if (seg_start > chained_end + 1) {
            throw InvalidInput("chain_segments: gap before segment starting " +
                               format_iso_date(seg.start_date));
        }
        if (seg_start < 0 || seg_end <= chained_end) {
            throw InvalidInput("chain_segments: segment starting " + format_iso_date(seg.start_date) +
                               " does not extend the chained series");
        }
        const long overlap = chained_end - seg_start + 1;
        if (overlap < static_cast<long>(overlap_days)) {
            throw InvalidInput("chain_segments: segment starting " + format_iso_date(seg.start_date) +
                               " overlaps by " + std::to_string(std::max(0L, overlap)) + " < " +
                               std::to_string(overlap_days) + " days");
        }
        double prev_sum = 0.0, next_sum = 0.0;
        for (long t = 0; t < overlap; ++t) {
            prev_sum += values[static_cast<std::size_t>(seg_start + t)];
            next_sum += seg.values[static_cast<std::size_t>(t)];
        }
        if (!(next_sum > 0.0) || !(prev_sum > 0.0)) {
            throw DegenerateOverlap("chain_segments: zero mean on overlap before " +
                                    format_iso_date(seg.start_date));
        }
        const double ratio = prev_sum / next_sum;
        for (std::size_t t = static_cast<std::size_t>(overlap); t < seg.values.size(); ++t) {
            values.push_back(seg.values[t] * ratio);
        }
    }
    std::vector<Date> dates;
    dates.reserve(values.size());
    for (std::size_t t = 0; t < values.size(); ++t) dates.push_back(add_days(origin, static_cast<long>(t)));
    return TimeSeries(std::move(values), "chained", std::move(dates));
}

/// Inner join of two dated series on common dates. Undated series must
/// have equal lengths and are returned unchanged.
inline std::pair<TimeSeries, TimeSeries> align_by_date(const TimeSeries& a, const TimeSeries& b) {
    if (!a.dates || !b.dates) {
        if (a.size() != b.size()) {
            throw InvalidInput("align_by_date: undated series of different lengths");
        }
        return {a, b};
    }
    TimeSeries ja(std::vector<double>{}, a.label, std::vector<Date>{});
    TimeSeries jb(std::vector<double>{}, b.label, std::vector<Date>{});
    std::size_t i = 0, j = 0;
    const auto& da = *a.dates;
    const auto& db = *b.dates;
    while (i < da.size() && j < db.size()) {
        if (da[i] < db[j]) {
            ++i;
        } else if (db[j] < da[i]) {
            ++j;
        } else {
            ja.values.push_back(a.values[i]);
            ja.dates->push_back(da[i]);
            jb.values.push_back(b.values[j]);
            jb.dates->push_back(db[j]);
            ++i;
            ++j;
        }
    }
    return {std::move(ja), std::move(jb)};
}

// ---------------------------------------------------------------------------
// CSV ingestion and output
// ---------------------------------------------------------------------------

enum class CsvSchema { Trends, Ohlcv };

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

// `line` counts from 1 at the header.
inline std::string row_prefix(const std::string& source, std::size_t line) {
    return source + ": line " + std::to_string(line) + ": ";
}

inline double parse_number(std::string_view field, const std::string& where, const char* column) {
    double v = 0.0;
    const auto* first = field.data();
    const auto* last = first + field.size();
    if (!field.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (field.empty() || ec != std::errc{} || ptr != last || !std::isfinite(v)) {
        throw InvalidInput(where + "non-numeric " + column + " '" + std::string(field) + "'");
    }
    return v;
}

// Calls on_row(fields, row_number) for each non-blank data line after
// checking the header against `expected`.
template <class OnRow>
void read_csv_rows(std::istream& in, const std::string& source, std::span<const std::string_view> expected,
                   OnRow&& on_row) {
    std::string line;
    std::size_t row = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        if (!have_header) {
            std::string_view first = fields.front();
            if (first.size() >= 3 && first.substr(0, 3) == "\xEF\xBB\xBF") first.remove_prefix(3);
            bool ok = fields.size() == expected.size() && first == expected[0];
            for (std::size_t i = 1; ok && i < expected.size(); ++i) ok = fields[i] == expected[i];
            if (!ok) {
                std::string want;
                for (auto e : expected) want += (want.empty() ? "" : ",") + std::string(e);
                throw InvalidInput(row_prefix(source, row) + "malformed header, expected '" + want + "'");
            }
            have_header = true;
            continue;
        }
        if (fields.size() != expected.size()) {
            throw InvalidInput(row_prefix(source, row) + "expected " + std::to_string(expected.size()) +
                               " fields, got " + std::to_string(fields.size()));
        }
        on_row(fields, row);
    }
    if (!have_header) throw InvalidInput(source + ": empty file");
}

inline Date parse_row_date(std::string_view field, const std::string& where,
                           const std::optional<Date>& previous) {
    const auto d = parse_iso_date(field);
    if (!d) throw InvalidInput(where + "invalid ISO-8601 date '" + std::string(field) + "'");
    if (previous && !(*previous < *d)) {
        throw InvalidInput(where + "date " + std::string(field) + " not after previous row");
    }
    return *d;
}

inline std::string stem_of(const std::string& path) {
    auto name = path.substr(path.find_last_of("/\\") + 1);
    const auto dot = name.find_last_of('.');
    return dot == std::string::npos || dot == 0 ? name : name.substr(0, dot);
}

}  // namespace detail

/// Reads a `date,value` CSV. Rows must have strictly increasing ISO dates.
inline TimeSeries read_trends_csv(std::istream& in, const std::string& source = "<stream>") {
    static constexpr std::string_view header[] = {"date", "value"};
    TimeSeries ts(std::vector<double>{}, detail::stem_of(source), std::vector<Date>{});
    std::optional<Date> prev;
    detail::read_csv_rows(in, source, header, [&](const auto& f, std::size_t row) {
        const auto where = detail::row_prefix(source, row);
        const Date d = detail::parse_row_date(f[0], where, prev);
        ts.values.push_back(detail::parse_number(f[1], where, "value"));
        ts.dates->push_back(d);
        prev = d;
    });
    if (ts.values.empty()) throw InvalidInput(source + ": no data rows");
    return ts;
}

/// Reads a `date,open,high,low,close,volume` CSV; a bar violating the
/// OHLC ordering raises InvalidBar naming the line.
inline std::vector<OhlcvBar> read_ohlcv_csv(std::istream& in, const std::string& source = "<stream>") {
    static constexpr std::string_view header[] = {"date", "open", "high", "low", "close", "volume"};
    std::vector<OhlcvBar> bars;
    std::optional<Date> prev;
    detail::read_csv_rows(in, source, header, [&](const auto& f, std::size_t row) {
        const auto where = detail::row_prefix(source, row);
        OhlcvBar b;
        b.date = detail::parse_row_date(f[0], where, prev);
        b.open = detail::parse_number(f[1], where, "open");
        b.high = detail::parse_number(f[2], where, "high");
        b.low = detail::parse_number(f[3], where, "low");
        b.close = detail::parse_number(f[4], where, "close");
        b.volume = detail::parse_number(f[5], where, "volume");
        try {
            b.validate();
        } catch (const InvalidBar& e) {
            std::string_view msg = e.what();
            msg.remove_prefix(std::min(msg.size(), std::string_view("InvalidBar: ").size()));
            throw InvalidBar(where + std::string(msg));
        }
        bars.push_back(b);
        prev = b.date;
    });
    if (bars.empty()) throw InvalidInput(source + ": no data rows");
    return bars;
}

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open '" + path + "'");
    return in;
}

inline std::variant<TimeSeries, std::vector<OhlcvBar>> read_series_csv(const std::string& path,
                                                                       CsvSchema schema) {
    auto in = open_input(path);
    if (schema == CsvSchema::Trends) return read_trends_csv(in, path);
    return read_ohlcv_csv(in, path);
}

/// Shortest text that reads back to exactly `v`.
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

/// Writes `date,value` rows at full precision; the series must be dated.
inline void write_series_csv(std::ostream& out, const TimeSeries& ts) {
    if (!ts.dates || ts.dates->size() != ts.size()) {
        throw InvalidInput("write_series_csv: series '" + ts.label + "' needs one date per value");
    }
    out << "date,value\n";
    for (std::size_t i = 0; i < ts.size(); ++i) {
        out << format_iso_date((*ts.dates)[i]) << ',' << format_double(ts.values[i]) << '\n';
    }
}

}  // namespace lrdkit
