// Copyright 2026 The hegram Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Hourly meter CSV ingestion and the preprocessing flow
// normalize -> x100 -> round, plus clamping and reference-day averaging.

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hegram/errors.hpp"
#include "hegram/histogram.hpp"

namespace hegram {

inline constexpr int kHoursPerDay = 24;
inline constexpr int kScaledMax = 100;

struct MeasurementSeries {
    std::vector<std::chrono::sys_seconds> timestamps;
    std::vector<double> values;  // kW

    std::size_t size() const noexcept { return values.size(); }
};

/// Integer series in scaled units. scale() guarantees [0, 100]; injected
/// fixtures may carry values above that until they are clamped.
struct ScaledSeries {
    std::vector<int> values;
    double scale_min = 0.0;
    double scale_max = 0.0;

    std::size_t size() const noexcept { return values.size(); }
};

struct ReferenceDay {
    std::array<int, kHoursPerDay> values{};
};

namespace detail {

inline std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_fields(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos)
            return out;
        start = comma + 1;
    }
}

// YYYY-MM-DD[T ]HH:MM[:SS][Z]
inline std::optional<std::chrono::sys_seconds> parse_timestamp(std::string_view s)
{
    using namespace std::chrono;
    if (!s.empty() && s.back() == 'Z')
        s.remove_suffix(1);
    const std::string buf(s);
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0, used = 0;
    char sep = 0;
    if (std::sscanf(buf.c_str(), "%4d-%2d-%2d%c%2d:%2d%n", &y, &mo, &d, &sep, &h, &mi,
                    &used) != 6)
        return std::nullopt;
    if (sep != 'T' && sep != ' ')
        return std::nullopt;
    if (static_cast<std::size_t>(used) != buf.size()) {
        int more = 0;
        if (std::sscanf(buf.c_str() + used, ":%2d%n", &sec, &more) != 1 ||
            static_cast<std::size_t>(used + more) != buf.size())
            return std::nullopt;
    }
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                             day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || sec > 59)
        return std::nullopt;
    return sys_days{ymd} + hours{h} + minutes{mi} + seconds{sec};
}

template <class T>
std::optional<T> parse_number(std::string_view s)
{
    T v{};
    const auto* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || p != end)
        return std::nullopt;
    return v;
}

}  // namespace detail

/// Reads `timestamp,value_kw` rows. A first line whose timestamp does not
/// parse is taken as a header. Timestamps must advance by exactly one hour.
inline MeasurementSeries parse_csv(std::istream& in)
{
    using namespace std::chrono;
    MeasurementSeries s;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto body = detail::trim(line);
        if (body.empty())
            continue;
        const auto fields = detail::split_fields(body);
        auto ts = detail::parse_timestamp(fields[0]);
        if (!ts && lineno == 1)
            continue;
        if (fields.size() != 2)
            throw ParseError(lineno, "expected 2 columns, got " +
                                         std::to_string(fields.size()));
        if (!ts)
            throw ParseError(lineno, "bad timestamp '" + std::string(fields[0]) + "'");
        const auto v = detail::parse_number<double>(fields[1]);
        if (!v)
            throw ParseError(lineno, "bad value '" + std::string(fields[1]) + "'");
        if (!std::isfinite(*v) || *v < 0)
            throw ParseError(lineno, "value must be finite and nonnegative");
        if (!s.timestamps.empty()) {
            const auto prev = s.timestamps.back();
            if (*ts == prev)
                throw ContinuityError(lineno, "duplicate timestamp");
            if (*ts < prev)
                throw ContinuityError(lineno, "timestamps not increasing");
            if (*ts - prev != hours{1})
                throw ContinuityError(lineno, "gap in hourly series");
        }
        s.timestamps.push_back(*ts);
        s.values.push_back(*v);
    }
    return s;
}

inline MeasurementSeries load_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open " + path.string());
    return parse_csv(in);
}

inline std::pair<double, double> value_range(const MeasurementSeries& s)
{
    if (s.values.empty())
        throw DimensionError("empty series has no range");
    const auto [lo, hi] = std::minmax_element(s.values.begin(), s.values.end());
    return {*lo, *hi};
}

/// round(100 * (v - min) / (max - min)), ties rounded up, clamped into
/// [0, 100]. With clamp == false a value outside [min, max] is an error.
inline ScaledSeries scale(const MeasurementSeries& series, double min, double max,
                          bool clamp = true)
{
    if (!(min < max))
        throw ConfigError("scale needs min < max");
    ScaledSeries out;
    out.scale_min = min;
    out.scale_max = max;
    out.values.reserve(series.size());
    for (double v : series.values) {
        if (!clamp && (v < min || v > max))
            throw RangeError("value " + std::to_string(v) + " outside [" +
                             std::to_string(min) + ", " + std::to_string(max) + "]");
        const double r = std::floor(kScaledMax * (v - min) / (max - min) + 0.5);
        out.values.push_back(static_cast<int>(std::clamp(r, 0.0, double{kScaledMax})));
    }
    return out;
}

inline int clamp_to_layout(int v, const BucketLayout& layout)
{
    return std::clamp(v, layout.min(), layout.max() - 1);
}

/// Below-range values go to min, values at or above max go to max - 1, so
/// every output lands in exactly one bucket.
inline ScaledSeries clamp_for_layout(ScaledSeries s, const BucketLayout& layout)
{
    for (auto& v : s.values)
        v = clamp_to_layout(v, layout);
    return s;
}

/// Splits a whole number of days.
inline std::vector<ScaledSeries> split_days(const ScaledSeries& s)
{
    if (s.size() % kHoursPerDay != 0)
        throw DimensionError("series of " + std::to_string(s.size()) +
                             " samples is not a whole number of days");
    std::vector<ScaledSeries> days;
    for (std::size_t i = 0; i < s.size(); i += kHoursPerDay) {
        ScaledSeries d;
        d.scale_min = s.scale_min;
        d.scale_max = s.scale_max;
        d.values.assign(s.values.begin() + static_cast<std::ptrdiff_t>(i),
                        s.values.begin() + static_cast<std::ptrdiff_t>(i + kHoursPerDay));
        days.push_back(std::move(d));
    }
    return days;
}

/// Per-hour mean across days, rounded half up.
inline ReferenceDay build_reference(std::span<const ScaledSeries> days)
{
    if (days.empty())
        throw DimensionError("reference needs at least one day");
    std::array<long long, kHoursPerDay> sums{};
    for (const auto& d : days) {
        if (d.size() != kHoursPerDay)
            throw DimensionError("reference day has " + std::to_string(d.size()) +
                                 " values, expected 24");
        for (int h = 0; h < kHoursPerDay; ++h) {
            if (d.values[static_cast<std::size_t>(h)] < 0)
                throw DomainError("negative scaled value in reference day");
            sums[static_cast<std::size_t>(h)] += d.values[static_cast<std::size_t>(h)];
        }
    }
    const auto n = static_cast<long long>(days.size());
    ReferenceDay r;
    for (int h = 0; h < kHoursPerDay; ++h)
        r.values[static_cast<std::size_t>(h)] =
            static_cast<int>((2 * sums[static_cast<std::size_t>(h)] + n) / (2 * n));
    return r;
}

inline ScaledSeries to_series(const ReferenceDay& r)
{
    ScaledSeries s;
    s.values.assign(r.values.begin(), r.values.end());
    s.scale_max = kScaledMax;
    return s;
}

/// `hour_index,scaled_value` with a header row.
inline void write_scaled_csv(std::ostream& out, std::span<const int> values)
{
    out << "hour_index,scaled_value\n";
    for (std::size_t i = 0; i < values.size(); ++i)
        out << i << ',' << values[i] << '\n';
}

/// Reads `hour_index,scaled_value[,...]`; extra columns are ignored, hour
/// indices must run 0, 1, 2, ...
inline ScaledSeries parse_scaled_csv(std::istream& in)
{
    ScaledSeries s;
    s.scale_max = kScaledMax;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto body = detail::trim(line);
        if (body.empty())
            continue;
        const auto fields = detail::split_fields(body);
        const auto idx = detail::parse_number<long long>(fields[0]);
        if (!idx && lineno == 1)
            continue;
        if (fields.size() < 2)
            throw ParseError(lineno, "expected at least 2 columns");
        if (!idx)
            throw ParseError(lineno, "bad hour index '" + std::string(fields[0]) + "'");
        if (*idx != static_cast<long long>(s.values.size()))
            throw ContinuityError(lineno, "hour index " + std::to_string(*idx) +
                                              " out of sequence");
        const auto v = detail::parse_number<int>(fields[1]);
        if (!v || *v < 0)
            throw ParseError(lineno, "bad scaled value '" + std::string(fields[1]) + "'");
        s.values.push_back(*v);
    }
    return s;
}

inline ScaledSeries load_scaled_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open " + path.string());
    return parse_scaled_csv(in);
}

}  // namespace hegram
