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

// Seeded synthetic meter data and anomaly injectors for the five abnormal
// situations: readings that do not match the reference, spikes, a stuck
// sensor, a noisy sensor, and noise beyond the scaled range.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "hegram/errors.hpp"
#include "hegram/histogram.hpp"
#include "hegram/pipeline.hpp"
#include "hegram/random.hpp"

namespace hegram {

enum class ScenarioKind { mismatch, spikes, constant, noisy, out_of_range };

inline constexpr std::array kAllScenarios{ScenarioKind::mismatch, ScenarioKind::spikes,
                                          ScenarioKind::constant, ScenarioKind::noisy,
                                          ScenarioKind::out_of_range};

inline std::string_view to_string(ScenarioKind k)
{
    switch (k) {
    case ScenarioKind::mismatch:
        return "mismatch";
    case ScenarioKind::spikes:
        return "spikes";
    case ScenarioKind::constant:
        return "constant";
    case ScenarioKind::noisy:
        return "noisy";
    case ScenarioKind::out_of_range:
        return "out_of_range";
    }
    return "?";
}

inline ScenarioKind parse_scenario_kind(std::string_view s)
{
    for (auto k : kAllScenarios)
        if (to_string(k) == s)
            return k;
    throw SpecError("unknown scenario kind '" + std::string(s) + "'");
}

/// Fixture letter a..e in declaration order.
inline char scenario_letter(ScenarioKind k)
{
    return static_cast<char>('a' + static_cast<int>(k));
}

struct ScenarioSpec {
    ScenarioKind kind = ScenarioKind::spikes;
    std::uint64_t seed = 0;
    int count = 0;      // injected points (ignored for constant)
    int magnitude = 0;  // spike / shift / overshoot size, scaled units
    int amplitude = 0;  // noisy: deltas drawn from [-amplitude, amplitude] \ {0}
    int level = 0;      // constant: reported value
};

struct LabeledFixture {
    ScenarioKind kind = ScenarioKind::spikes;
    std::vector<int> data;
    std::vector<std::uint8_t> truth;  // 1 = injected anomaly

    std::size_t anomalies() const
    {
        return static_cast<std::size_t>(std::count(truth.begin(), truth.end(), 1));
    }
};

namespace detail {

inline std::vector<std::size_t> pick_positions(Rng& rng, std::size_t n, std::size_t k)
{
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i)
        idx[i] = i;
    for (std::size_t i = 0; i < k; ++i)
        std::swap(idx[i], idx[i + uniform_below(rng, n - i)]);
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    return idx;
}

// base + delta clamped to the scaled range; flips the sign if clamping
// would leave the value unchanged.
inline int displaced(int base, int delta)
{
    int v = std::clamp(base + delta, 0, kScaledMax);
    if (v == base)
        v = std::clamp(base - delta, 0, kScaledMax);
    return v;
}

inline void validate(const ScenarioSpec& spec)
{
    if (spec.kind == ScenarioKind::constant) {
        if (spec.level < 0 || spec.level > kScaledMax)
            throw SpecError("constant level must lie in [0, 100]");
        return;
    }
    if (spec.count < 0 || spec.count > kHoursPerDay)
        throw SpecError("injection count must lie in [0, 24]");
    if (spec.count == 0)
        return;
    switch (spec.kind) {
    case ScenarioKind::noisy:
        if (spec.amplitude <= 0)
            throw SpecError("noisy scenario needs a positive amplitude");
        break;
    case ScenarioKind::out_of_range:
        if (spec.magnitude <= 0 || kScaledMax + spec.magnitude > kPlaintextMax)
            throw SpecError("out-of-range magnitude must lie in [1, 155]");
        break;
    default:
        if (spec.magnitude <= 0)
            throw SpecError("scenario needs a positive magnitude");
        break;
    }
}

}  // namespace detail

/// Deterministic in (base, spec). truth marks exactly the positions whose
/// value changed; for the constant kind every position counts.
inline LabeledFixture inject(const ReferenceDay& base, const ScenarioSpec& spec)
{
    detail::validate(spec);
    LabeledFixture f;
    f.kind = spec.kind;
    f.data.assign(base.values.begin(), base.values.end());
    f.truth.assign(f.data.size(), 0);
    Rng rng(spec.seed);
    const auto n = f.data.size();

    switch (spec.kind) {
    case ScenarioKind::constant:
        std::fill(f.data.begin(), f.data.end(), spec.level);
        std::fill(f.truth.begin(), f.truth.end(), 1);
        break;
    case ScenarioKind::mismatch: {
        // A contiguous run of readings shifted away from the usual profile.
        const auto k = static_cast<std::size_t>(spec.count);
        const auto start = uniform_below(rng, n - k + 1);
        for (std::size_t i = start; i < start + k; ++i)
            f.data[i] = detail::displaced(f.data[i], spec.magnitude);
        break;
    }
    case ScenarioKind::spikes:
        for (auto i : detail::pick_positions(rng, n, static_cast<std::size_t>(spec.count))) {
            const int sign = (rng() & 1) ? 1 : -1;
            f.data[i] = detail::displaced(f.data[i], sign * spec.magnitude);
        }
        break;
    case ScenarioKind::noisy:
        for (auto i : detail::pick_positions(rng, n, static_cast<std::size_t>(spec.count))) {
            int delta = 0;
            while (delta == 0)
                delta = static_cast<int>(uniform_int(rng, -spec.amplitude, spec.amplitude));
            f.data[i] = detail::displaced(f.data[i], delta);
        }
        break;
    case ScenarioKind::out_of_range:
        for (auto i : detail::pick_positions(rng, n, static_cast<std::size_t>(spec.count)))
            f.data[i] = kScaledMax + static_cast<int>(uniform_int(rng, 1, spec.magnitude));
        break;
    }

    if (spec.kind != ScenarioKind::constant)
        for (std::size_t i = 0; i < n; ++i)
            f.truth[i] = f.data[i] != base.values[i] ? 1 : 0;
    return f;
}

/// Hourly photovoltaic-style production in kW: zero at night, a noisy bell
/// over daylight hours peaking near 9.91 kW.
inline MeasurementSeries synthetic_meter_days(int days, std::uint64_t seed)
{
    using namespace std::chrono;
    constexpr double kPeak = 9.91;
    Rng rng(seed);
    MeasurementSeries s;
    const sys_seconds start{sys_days{year{2021} / January / 1}};
    for (int d = 0; d < days; ++d) {
        const double day_factor = 0.8 + 0.2 * uniform_unit(rng);
        for (int h = 0; h < kHoursPerDay; ++h) {
            double v = 0.0;
            if (h >= 7 && h <= 17) {
                const double x = std::sin(std::numbers::pi * (h - 6) / 12.0);
                v = kPeak * day_factor * std::pow(x, 1.3) * (0.95 + 0.1 * uniform_unit(rng));
                v = std::round(std::min(v, kPeak) * 100.0) / 100.0;
            }
            s.timestamps.push_back(start + hours{d * kHoursPerDay + h});
            s.values.push_back(v);
        }
    }
    return s;
}

inline constexpr std::uint64_t kCanonicalReferenceSeed = 20210101;
inline constexpr int kCanonicalReferenceDays = 5;
inline constexpr int kCanonicalBuckets = 10;

/// Five synthetic days scaled by the window's own extremes.
inline MeasurementSeries canonical_reference_measurements()
{
    return synthetic_meter_days(kCanonicalReferenceDays, kCanonicalReferenceSeed);
}

inline ReferenceDay reference_from_measurements(const MeasurementSeries& m)
{
    const auto [lo, hi] = value_range(m);
    const auto days = split_days(scale(m, lo, hi));
    return build_reference(days);
}

inline ReferenceDay canonical_reference()
{
    return reference_from_measurements(canonical_reference_measurements());
}

/// Midpoint of the first bucket the reference never visits, if any.
inline std::optional<int> empty_bucket_level(const ReferenceDay& ref, const BucketLayout& layout)
{
    std::vector<int> counts(layout.size(), 0);
    for (int v : ref.values) {
        const int c = clamp_to_layout(v, layout);
        ++counts[static_cast<std::size_t>((c - layout.min()) / layout.width())];
    }
    for (std::size_t i = 0; i < counts.size(); ++i)
        if (counts[i] == 0)
            return layout.lows()[i] + layout.width() / 2;
    return std::nullopt;
}

/// Canonical specs for fixtures a..e. Injection counts follow the anomaly
/// counts of the original smart-meter experiments.
inline std::vector<ScenarioSpec> canonical_specs(const ReferenceDay& base)
{
    const auto layout = make_layout_with_buckets(0, kScaledMax, kCanonicalBuckets);
    const auto level = empty_bucket_level(base, layout);
    if (!level)
        throw SpecError("reference day occupies every bucket; no constant level is rare");
    return {
        {ScenarioKind::mismatch, 101, 3, 30, 0, 0},
        {ScenarioKind::spikes, 202, 12, 45, 0, 0},
        {ScenarioKind::constant, 303, 0, 0, 0, *level},
        {ScenarioKind::noisy, 404, 22, 0, 15, 0},
        {ScenarioKind::out_of_range, 505, 13, 40, 0, 0},
    };
}

inline std::vector<LabeledFixture> fixture_suite()
{
    const auto base = canonical_reference();
    std::vector<LabeledFixture> out;
    for (const auto& spec : canonical_specs(base))
        out.push_back(inject(base, spec));
    return out;
}

/// `hour_index,scaled_value,truth_label`.
inline void write_fixture_csv(std::ostream& out, const LabeledFixture& f)
{
    out << "hour_index,scaled_value,truth_label\n";
    for (std::size_t i = 0; i < f.data.size(); ++i)
        out << i << ',' << f.data[i] << ',' << int{f.truth[i]} << '\n';
}

inline LabeledFixture parse_fixture_csv(std::istream& in, ScenarioKind kind)
{
    LabeledFixture f;
    f.kind = kind;
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
        if (fields.size() != 3)
            throw ParseError(lineno, "expected 3 columns");
        const auto v = detail::parse_number<int>(fields[1]);
        const auto t = detail::parse_number<int>(fields[2]);
        if (!idx || !v || !t || (*t != 0 && *t != 1))
            throw ParseError(lineno, "malformed fixture row");
        if (*idx != static_cast<long long>(f.data.size()))
            throw ContinuityError(lineno, "hour index out of sequence");
        f.data.push_back(*v);
        f.truth.push_back(static_cast<std::uint8_t>(*t));
    }
    return f;
}

inline LabeledFixture load_fixture(const std::filesystem::path& path, ScenarioKind kind)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open " + path.string());
    return parse_fixture_csv(in, kind);
}

inline std::string fixture_filename(ScenarioKind k)
{
    return std::string("scenario_") + scenario_letter(k) + ".csv";
}

/// `timestamp,value_kw` with ISO-8601 timestamps.
inline void write_measurements_csv(std::ostream& out, const MeasurementSeries& s)
{
    using namespace std::chrono;
    out << "timestamp,value_kw\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
        const auto dp = floor<days>(s.timestamps[i]);
        const year_month_day ymd{dp};
        const hh_mm_ss hms{s.timestamps[i] - dp};
        char buf[64];
        std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d,%.2f",
                      static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                      static_cast<unsigned>(ymd.day()), static_cast<int>(hms.hours().count()),
                      static_cast<int>(hms.minutes().count()), s.values[i]);
        out << buf << '\n';
    }
}

}  // namespace hegram
