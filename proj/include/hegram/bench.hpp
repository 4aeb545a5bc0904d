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

// Clear-input size formulas and the (days, buckets) benchmark grid.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "hegram/detector.hpp"
#include "hegram/pipeline.hpp"
#include "hegram/scenario.hpp"

namespace hegram {

enum class SizePhase { detection, histogram_build };

inline SizePhase parse_size_phase(std::string_view s)
{
    if (s == "detection")
        return SizePhase::detection;
    if (s == "histogram_build")
        return SizePhase::histogram_build;
    throw ConfigError("unknown phase '" + std::string(s) + "'");
}

struct SizeQuery {
    int days = 1;
    int buckets = 10;
    SizePhase phase = SizePhase::detection;
};

/// Bytes of clear input, one byte per 8-bit value.
///   detection:        24 * days (data) + 3 * buckets (low, high, count) + 1 (threshold)
///   histogram_build:  24 * days (reference) + 2 * buckets (low, high)
inline std::uint64_t clear_input_size(const SizeQuery& q)
{
    if (q.days < 1 || q.buckets < 1)
        throw ConfigError("size query needs days >= 1 and buckets >= 1");
    const auto d = static_cast<std::uint64_t>(q.days);
    const auto b = static_cast<std::uint64_t>(q.buckets);
    return q.phase == SizePhase::detection ? 24 * d + 3 * b + 1 : 24 * d + 2 * b;
}

struct BenchOptions {
    Threshold threshold{2};
    std::uint64_t seed = 7;
    ContextConfig context;
};

struct BenchPhase {
    PhaseReport report;
    std::uint64_t clear_input_size = 0;
};

struct BenchCell {
    int days = 0;
    int buckets = 0;
    std::vector<BenchPhase> phases;

    OpCounter total() const
    {
        OpCounter t;
        for (const auto& p : phases)
            t += p.report.ops;
        return t;
    }
};

struct LinearityRatio {
    std::pair<int, int> from;  // (days, buckets)
    std::pair<int, int> to;
    std::string doubled;       // "days" or "buckets"
    double ratio = 0;
};

struct BenchReport {
    UseCase use_case = UseCase::uc1;
    ContextKind kind = ContextKind::simulated;
    std::vector<BenchCell> cells;
    std::vector<std::string> diagnostics;
    std::vector<LinearityRatio> ratios;
    bool partial = false;

    const BenchCell* find(int days, int buckets) const
    {
        for (const auto& c : cells)
            if (c.days == days && c.buckets == buckets)
                return &c;
        return nullptr;
    }
};

/// Scaled synthetic workload for one grid cell: `days` reference days and
/// `days` days to label, both scaled by the reference window.
inline std::pair<std::vector<ScaledSeries>, ScaledSeries> bench_workload(int days,
                                                                         std::uint64_t seed)
{
    const auto ref_kw = synthetic_meter_days(days, seed);
    const auto data_kw = synthetic_meter_days(days, splitmix64(seed));
    const auto [lo, hi] = value_range(ref_kw);
    return {split_days(scale(ref_kw, lo, hi)), scale(data_kw, lo, hi)};
}

inline std::uint64_t phase_clear_size(std::string_view phase, int days, int buckets)
{
    const auto detection = clear_input_size({days, buckets, SizePhase::detection});
    const auto build = clear_input_size({days, buckets, SizePhase::histogram_build});
    if (phase == "detection")
        return detection;
    if (phase == "histogram_build")
        return build;
    // fused: reference + bucket ranges, then data + threshold
    return build + 24 * static_cast<std::uint64_t>(days) + 1;
}

inline BenchReport bench(const std::vector<std::pair<int, int>>& grid, UseCase uc,
                         ContextKind kind, const BenchOptions& opts = {})
{
    BenchReport report;
    report.use_case = uc;
    report.kind = kind;
    for (const auto& [days, buckets] : grid) {
        DetectorConfig cfg;
        cfg.use_case = uc;
        cfg.days = days;
        cfg.num_buckets = buckets;
        cfg.threshold = opts.threshold;
        cfg.context = opts.context;
        cfg.context.kind = kind;
        try {
            layout_for(cfg);
            const auto [reference, data] = bench_workload(days, opts.seed);
            const auto run = run_detector(reference, data, cfg);
            BenchCell cell{days, buckets, {}};
            for (const auto& p : run.phases)
                cell.phases.push_back({p, phase_clear_size(p.name, days, buckets)});
            report.cells.push_back(std::move(cell));
        } catch (const ConfigError& e) {
            report.partial = true;
            report.diagnostics.push_back("skipped (" + std::to_string(days) + ", " +
                                         std::to_string(buckets) + "): " + e.what());
        }
    }
    for (const auto& c : report.cells) {
        const auto base = static_cast<double>(c.total().total());
        if (base == 0)
            continue;
        if (const auto* d = report.find(2 * c.days, c.buckets))
            report.ratios.push_back({{c.days, c.buckets}, {d->days, d->buckets}, "days",
                                     static_cast<double>(d->total().total()) / base});
        if (const auto* b = report.find(c.days, 2 * c.buckets))
            report.ratios.push_back({{c.days, c.buckets}, {b->days, b->buckets}, "buckets",
                                     static_cast<double>(b->total().total()) / base});
    }
    return report;
}

inline nlohmann::json to_json(const BenchReport& r)
{
    nlohmann::json j;
    j["use_case"] = static_cast<int>(r.use_case);
    j["context"] = to_string(r.kind);
    j["partial"] = r.partial;
    j["diagnostics"] = r.diagnostics;
    auto cells = nlohmann::json::array();
    for (const auto& c : r.cells) {
        auto phases = nlohmann::json::array();
        for (const auto& p : c.phases)
            phases.push_back({{"name", p.report.name},
                              {"ops", to_json(p.report.ops)},
                              {"timings",
                               {{"compile_s", p.report.timings.setup_s},
                                {"keygen_s", p.report.timings.keygen_s},
                                {"execution_s", p.report.timings.execution_s}}},
                              {"clear_input_size_bytes", p.clear_input_size}});
        cells.push_back({{"days", c.days},
                         {"buckets", c.buckets},
                         {"phases", phases},
                         {"total_ops", to_json(c.total())}});
    }
    j["cells"] = cells;
    auto ratios = nlohmann::json::array();
    for (const auto& x : r.ratios)
        ratios.push_back({{"from", {x.from.first, x.from.second}},
                          {"to", {x.to.first, x.to.second}},
                          {"doubled", x.doubled},
                          {"ratio", x.ratio}});
    j["linearity"] = ratios;
    return j;
}

/// One row per (cell, phase), columns after the usual circuit report.
inline void write_csv(std::ostream& out, const BenchReport& r)
{
    out << "days,buckets,phase,programmable_bootstrap,key_switch,clear_add,encrypted_add,"
           "clear_multiply,encrypted_negation,total_operations,compile_s,keygen_s,"
           "execution_s,clear_input_size_bytes\n";
    for (const auto& c : r.cells)
        for (const auto& p : c.phases) {
            const auto& o = p.report.ops;
            out << c.days << ',' << c.buckets << ',' << p.report.name << ',' << o.pbs << ','
                << o.key_switch << ',' << o.clear_add << ',' << o.encrypted_add << ','
                << o.clear_mul << ',' << o.encrypted_neg << ',' << o.total() << ','
                << p.report.timings.setup_s << ',' << p.report.timings.keygen_s << ','
                << p.report.timings.execution_s << ',' << p.clear_input_size << '\n';
        }
}

}  // namespace hegram
