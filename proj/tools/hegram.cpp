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

// hegram: histogram anomaly detection over encrypted sensor streams.
//
// Exit status: 0 success, 1 usage or configuration error, 2 data error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hegram/hegram.hpp"

namespace fs = std::filesystem;
using namespace hegram;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

// Writes to `path`, or stdout when empty.
void emit(const std::string& path, const std::string& text)
{
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write " + path);
    out << text;
}

KeyStore keystore_from(const std::string& flag)
{
    return flag.empty() ? KeyStore::from_environment() : KeyStore(flag);
}

std::vector<ScaledSeries> reference_days(const ScaledSeries& s)
{
    if (s.size() % kHoursPerDay == 0 && s.size() > 0)
        return split_days(s);
    return {s};
}

Histogram histogram_from_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
        const auto lows = j.at("lows").get<std::vector<int>>();
        const auto highs = j.at("highs").get<std::vector<int>>();
        if (lows.empty() || highs.size() != lows.size())
            throw DimensionError("histogram lows/highs malformed");
        auto layout = make_layout(lows.front(), highs.back(), highs.front() - lows.front());
        if (layout.lows() != lows || layout.highs() != highs)
            throw ConfigError("histogram buckets are not contiguous and equal-width");
        return {layout, j.at("counts").get<std::vector<std::int64_t>>()};
    } catch (const nlohmann::json::exception& e) {
        throw Error(path + ": " + e.what());
    }
}

std::vector<std::pair<int, int>> parse_grid(const std::string& spec)
{
    std::vector<std::pair<int, int>> grid;
    std::stringstream ss(spec);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        if (cell.empty())
            continue;
        const auto x = cell.find('x');
        try {
            if (x == std::string::npos)
                throw std::invalid_argument(cell);
            grid.emplace_back(std::stoi(cell.substr(0, x)), std::stoi(cell.substr(x + 1)));
        } catch (const std::exception&) {
            throw CLI::ValidationError("--grid", "cell '" + cell + "' is not DAYSxBUCKETS");
        }
    }
    return grid;
}

const std::vector<std::string> kContexts{"plain", "simulated", "native"};

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Histogram anomaly detection over encrypted sensor streams"};
    app.require_subcommand(1);

    // preprocess
    auto* pre = app.add_subcommand("preprocess", "Scale an hourly kW CSV to integers in [0, 100]");
    std::string pre_input, pre_reference, pre_output;
    std::optional<double> pre_min, pre_max;
    bool pre_no_clamp = false;
    pre->add_option("--input", pre_input, "timestamp,value_kw CSV")->required();
    pre->add_option("--reference", pre_reference,
                    "CSV whose extremes define the scaling window (default: the input)");
    pre->add_option("--min", pre_min, "Override the window minimum (kW)");
    pre->add_option("--max", pre_max, "Override the window maximum (kW)");
    pre->add_flag("--no-clamp", pre_no_clamp, "Fail on values outside the window");
    pre->add_option("--output", pre_output, "Output CSV (default stdout)");

    // keygen
    auto* kg = app.add_subcommand("keygen", "Generate a key pair into the key store");
    std::uint64_t kg_seed = 0;
    std::string kg_id = "default", kg_store, kg_context = "simulated";
    std::uint32_t kg_budget = 8;
    kg->add_option("--seed", kg_seed, "Key generation seed");
    kg->add_option("--context-id", kg_id, "Key store entry name");
    kg->add_option("--keystore", kg_store, "Key store root (default $HEGRAM_KEYSTORE or ./keys)");
    kg->add_option("--context", kg_context)->check(CLI::IsMember(kContexts));
    kg->add_option("--noise-budget", kg_budget)->check(CLI::PositiveNumber);

    // build-hist
    auto* bh = app.add_subcommand("build-hist", "Build the reference histogram");
    std::string bh_reference, bh_output, bh_context = "simulated";
    int bh_buckets = 10, bh_min = 0, bh_max = kScaledMax;
    std::uint64_t bh_seed = 0;
    bh->add_option("--reference", bh_reference, "hour_index,scaled_value CSV")->required();
    bh->add_option("--buckets", bh_buckets)->check(CLI::PositiveNumber);
    bh->add_option("--min", bh_min);
    bh->add_option("--max", bh_max);
    bh->add_option("--context", bh_context)->check(CLI::IsMember(kContexts));
    bh->add_option("--seed", bh_seed);
    bh->add_option("--output", bh_output, "Histogram JSON (default stdout)");

    // detect
    auto* det = app.add_subcommand("detect", "Label samples as normal (0) or abnormal (1)");
    int det_uc = 1, det_threshold = 2, det_buckets = 10, det_days = 1;
    std::string det_context = "plain", det_data, det_reference, det_histogram, det_output,
                det_format = "text", det_handoff = "shared-keys", det_store;
    std::uint64_t det_seed = 0;
    std::uint32_t det_budget = 8;
    det->add_option("--uc", det_uc, "Use case")->check(CLI::IsMember({1, 2, 3}));
    det->add_option("--context", det_context)->check(CLI::IsMember(kContexts));
    det->add_option("--threshold", det_threshold, "Frequency threshold")
        ->check(CLI::Range(0, kPlaintextSize));
    det->add_option("--buckets", det_buckets)->check(CLI::PositiveNumber);
    det->add_option("--days", det_days)->check(CLI::PositiveNumber);
    det->add_option("--data", det_data, "Samples to label (hour_index,scaled_value[,truth])")
        ->required();
    det->add_option("--reference", det_reference, "Reference samples (hour_index,scaled_value)");
    det->add_option("--histogram", det_histogram, "Precomputed histogram JSON (UC-1)");
    det->add_option("--handoff", det_handoff, "UC-2 histogram handoff")
        ->check(CLI::IsMember({"shared-keys", "reencrypt"}));
    det->add_option("--keystore", det_store);
    det->add_option("--seed", det_seed);
    det->add_option("--noise-budget", det_budget)->check(CLI::PositiveNumber);
    det->add_option("--format", det_format)->check(CLI::IsMember({"text", "json"}));
    det->add_option("--output", det_output);

    // inject
    auto* inj = app.add_subcommand("inject", "Generate labelled anomaly fixtures");
    std::string inj_kind = "spikes", inj_reference, inj_output, inj_dir;
    ScenarioSpec inj_spec;
    bool inj_suite = false;
    inj->add_option("--kind", inj_kind)
        ->check(CLI::IsMember({"mismatch", "spikes", "constant", "noisy", "out_of_range"}));
    inj->add_option("--seed", inj_spec.seed);
    inj->add_option("--count", inj_spec.count);
    inj->add_option("--magnitude", inj_spec.magnitude);
    inj->add_option("--amplitude", inj_spec.amplitude);
    inj->add_option("--level", inj_spec.level);
    inj->add_option("--reference", inj_reference,
                    "24-value reference day CSV (default: the built-in reference)");
    inj->add_option("--output", inj_output);
    inj->add_flag("--suite", inj_suite, "Write the canonical fixture set to --out-dir");
    inj->add_option("--out-dir", inj_dir);

    // bench
    auto* ben = app.add_subcommand("bench", "Operation counts over a (days x buckets) grid");
    std::string ben_grid = "1x10,1x20,1x50,2x10,2x20,2x50", ben_context = "simulated",
                ben_format = "json", ben_output;
    int ben_uc = 1, ben_threshold = 2;
    std::uint64_t ben_seed = 7;
    ben->add_option("--grid", ben_grid, "Comma-separated DAYSxBUCKETS cells");
    ben->add_option("--uc", ben_uc)->check(CLI::IsMember({1, 2, 3}));
    ben->add_option("--context", ben_context)->check(CLI::IsMember(kContexts));
    ben->add_option("--threshold", ben_threshold)->check(CLI::Range(0, kPlaintextSize));
    ben->add_option("--seed", ben_seed);
    ben->add_option("--format", ben_format)->check(CLI::IsMember({"json", "csv"}));
    ben->add_option("--output", ben_output);

    // size
    auto* sz = app.add_subcommand("size", "Clear input size in bytes");
    int sz_days = 1, sz_buckets = 10;
    std::string sz_phase = "detection";
    sz->add_option("--days", sz_days)->required()->check(CLI::PositiveNumber);
    sz->add_option("--buckets", sz_buckets)->required()->check(CLI::PositiveNumber);
    sz->add_option("--phase", sz_phase)->check(CLI::IsMember({"detection", "histogram_build"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        if (auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front())
            std::cerr << sub->help();
        else
            std::cerr << app.help();
        return kExitUsage;
    }

    try {
        if (*pre) {
            const auto series = load_csv(pre_input);
            auto [lo, hi] = value_range(pre_reference.empty() ? series : load_csv(pre_reference));
            if (pre_min)
                lo = *pre_min;
            if (pre_max)
                hi = *pre_max;
            const auto scaled = scale(series, lo, hi, !pre_no_clamp);
            std::ostringstream out;
            write_scaled_csv(out, scaled.values);
            emit(pre_output, out.str());
        } else if (*kg) {
            ContextConfig cfg;
            cfg.kind = parse_context_kind(kg_context);
            cfg.rng_seed = kg_seed;
            cfg.noise_budget = kg_budget;
            const auto keys = keygen(cfg);
            const auto store = keystore_from(kg_store);
            store.save(kg_id, keys);
            std::cout << "wrote " << store.dir(kg_id).string() << " (key id " << std::hex
                      << keys.secret.key_id << std::dec << ")\n";
        } else if (*bh) {
            const auto ref = reference_days(load_scaled_csv(bh_reference));
            DetectorConfig cfg;
            cfg.min = bh_min;
            cfg.max = bh_max;
            cfg.num_buckets = bh_buckets;
            cfg.context.kind = parse_context_kind(bh_context);
            cfg.context.rng_seed = bh_seed;
            cfg.handoff = HandoffMode::reencrypt;
            cfg.use_case = UseCase::uc2;
            // Phase one of UC-2 with nothing to label.
            const auto run = run_uc2(ref, ScaledSeries{}, cfg);
            auto j = to_json(*run.histogram);
            j["ops"] = to_json(run.phases.front().ops);
            emit(bh_output, j.dump(2) + "\n");
        } else if (*det) {
            DetectorConfig cfg;
            cfg.use_case = parse_use_case(det_uc);
            cfg.days = det_days;
            cfg.num_buckets = det_buckets;
            cfg.threshold = Threshold(det_threshold);
            cfg.context.kind = parse_context_kind(det_context);
            cfg.context.rng_seed = det_seed;
            cfg.context.noise_budget = det_budget;
            cfg.handoff = parse_handoff_mode(det_handoff);
            if (!det_store.empty())
                cfg.keystore = det_store;
            else if (const char* env = std::getenv("HEGRAM_KEYSTORE"); env && *env)
                cfg.keystore = env;

            const auto data = load_scaled_csv(det_data);
            std::vector<ScaledSeries> ref;
            std::optional<Histogram> hist;
            if (!det_histogram.empty())
                hist = histogram_from_json(det_histogram);
            if (!det_reference.empty())
                ref = reference_days(load_scaled_csv(det_reference));
            if (ref.empty() && (cfg.use_case != UseCase::uc1 || !hist))
                throw CLI::RequiredError("--reference");

            const auto run = run_detector(ref, data, cfg, hist);
            if (det_format == "json") {
                emit(det_output, manifest(run, cfg).dump(2) + "\n");
            } else {
                std::ostringstream out;
                out << "labels:";
                for (auto l : run.labels)
                    out << ' ' << int{l};
                out << "\nanomalies: " << run.anomalies() << '\n';
                for (const auto& p : run.phases)
                    out << p.name << " ops: " << p.ops << " total=" << p.ops.total() << '\n';
                emit(det_output, out.str());
            }
        } else if (*inj) {
            const auto base = inj_reference.empty()
                                  ? canonical_reference()
                                  : [&] {
                                        const auto s = load_scaled_csv(inj_reference);
                                        if (s.size() != kHoursPerDay)
                                            throw DimensionError("reference day needs 24 values");
                                        ReferenceDay r;
                                        std::copy(s.values.begin(), s.values.end(),
                                                  r.values.begin());
                                        return r;
                                    }();
            if (inj_suite) {
                if (inj_dir.empty())
                    throw CLI::RequiredError("--out-dir");
                fs::create_directories(inj_dir);
                const auto specs = canonical_specs(base);
                for (const auto& spec : specs) {
                    std::ofstream out(fs::path(inj_dir) / fixture_filename(spec.kind));
                    write_fixture_csv(out, inject(base, spec));
                }
                std::ofstream ref_out(fs::path(inj_dir) / "reference_day.csv");
                write_scaled_csv(ref_out, base.values);
                std::ofstream kw_out(fs::path(inj_dir) / "reference_kw.csv");
                write_measurements_csv(kw_out, canonical_reference_measurements());
                std::cout << "wrote " << specs.size() << " fixtures to " << inj_dir << '\n';
            } else {
                inj_spec.kind = parse_scenario_kind(inj_kind);
                std::ostringstream out;
                write_fixture_csv(out, inject(base, inj_spec));
                emit(inj_output, out.str());
            }
        } else if (*ben) {
            BenchOptions opts;
            opts.threshold = Threshold(ben_threshold);
            opts.seed = ben_seed;
            const auto report = bench(parse_grid(ben_grid), parse_use_case(ben_uc),
                                      parse_context_kind(ben_context), opts);
            for (const auto& d : report.diagnostics)
                std::cerr << d << '\n';
            std::ostringstream out;
            if (ben_format == "csv")
                write_csv(out, report);
            else
                out << to_json(report).dump(2) << '\n';
            emit(ben_output, out.str());
        } else if (*sz) {
            std::cout << clear_input_size({sz_days, sz_buckets, parse_size_phase(sz_phase)})
                      << '\n';
        }
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const CapabilityError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    return 0;
}
