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

// End-to-end detection in the three deployment configurations:
//
//   UC-1  one circuit: encrypted data + encrypted precomputed histogram -> labels
//   UC-2  two circuits: reference -> encrypted histogram, handed to a second
//         circuit that labels the data; keys are shared through the key store
//         or the histogram is decrypted and re-encrypted by the client
//   UC-3  one circuit building the histogram and labelling in one pass
//
// The client (key holder) and the server (evaluation key only) both run in
// process; the boundary between them is the session's encrypt/decrypt.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "hegram/errors.hpp"
#include "hegram/eval_context.hpp"
#include "hegram/histogram.hpp"
#include "hegram/pipeline.hpp"
#include "hegram/serialization.hpp"
#include "hegram/simulated.hpp"

namespace hegram {

enum class UseCase { uc1 = 1, uc2 = 2, uc3 = 3 };

inline UseCase parse_use_case(int n)
{
    if (n < 1 || n > 3)
        throw ConfigError("use case must be 1, 2 or 3");
    return static_cast<UseCase>(n);
}

enum class HandoffMode { shared_keys, reencrypt };

inline std::string_view to_string(HandoffMode m)
{
    return m == HandoffMode::shared_keys ? "shared-keys" : "reencrypt";
}

inline HandoffMode parse_handoff_mode(std::string_view s)
{
    if (s == "shared-keys")
        return HandoffMode::shared_keys;
    if (s == "reencrypt")
        return HandoffMode::reencrypt;
    throw ConfigError("unknown handoff mode '" + std::string(s) + "'");
}

struct DetectorConfig {
    UseCase use_case = UseCase::uc1;
    int days = 1;
    int num_buckets = 10;
    Threshold threshold{2};
    int min = 0;
    int max = kScaledMax;
    ContextConfig context;
    HandoffMode handoff = HandoffMode::shared_keys;
    // Root of the key store used for the UC-2 handoff. Empty: a per-process
    // directory under the system temp dir.
    std::filesystem::path keystore;
    std::string context_id = "histogram-circuit";
};

struct PhaseTimings {
    double setup_s = 0;  // lookup-table construction, the analog of circuit compilation
    double keygen_s = 0;
    double execution_s = 0;
};

struct PhaseReport {
    std::string name;
    OpCounter ops;
    PhaseTimings timings;
};

struct DetectionRun {
    std::vector<std::uint8_t> labels;
    std::optional<Histogram> histogram;
    std::vector<PhaseReport> phases;
    bool instrumented = false;

    OpCounter total_ops() const
    {
        OpCounter t;
        for (const auto& p : phases)
            t += p.ops;
        return t;
    }

    std::size_t anomalies() const
    {
        std::size_t n = 0;
        for (auto l : labels)
            n += l;
        return n;
    }
};

inline BucketLayout layout_for(const DetectorConfig& cfg)
{
    if (cfg.days < 1)
        throw ConfigError("days must be at least 1");
    return make_layout_with_buckets(cfg.min, cfg.max, cfg.num_buckets);
}

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

inline const std::filesystem::path& default_keystore_root()
{
    static const std::filesystem::path root =
        std::filesystem::temp_directory_path() /
        ("hegram-keys-" + std::to_string(splitmix64(static_cast<std::uint64_t>(
                              Clock::now().time_since_epoch().count()))));
    return root;
}

class PlainSession {
public:
    using value_type = PlainContext::value_type;

    explicit PlainSession(const ContextConfig&) {}

    PlainContext& ctx() { return ctx_; }
    value_type encrypt(int x) const { return x; }
    int decrypt(value_type v) const { return static_cast<int>(v); }

    std::unique_ptr<PlainSession> handoff(std::vector<value_type>& counts,
                                          const DetectorConfig& cfg) const
    {
        (void)counts;
        return std::make_unique<PlainSession>(cfg.context);
    }

private:
    PlainContext ctx_;
};

class SimulatedSession {
public:
    using value_type = Ciphertext;

    explicit SimulatedSession(const ContextConfig& cfg)
        : SimulatedSession(keygen(cfg), cfg)
    {
    }

    SimulatedSession(const KeyPair& keys, const ContextConfig& cfg)
        : keys_(keys), cfg_(cfg), ctx_(keys.eval, cfg)
    {
    }

    SimulatedContext& ctx() { return ctx_; }
    const KeyPair& keys() const { return keys_; }
    value_type encrypt(int x) const { return hegram::encrypt(keys_, x); }
    int decrypt(const value_type& c) const { return hegram::decrypt(keys_, c); }

    /// Moves an encrypted histogram to a fresh second-circuit session.
    /// shared_keys: keys and ciphertexts go through the key store and the
    /// second circuit loads them. reencrypt: the client decrypts with the
    /// first key and encrypts under a newly generated one.
    std::unique_ptr<SimulatedSession> handoff(std::vector<value_type>& counts,
                                              const DetectorConfig& cfg) const
    {
        if (cfg.handoff == HandoffMode::reencrypt) {
            auto next_cfg = cfg_;
            next_cfg.rng_seed = splitmix64(cfg_.rng_seed);
            auto next = std::make_unique<SimulatedSession>(next_cfg);
            for (auto& c : counts)
                c = next->encrypt(decrypt(c));
            return next;
        }

        const KeyStore store(cfg.keystore);
        store.save(cfg.context_id, keys_);
        write_file(store.dir(cfg.context_id) / "histogram.bin",
                   serialize(std::span<const Ciphertext>(counts), keys_.eval.key_id));

        auto loaded = store.load(cfg.context_id);
        const auto hist_path = store.dir(cfg.context_id) / "histogram.bin";
        if (!std::filesystem::exists(hist_path))
            throw KeyError("key store has no histogram for '" + cfg.context_id + "'");
        counts = deserialize_ciphertexts(read_file(hist_path));
        return from_shared_keys(loaded, counts, cfg_);
    }

    /// Second-circuit session over keys loaded from the store. Counts must
    /// have been produced under those keys.
    static std::unique_ptr<SimulatedSession> from_shared_keys(const KeyPair& keys,
                                                              std::span<const Ciphertext> counts,
                                                              const ContextConfig& cfg)
    {
        for (const auto& c : counts)
            if (c.key_id != keys.eval.key_id)
                throw ConfigError(
                    "handoff mode mismatch: histogram was not produced under the shared keys");
        return std::make_unique<SimulatedSession>(keys, cfg);
    }

private:
    KeyPair keys_;
    ContextConfig cfg_;
    SimulatedContext ctx_;
};

template <class Session>
std::unique_ptr<Session> open_session(const ContextConfig& cfg, double& keygen_s)
{
    const auto t0 = Clock::now();
    auto s = std::make_unique<Session>(cfg);
    keygen_s = seconds_since(t0);
    return s;
}

template <class Session>
std::vector<typename Session::value_type> encrypt_all(const Session& s, std::span<const int> xs)
{
    std::vector<typename Session::value_type> out;
    out.reserve(xs.size());
    for (int x : xs)
        out.push_back(s.encrypt(x));
    return out;
}

template <class Session>
std::vector<std::uint8_t> decrypt_labels(const Session& s,
                                         std::span<const typename Session::value_type> v)
{
    std::vector<std::uint8_t> out;
    out.reserve(v.size());
    for (const auto& c : v)
        out.push_back(static_cast<std::uint8_t>(s.decrypt(c)));
    return out;
}

inline std::vector<int> clamped_values(const ScaledSeries& s, const BucketLayout& layout)
{
    return clamp_for_layout(s, layout).values;
}

inline std::vector<int> flatten_days(std::span<const ScaledSeries> days,
                                     const BucketLayout& layout)
{
    std::vector<int> out;
    for (const auto& d : days)
        for (int v : d.values)
            out.push_back(clamp_to_layout(v, layout));
    return out;
}

template <class Session>
Histogram decrypt_histogram(const Session& s,
                            const HistogramOf<typename Session::value_type>& h)
{
    Histogram out{h.layout, {}};
    for (const auto& c : h.counts)
        out.counts.push_back(s.decrypt(c));
    return out;
}

template <class Session>
DetectionRun uc1_impl(const Histogram& hist, const ScaledSeries& data,
                      const DetectorConfig& cfg)
{
    DetectionRun run;
    PhaseReport phase{"detection", {}, {}};

    auto t0 = Clock::now();
    const auto layout = layout_for(cfg);
    if (!(hist.layout == layout))
        throw ConfigError("histogram layout does not match the configured " +
                          std::to_string(cfg.num_buckets) + " buckets over [" +
                          std::to_string(cfg.min) + ", " + std::to_string(cfg.max) + ")");
    if (hist.counts.size() != layout.size())
        throw DimensionError("histogram counts do not match its layout");
    phase.timings.setup_s = seconds_since(t0);

    auto session = open_session<Session>(cfg.context, phase.timings.keygen_s);
    run.instrumented = session->ctx().instrumented();

    const auto xs = encrypt_all(*session, clamped_values(data, layout));
    std::vector<int> plain_counts;
    for (auto c : hist.counts)
        plain_counts.push_back(static_cast<int>(c));
    HistogramOf<typename Session::value_type> enc_hist{layout, encrypt_all(*session, std::span<const int>(plain_counts))};

    t0 = Clock::now();
    const auto labels = label_samples(std::span<const typename Session::value_type>(xs), enc_hist,
                                      cfg.threshold, session->ctx());
    phase.timings.execution_s = seconds_since(t0);
    phase.ops = session->ctx().snapshot_counts();

    run.labels = decrypt_labels(*session, std::span<const typename Session::value_type>(labels));
    run.phases.push_back(phase);
    return run;
}

template <class Session>
DetectionRun uc2_impl(std::span<const ScaledSeries> reference, const ScaledSeries& data,
                      DetectorConfig cfg)
{
    using V = typename Session::value_type;
    DetectionRun run;
    PhaseReport build{"histogram_build", {}, {}};
    PhaseReport detect{"detection", {}, {}};

    auto t0 = Clock::now();
    const auto layout = layout_for(cfg);
    build.timings.setup_s = seconds_since(t0);

    auto first = open_session<Session>(cfg.context, build.timings.keygen_s);
    run.instrumented = first->ctx().instrumented();
    const auto ref = encrypt_all(*first, flatten_days(reference, layout));

    t0 = Clock::now();
    auto hist = build_histogram(std::span<const V>(ref), layout, first->ctx());
    build.timings.execution_s = seconds_since(t0);
    build.ops = first->ctx().snapshot_counts();
    run.histogram = decrypt_histogram(*first, hist);

    if (cfg.keystore.empty())
        cfg.keystore = default_keystore_root();
    t0 = Clock::now();
    detect.timings.setup_s = 0;
    auto second = first->handoff(hist.counts, cfg);
    detect.timings.keygen_s = seconds_since(t0);

    const auto xs = encrypt_all(*second, clamped_values(data, layout));
    t0 = Clock::now();
    const auto labels = label_samples(std::span<const V>(xs), hist, cfg.threshold, second->ctx());
    detect.timings.execution_s = seconds_since(t0);
    detect.ops = second->ctx().snapshot_counts();

    run.labels = decrypt_labels(*second, std::span<const V>(labels));
    run.phases = {build, detect};
    return run;
}

template <class Session>
DetectionRun uc3_impl(std::span<const ScaledSeries> reference, const ScaledSeries& data,
                      const DetectorConfig& cfg)
{
    using V = typename Session::value_type;
    DetectionRun run;
    PhaseReport phase{"fused", {}, {}};

    auto t0 = Clock::now();
    const auto layout = layout_for(cfg);
    phase.timings.setup_s = seconds_since(t0);

    auto session = open_session<Session>(cfg.context, phase.timings.keygen_s);
    run.instrumented = session->ctx().instrumented();
    const auto ref = encrypt_all(*session, flatten_days(reference, layout));
    const auto xs = encrypt_all(*session, clamped_values(data, layout));

    t0 = Clock::now();
    const auto hist = build_histogram(std::span<const V>(ref), layout, session->ctx());
    const auto labels = label_samples(std::span<const V>(xs), hist, cfg.threshold, session->ctx());
    phase.timings.execution_s = seconds_since(t0);
    phase.ops = session->ctx().snapshot_counts();

    run.labels = decrypt_labels(*session, std::span<const V>(labels));
    run.phases.push_back(phase);
    return run;
}

[[noreturn]] inline void native_unavailable()
{
    throw CapabilityError("native FHE adapter not built into this binary");
}

}  // namespace detail

/// Labels data against a precomputed (client-side) histogram.
inline DetectionRun run_uc1(const Histogram& hist, const ScaledSeries& data,
                            const DetectorConfig& cfg)
{
    switch (cfg.context.kind) {
    case ContextKind::plain:
        return detail::uc1_impl<detail::PlainSession>(hist, data, cfg);
    case ContextKind::simulated:
        return detail::uc1_impl<detail::SimulatedSession>(hist, data, cfg);
    case ContextKind::native:
        break;
    }
    detail::native_unavailable();
}

/// Two circuits with a histogram handoff between them. Also reports the
/// decrypted histogram.
inline DetectionRun run_uc2(std::span<const ScaledSeries> reference, const ScaledSeries& data,
                            const DetectorConfig& cfg)
{
    switch (cfg.context.kind) {
    case ContextKind::plain:
        return detail::uc2_impl<detail::PlainSession>(reference, data, cfg);
    case ContextKind::simulated:
        return detail::uc2_impl<detail::SimulatedSession>(reference, data, cfg);
    case ContextKind::native:
        break;
    }
    detail::native_unavailable();
}

inline DetectionRun run_uc3(std::span<const ScaledSeries> reference, const ScaledSeries& data,
                            const DetectorConfig& cfg)
{
    switch (cfg.context.kind) {
    case ContextKind::plain:
        return detail::uc3_impl<detail::PlainSession>(reference, data, cfg);
    case ContextKind::simulated:
        return detail::uc3_impl<detail::SimulatedSession>(reference, data, cfg);
    case ContextKind::native:
        break;
    }
    detail::native_unavailable();
}

/// Clear histogram of the clamped reference, as a client would precompute it
/// for UC-1.
inline Histogram plain_histogram(std::span<const ScaledSeries> reference,
                                 const BucketLayout& layout)
{
    PlainContext ctx;
    std::vector<std::int64_t> xs;
    for (int v : detail::flatten_days(reference, layout))
        xs.push_back(v);
    return build_histogram(std::span<const std::int64_t>(xs), layout, ctx);
}

/// Dispatches on cfg.use_case. UC-1 uses `hist` when given, otherwise the
/// clear histogram of `reference`.
inline DetectionRun run_detector(std::span<const ScaledSeries> reference,
                                 const ScaledSeries& data, const DetectorConfig& cfg,
                                 const std::optional<Histogram>& hist = std::nullopt)
{
    switch (cfg.use_case) {
    case UseCase::uc1:
        return run_uc1(hist ? *hist : plain_histogram(reference, layout_for(cfg)), data, cfg);
    case UseCase::uc2:
        return run_uc2(reference, data, cfg);
    case UseCase::uc3:
        return run_uc3(reference, data, cfg);
    }
    throw ConfigError("unknown use case");
}

inline nlohmann::json to_json(const OpCounter& c)
{
    return {{"programmable_bootstrap", c.pbs},
            {"key_switch", c.key_switch},
            {"clear_add", c.clear_add},
            {"encrypted_add", c.encrypted_add},
            {"clear_multiply", c.clear_mul},
            {"encrypted_negation", c.encrypted_neg},
            {"total", c.total()}};
}

inline nlohmann::json to_json(const ContextConfig& c)
{
    return {{"kind", to_string(c.kind)},
            {"failure_injection", c.failure_injection},
            {"failure_probability", std::to_string(c.failure_probability.num) + "/" +
                                        std::to_string(c.failure_probability.den)},
            {"noise_budget", c.noise_budget},
            {"rng_seed", c.rng_seed}};
}

inline nlohmann::json to_json(const Histogram& h)
{
    return {{"lows", h.layout.lows()}, {"highs", h.layout.highs()}, {"counts", h.counts}};
}

/// Run manifest: config echo, per-phase counts and timings, labels, and the
/// histogram when the run produced one.
inline nlohmann::json manifest(const DetectionRun& run, const DetectorConfig& cfg)
{
    nlohmann::json j;
    j["config"] = {{"use_case", static_cast<int>(cfg.use_case)},
                   {"days", cfg.days},
                   {"num_buckets", cfg.num_buckets},
                   {"threshold", cfg.threshold.value},
                   {"min", cfg.min},
                   {"max", cfg.max},
                   {"handoff", to_string(cfg.handoff)},
                   {"context", to_json(cfg.context)}};
    j["instrumented"] = run.instrumented;
    j["setup_time_note"] =
        "setup_s measures lookup-table construction and stands in for circuit compilation";
    auto phases = nlohmann::json::array();
    for (const auto& p : run.phases)
        phases.push_back({{"name", p.name},
                          {"ops", to_json(p.ops)},
                          {"timings",
                           {{"setup_s", p.timings.setup_s},
                            {"keygen_s", p.timings.keygen_s},
                            {"execution_s", p.timings.execution_s}}}});
    j["phases"] = phases;
    j["total_ops"] = to_json(run.total_ops());
    j["labels"] = run.labels;
    j["anomalies"] = run.anomalies();
    if (run.histogram)
        j["histogram"] = to_json(*run.histogram);
    return j;
}

}  // namespace hegram
