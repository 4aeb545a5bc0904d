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

#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <vector>

#include "hegram/detector.hpp"
#include "hegram/scenario.hpp"
#include "oracle.hpp"

namespace hegram {
namespace {

struct Workload {
    std::vector<ScaledSeries> reference;
    ScaledSeries data;
};

ScaledSeries series(std::vector<int> v)
{
    ScaledSeries s;
    s.values = std::move(v);
    return s;
}

Workload random_workload(Rng& rng, int days)
{
    Workload w;
    for (int d = 0; d < days; ++d) {
        std::vector<int> day(kHoursPerDay);
        for (auto& v : day)
            v = uniform_int(rng, 0, 100);
        w.reference.push_back(series(day));
    }
    std::vector<int> data(static_cast<std::size_t>(kHoursPerDay * days));
    for (auto& v : data)
        v = uniform_int(rng, 0, 104);
    w.data = series(data);
    return w;
}

std::vector<std::uint8_t> oracle_labels(const Workload& w, const DetectorConfig& cfg)
{
    const int width = (cfg.max - cfg.min) / cfg.num_buckets;
    std::vector<int> ref;
    for (const auto& d : w.reference)
        for (int v : d.values)
            ref.push_back(oracle::clamp(v, cfg.min, cfg.max));
    std::vector<int> data;
    for (int v : w.data.values)
        data.push_back(oracle::clamp(v, cfg.min, cfg.max));
    return oracle::naive_labels(data, oracle::naive_histogram(ref, cfg.min, cfg.max, width),
                                cfg.threshold.value);
}

DetectorConfig config(UseCase uc, ContextKind kind, int days = 1, int buckets = 10, int th = 2)
{
    DetectorConfig cfg;
    cfg.use_case = uc;
    cfg.context.kind = kind;
    cfg.days = days;
    cfg.num_buckets = buckets;
    cfg.threshold = Threshold(th);
    return cfg;
}

Workload canonical_workload()
{
    Workload w;
    w.reference.push_back(to_series(canonical_reference()));
    w.data = series(fixture_suite()[1].data);
    return w;
}

TEST(UseCase1, PlainMatchesOracleAndSimulatedMatchesPlain)
{
    const auto w = canonical_workload();
    for (int th : {1, 2, 3}) {
        auto cfg = config(UseCase::uc1, ContextKind::plain, 1, 10, th);
        const auto plain = run_detector(w.reference, w.data, cfg);
        EXPECT_EQ(plain.labels, oracle_labels(w, cfg));
        EXPECT_FALSE(plain.instrumented);
        cfg.context.kind = ContextKind::simulated;
        const auto sim = run_detector(w.reference, w.data, cfg);
        EXPECT_EQ(sim.labels, plain.labels);
        EXPECT_TRUE(sim.instrumented);
        ASSERT_EQ(sim.phases.size(), 1u);
        EXPECT_EQ(sim.phases[0].name, "detection");
    }
}

TEST(UseCase1, PerSampleCostIsFixed)
{
    const auto w = canonical_workload();
    const auto run = run_detector(w.reference, w.data, config(UseCase::uc1, ContextKind::simulated));
    // 24 samples at {31, 30, 1, 19} each.
    EXPECT_EQ(run.total_ops(), (OpCounter{744, 720, 24, 456, 0, 0}));
}

TEST(UseCase1, EmptyDataHasNoLabelsAndNoExecutionOps)
{
    const auto w = canonical_workload();
    for (auto kind : {ContextKind::plain, ContextKind::simulated}) {
        const auto run = run_detector(w.reference, series({}), config(UseCase::uc1, kind));
        EXPECT_TRUE(run.labels.empty());
        EXPECT_EQ(run.total_ops().total(), 0u);
    }
}

TEST(UseCase1, RejectsHistogramWithOtherLayout)
{
    const auto w = canonical_workload();
    const auto hist = plain_histogram(w.reference, make_layout_with_buckets(0, 100, 5));
    EXPECT_THROW(run_detector(w.reference, w.data, config(UseCase::uc1, ContextKind::plain), hist),
                 ConfigError);
}

TEST(UseCase2, HandoffModesAgree)
{
    const auto w = canonical_workload();
    auto cfg = config(UseCase::uc2, ContextKind::simulated);
    cfg.keystore = std::filesystem::temp_directory_path() / "hegram-test-detector-ks";
    const auto shared = run_detector(w.reference, w.data, cfg);
    cfg.handoff = HandoffMode::reencrypt;
    const auto reenc = run_detector(w.reference, w.data, cfg);
    std::filesystem::remove_all(cfg.keystore);

    EXPECT_EQ(shared.labels, reenc.labels);
    EXPECT_EQ(shared.labels, oracle_labels(w, cfg));
    ASSERT_EQ(shared.phases.size(), 2u);
    EXPECT_EQ(shared.phases[0].name, "histogram_build");
    EXPECT_EQ(shared.phases[1].name, "detection");
    EXPECT_EQ(shared.phases[0].ops, reenc.phases[0].ops);
    EXPECT_EQ(shared.phases[1].ops, reenc.phases[1].ops);
}

TEST(UseCase2, BuildPhaseCostsLessThanDetection)
{
    const auto w = canonical_workload();
    const auto run = run_detector(w.reference, w.data, config(UseCase::uc2, ContextKind::simulated));
    // 24 samples into 10 buckets: pbs 240 + 30 refreshes, ks 240, clear 10, enc 230.
    EXPECT_EQ(run.phases[0].ops, (OpCounter{270, 240, 10, 230, 0, 0}));
    EXPECT_LT(run.phases[0].ops.total(), run.phases[1].ops.total());
}

TEST(UseCase2, HistogramFeedsUseCase1)
{
    const auto w = canonical_workload();
    for (auto kind : {ContextKind::plain, ContextKind::simulated}) {
        const auto uc2 = run_detector(w.reference, w.data, config(UseCase::uc2, kind));
        ASSERT_TRUE(uc2.histogram.has_value());
        EXPECT_EQ(uc2.histogram->counts, (std::vector<std::int64_t>{13, 2, 0, 2, 0, 2, 0, 2, 2, 1}));
        const auto uc1 =
            run_detector({}, w.data, config(UseCase::uc1, kind), uc2.histogram);
        EXPECT_EQ(uc1.labels, uc2.labels);
    }
}

TEST(UseCase3, MatchesUseCase2AndIsAdditive)
{
    Rng rng(11);
    for (int days : {1, 2})
        for (int buckets : {5, 10, 20}) {
            const auto w = random_workload(rng, days);
            const auto uc2 = run_detector(w.reference, w.data,
                                          config(UseCase::uc2, ContextKind::simulated, days, buckets));
            const auto uc3 = run_detector(w.reference, w.data,
                                          config(UseCase::uc3, ContextKind::simulated, days, buckets));
            EXPECT_EQ(uc3.labels, uc2.labels);
            ASSERT_EQ(uc3.phases.size(), 1u);
            EXPECT_EQ(uc3.phases[0].name, "fused");
            EXPECT_EQ(uc3.phases[0].ops, uc2.phases[0].ops + uc2.phases[1].ops);
        }
}

TEST(Linearity, DoublingDaysDoublesOps)
{
    Rng rng(5);
    for (auto uc : {UseCase::uc1, UseCase::uc2, UseCase::uc3})
        for (int buckets : {5, 10, 20, 50}) {
            const auto w1 = random_workload(rng, 1);
            const auto w2 = random_workload(rng, 2);
            const auto a = run_detector(w1.reference, w1.data,
                                        config(uc, ContextKind::simulated, 1, buckets));
            const auto b = run_detector(w2.reference, w2.data,
                                        config(uc, ContextKind::simulated, 2, buckets));
            EXPECT_EQ(b.total_ops().total(), 2 * a.total_ops().total());
        }
}

TEST(Linearity, DoublingBucketsRoughlyDoublesOps)
{
    Rng rng(6);
    for (auto uc : {UseCase::uc1, UseCase::uc2, UseCase::uc3})
        for (auto [lo, hi] : {std::pair{5, 10}, std::pair{10, 20}, std::pair{25, 50}}) {
            const auto w = random_workload(rng, 1);
            const auto a =
                run_detector(w.reference, w.data, config(uc, ContextKind::simulated, 1, lo));
            const auto b =
                run_detector(w.reference, w.data, config(uc, ContextKind::simulated, 1, hi));
            const double r = static_cast<double>(b.total_ops().total()) /
                             static_cast<double>(a.total_ops().total());
            EXPECT_GE(r, 1.85) << lo;
            EXPECT_LE(r, 2.15) << lo;
        }
}

TEST(Handoff, MissingKeystoreEntryIsKeyError)
{
    const KeyStore store(std::filesystem::temp_directory_path() / "hegram-test-missing-ks");
    EXPECT_THROW(store.load("absent"), KeyError);
}

TEST(Handoff, HistogramUnderOtherKeysIsRejected)
{
    ContextConfig a;
    a.rng_seed = 1;
    ContextConfig b;
    b.rng_seed = 2;
    const auto ka = keygen(a);
    const auto kb = keygen(b);
    const std::vector<Ciphertext> counts{encrypt(ka, 3), encrypt(ka, 0)};
    EXPECT_THROW(detail::SimulatedSession::from_shared_keys(kb, counts, b), ConfigError);
    EXPECT_NO_THROW(detail::SimulatedSession::from_shared_keys(ka, counts, a));
}

TEST(Detector, NativeContextIsUnavailable)
{
    const auto w = canonical_workload();
    for (auto uc : {UseCase::uc1, UseCase::uc2, UseCase::uc3})
        EXPECT_THROW(run_detector(w.reference, w.data, config(uc, ContextKind::native)),
                     CapabilityError);
}

TEST(Detector, RejectsBadConfig)
{
    const auto w = canonical_workload();
    EXPECT_THROW(parse_use_case(4), ConfigError);
    EXPECT_THROW(parse_handoff_mode("carrier-pigeon"), ConfigError);
    EXPECT_THROW(run_detector(w.reference, w.data, config(UseCase::uc1, ContextKind::plain, 1, 7)),
                 ConfigError);
    EXPECT_THROW(run_detector(w.reference, w.data, config(UseCase::uc3, ContextKind::plain, 0)),
                 ConfigError);
}

TEST(Detector, ManifestShape)
{
    const auto w = canonical_workload();
    const auto cfg = config(UseCase::uc2, ContextKind::simulated);
    const auto run = run_detector(w.reference, w.data, cfg);
    const auto j = manifest(run, cfg);
    EXPECT_EQ(j["config"]["use_case"], 2);
    EXPECT_EQ(j["config"]["context"]["kind"], "simulated");
    EXPECT_EQ(j["phases"].size(), 2u);
    EXPECT_EQ(j["phases"][1]["ops"]["programmable_bootstrap"], run.phases[1].ops.pbs);
    EXPECT_EQ(j["total_ops"]["total"], run.total_ops().total());
    EXPECT_EQ(j["anomalies"], run.anomalies());
    EXPECT_EQ(j["labels"].size(), 24u);
    EXPECT_EQ(j["histogram"]["counts"].size(), 10u);
    EXPECT_TRUE(j["instrumented"].get<bool>());
}

TEST(Detector, RandomConfigsAgreeAcrossContextsAndOracle)
{
    Rng rng(2024);
    const int buckets[] = {5, 10, 20, 50};
    const UseCase ucs[] = {UseCase::uc1, UseCase::uc2, UseCase::uc3};
    for (int i = 0; i < 500; ++i) {
        const int days = 1 + static_cast<int>(uniform_below(rng, 2));
        const int b = buckets[uniform_below(rng, 4)];
        const int th = 1 + static_cast<int>(uniform_below(rng, 3));
        const auto w = random_workload(rng, days);
        auto cfg = config(ucs[i % 3], ContextKind::plain, days, b, th);
        cfg.handoff = i % 2 ? HandoffMode::reencrypt : HandoffMode::shared_keys;
        cfg.context.rng_seed = static_cast<std::uint64_t>(i);
        const auto expected = oracle_labels(w, cfg);
        ASSERT_EQ(run_detector(w.reference, w.data, cfg).labels, expected) << i;
        cfg.context.kind = ContextKind::simulated;
        ASSERT_EQ(run_detector(w.reference, w.data, cfg).labels, expected) << i;
    }
}

}  // namespace
}  // namespace hegram
