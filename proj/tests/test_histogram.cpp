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

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <set>
#include <vector>

#include "hegram/histogram.hpp"
#include "hegram/random.hpp"
#include "hegram/simulated.hpp"
#include "oracle.hpp"

namespace hegram {
namespace {

using Vec = std::vector<std::int64_t>;

Vec to_plain(const std::vector<int>& xs)
{
    return Vec(xs.begin(), xs.end());
}

// Client + server for the simulated context, with helpers to move vectors
// across the encryption boundary.
struct Sim {
    KeyPair keys = keygen({ContextKind::simulated, false, {1, 100000}, 8, 42});
    SimulatedContext ctx{keys.eval};

    std::vector<Ciphertext> enc(const Vec& xs) const
    {
        std::vector<Ciphertext> out;
        for (auto x : xs)
            out.push_back(encrypt(keys, x));
        return out;
    }
    Vec dec(const std::vector<Ciphertext>& cs) const
    {
        Vec out;
        for (const auto& c : cs)
            out.push_back(decrypt(keys, c));
        return out;
    }
};

TEST(MakeLayout, TenBucketsOverHundred)
{
    const auto l = make_layout(0, 100, 10);
    ASSERT_EQ(l.size(), 10u);
    EXPECT_EQ(l.lows(), (std::vector<int>{0, 10, 20, 30, 40, 50, 60, 70, 80, 90}));
    EXPECT_EQ(l.highs(), (std::vector<int>{10, 20, 30, 40, 50, 60, 70, 80, 90, 100}));
    EXPECT_EQ(l.width(), 10);
}

TEST(MakeLayout, SingleBucket)
{
    const auto l = make_layout(0, 100, 100);
    ASSERT_EQ(l.size(), 1u);
    EXPECT_EQ(l.lows()[0], 0);
    EXPECT_EQ(l.highs()[0], 100);
}

TEST(MakeLayout, NonDivisibleRangeNamesValues)
{
    try {
        make_layout(0, 100, 7);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("min=0"), std::string::npos);
        EXPECT_NE(msg.find("max=100"), std::string::npos);
        EXPECT_NE(msg.find("bucket_width=7"), std::string::npos);
    }
    EXPECT_THROW(make_layout(10, 10, 1), ConfigError);
    EXPECT_THROW(make_layout(0, 100, 0), ConfigError);
    EXPECT_THROW(make_layout(0, 300, 10), ConfigError);
    EXPECT_THROW(make_layout_with_buckets(0, 100, 3), ConfigError);
}

TEST(MakeLayout, InvariantsHoldForEveryDivisor)
{
    for (int w = 1; w <= 100; ++w) {
        if (100 % w != 0)
            continue;
        const auto l = make_layout(0, 100, w);
        ASSERT_EQ(l.lows().size(), l.highs().size());
        EXPECT_EQ(l.lows().front(), 0);
        EXPECT_EQ(l.highs().back(), 100);
        for (std::size_t i = 0; i < l.size(); ++i) {
            EXPECT_EQ(l.highs()[i] - l.lows()[i], w);
            if (i + 1 < l.size()) {
                EXPECT_EQ(l.highs()[i], l.lows()[i + 1]);
            }
        }
    }
}

TEST(IsInBucket, HalfOpenInterval)
{
    EXPECT_EQ(is_in_bucket(41, 40, 50), 1);
    EXPECT_EQ(is_in_bucket(50, 40, 50), 0);
    EXPECT_EQ(is_in_bucket(40, 40, 50), 1);
    EXPECT_EQ(is_in_bucket(39, 40, 50), 0);
}

TEST(VectorialIsInBucket, Examples)
{
    const auto l = make_layout(0, 100, 10);
    PlainContext ctx;
    EXPECT_EQ(vectorial_is_in_bucket<PlainContext>(41, l, ctx), (Vec{0, 0, 0, 0, 1, 0, 0, 0, 0, 0}));
    EXPECT_EQ(vectorial_is_in_bucket<PlainContext>(0, l, ctx), (Vec{1, 0, 0, 0, 0, 0, 0, 0, 0, 0}));
    EXPECT_EQ(vectorial_is_in_bucket<PlainContext>(105, l, ctx), Vec(10, 0));
}

TEST(VectorialIsInBucket, OneHotOnEveryInRangeValueBothContexts)
{
    Sim sim;
    PlainContext plain;
    for (int width : {1, 2, 5, 10, 20, 25, 50, 100}) {
        const auto l = make_layout(0, 100, width);
        for (int x = 0; x < 100; ++x) {
            const auto bits = vectorial_is_in_bucket<PlainContext>(x, l, plain);
            ASSERT_EQ(std::count(bits.begin(), bits.end(), 1), 1) << x;
            ASSERT_EQ(reduce_sum<PlainContext>(bits, plain), 1);
            for (std::size_t i = 0; i < l.size(); ++i)
                ASSERT_EQ(bits[i], is_in_bucket(x, l.lows()[i], l.highs()[i]));
            if (width == 10) {
                const auto enc = vectorial_is_in_bucket(encrypt(sim.keys, x), l, sim.ctx);
                ASSERT_EQ(sim.dec(enc), bits);
            }
        }
    }
}

TEST(VectorialIsInBucket, ChargesOneLookupPerBucket)
{
    Sim sim;
    const auto l = make_layout(0, 100, 10);
    vectorial_is_in_bucket(encrypt(sim.keys, 41), l, sim.ctx);
    const auto c = sim.ctx.snapshot_counts();
    EXPECT_EQ(c.pbs, 10u);
    EXPECT_EQ(c.key_switch, 10u);
    EXPECT_EQ(c.total(), 20u);
}

TEST(VectorAdd, Examples)
{
    PlainContext ctx;
    EXPECT_EQ(vector_add<PlainContext>(Vec{1, 0, 2}, Vec{0, 1, 3}, ctx), (Vec{1, 1, 5}));
    const Vec u{4, 7, 9, 0};
    EXPECT_EQ(vector_add<PlainContext>(u, Vec(4, 0), ctx), u);
    EXPECT_THROW(vector_add<PlainContext>(Vec{1}, Vec{1, 2}, ctx), DimensionError);
}

TEST(VectorAdd, SumOfBitVectorsIsPopcount)
{
    Rng rng(11);
    Sim sim;
    PlainContext plain;
    constexpr std::size_t n = 16;
    for (int trial = 0; trial < 20; ++trial) {
        const int m = static_cast<int>(uniform_int(rng, 1, 30));
        std::vector<Vec> rows;
        for (int j = 0; j < m; ++j) {
            Vec r(n);
            for (auto& b : r)
                b = static_cast<std::int64_t>(rng() & 1);
            rows.push_back(r);
        }
        // Scalar-loop oracle.
        Vec expected(n, 0);
        for (const auto& r : rows)
            for (std::size_t i = 0; i < n; ++i)
                expected[i] += r[i];

        Vec acc(n, 0);
        auto enc_acc = sim.enc(acc);
        for (const auto& r : rows) {
            acc = vector_add<PlainContext>(acc, r, plain);
            enc_acc = vector_add<SimulatedContext>(enc_acc, sim.enc(r), sim.ctx);
        }
        EXPECT_EQ(acc, expected);
        EXPECT_EQ(sim.dec(enc_acc), expected);
    }
}

TEST(VectorAdd, CommutativeAndAssociative)
{
    Rng rng(5);
    PlainContext ctx;
    for (int trial = 0; trial < 200; ++trial) {
        const auto n = static_cast<std::size_t>(uniform_int(rng, 0, 12));
        Vec a(n), b(n), c(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = uniform_int(rng, 0, 80);
            b[i] = uniform_int(rng, 0, 80);
            c[i] = uniform_int(rng, 0, 80);
        }
        EXPECT_EQ(vector_add<PlainContext>(a, b, ctx), vector_add<PlainContext>(b, a, ctx));
        EXPECT_EQ(vector_add<PlainContext>(vector_add<PlainContext>(a, b, ctx), c, ctx),
                  vector_add<PlainContext>(a, vector_add<PlainContext>(b, c, ctx), ctx));
    }
}

TEST(ReduceSum, Examples)
{
    PlainContext ctx;
    EXPECT_EQ(reduce_sum<PlainContext>(Vec{}, ctx), 0);
    EXPECT_EQ(reduce_sum<PlainContext>(Vec{0, 1, 0}, ctx), 1);

    Sim sim;
    EXPECT_EQ(decrypt(sim.keys, reduce_sum<SimulatedContext>({}, sim.ctx)), 0);
}

TEST(ReduceSum, SixtyFourBytesMatchScalarLoop)
{
    Rng rng(64);
    PlainContext ctx;
    for (int trial = 0; trial < 50; ++trial) {
        Vec v(64);
        for (auto& x : v)
            x = uniform_int(rng, 0, 255);
        std::int64_t expected = 0;
        for (auto x : v)
            expected += x;
        EXPECT_EQ(reduce_sum<PlainContext>(v, ctx), expected);
    }
}

TEST(ReduceSum, EncryptedSumWithinDomain)
{
    Rng rng(3);
    Sim sim;
    for (int trial = 0; trial < 50; ++trial) {
        Vec v(static_cast<std::size_t>(uniform_int(rng, 1, 40)));
        for (auto& x : v)
            x = uniform_int(rng, 0, 6);
        const auto expected = std::accumulate(v.begin(), v.end(), std::int64_t{0});
        EXPECT_EQ(decrypt(sim.keys, reduce_sum<SimulatedContext>(sim.enc(v), sim.ctx)), expected);
    }
}

TEST(BuildHistogram, Examples)
{
    const auto l = make_layout(0, 100, 10);
    PlainContext ctx;
    const auto h = build_histogram<PlainContext>(Vec{5, 15, 15, 95}, l, ctx);
    EXPECT_EQ(h.counts, (Vec{1, 2, 0, 0, 0, 0, 0, 0, 0, 1}));
    EXPECT_EQ(build_histogram<PlainContext>(Vec{}, l, ctx).counts, Vec(10, 0));
}

TEST(BuildHistogram, MatchesNaiveOracleOnRandomInputs)
{
    Rng rng(200);
    PlainContext ctx;
    Sim sim;
    for (int trial = 0; trial < 1000; ++trial) {
        const int width = std::vector<int>{5, 10, 20, 25, 50}[uniform_below(rng, 5)];
        const auto l = make_layout(0, 100, width);
        std::vector<int> data(static_cast<std::size_t>(uniform_int(rng, 0, 200)));
        for (auto& x : data)
            x = static_cast<int>(uniform_int(rng, 0, 99));
        const auto expected = oracle::counts_of(oracle::naive_histogram(data, 0, 100, width));
        const auto h = build_histogram<PlainContext>(to_plain(data), l, ctx);
        ASSERT_EQ(h.counts, to_plain(expected));
        ASSERT_EQ(std::accumulate(h.counts.begin(), h.counts.end(), std::int64_t{0}),
                  static_cast<std::int64_t>(data.size()));
        if (trial % 50 == 0 && data.size() <= 255) {
            const auto eh = build_histogram<SimulatedContext>(sim.enc(to_plain(data)), l, sim.ctx);
            ASSERT_EQ(sim.dec(eh.counts), h.counts);
        }
    }
}

TEST(IsInAbnormalBucket, Examples)
{
    EXPECT_EQ(is_in_abnormal_bucket(41, 40, 50, 1, Threshold(2)), 1);
    EXPECT_EQ(is_in_abnormal_bucket(62, 60, 70, 7, Threshold(2)), 0);
    EXPECT_EQ(is_in_abnormal_bucket(41, 60, 70, 0, Threshold(2)), 0);
    // strict comparison
    EXPECT_EQ(is_in_abnormal_bucket(41, 40, 50, 2, Threshold(2)), 0);
}

TEST(VectorialIsInAbnormalBucket, Examples)
{
    const auto l = make_layout(0, 100, 10);
    PlainContext ctx;
    Vec counts{0, 0, 0, 0, 1, 0, 0, 0, 0, 0};
    EXPECT_EQ(vectorial_is_in_abnormal_bucket<PlainContext>(41, l, counts, Threshold(2), ctx),
              (Vec{0, 0, 0, 0, 1, 0, 0, 0, 0, 0}));
    counts[4] = 5;
    EXPECT_EQ(vectorial_is_in_abnormal_bucket<PlainContext>(41, l, counts, Threshold(2), ctx),
              Vec(10, 0));
    EXPECT_THROW(vectorial_is_in_abnormal_bucket<PlainContext>(41, l, Vec(9, 0), Threshold(2), ctx),
                 DimensionError);
}

TEST(VectorialIsInAbnormalBucket, MatchesElementwiseOracleOnRandomGrid)
{
    Rng rng(77);
    PlainContext ctx;
    Sim sim;
    for (int trial = 0; trial < 400; ++trial) {
        const int width = std::vector<int>{2, 5, 10, 20, 50}[uniform_below(rng, 5)];
        const auto l = make_layout(0, 100, width);
        const int x = static_cast<int>(uniform_int(rng, 0, 120));
        const Threshold th(static_cast<int>(uniform_int(rng, 0, 5)));
        Vec counts(l.size());
        for (auto& c : counts)
            c = uniform_int(rng, 0, 6);
        const auto bits = vectorial_is_in_abnormal_bucket<PlainContext>(x, l, counts, th, ctx);
        ASSERT_LE(std::count(bits.begin(), bits.end(), 1), 1);
        for (std::size_t i = 0; i < l.size(); ++i)
            ASSERT_EQ(bits[i], is_in_abnormal_bucket(x, l.lows()[i], l.highs()[i], counts[i], th));
        if (trial % 20 == 0) {
            const auto enc = vectorial_is_in_abnormal_bucket<SimulatedContext>(
                encrypt(sim.keys, x), l, sim.enc(counts), th, sim.ctx);
            ASSERT_EQ(sim.dec(enc), bits);
        }
    }
}

TEST(LabelSamples, FrequentAndRareBuckets)
{
    const auto l = make_layout(0, 100, 10);
    PlainContext ctx;
    Histogram h{l, {0, 0, 0, 0, 1, 0, 7, 0, 0, 0}};
    EXPECT_EQ(label_samples<PlainContext>(Vec{41, 62}, h, Threshold(2), ctx), (Vec{1, 0}));
    EXPECT_EQ(label_samples<PlainContext>(Vec{41, 62, 0, 99}, h, Threshold(0), ctx), Vec(4, 0));
}

TEST(LabelSamples, MatchesNaiveOracleOnRandomFixtures)
{
    Rng rng(1234);
    PlainContext ctx;
    for (int trial = 0; trial < 1000; ++trial) {
        const int width = std::vector<int>{2, 5, 10, 20, 50}[uniform_below(rng, 5)];
        const auto l = make_layout(0, 100, width);
        std::vector<int> ref(static_cast<std::size_t>(uniform_int(rng, 0, 48)));
        for (auto& x : ref)
            x = static_cast<int>(uniform_int(rng, 0, 99));
        std::vector<int> data(static_cast<std::size_t>(uniform_int(rng, 0, 48)));
        for (auto& x : data)
            x = static_cast<int>(uniform_int(rng, 0, 99));
        const int th = static_cast<int>(uniform_int(rng, 0, 4));

        const auto naive = oracle::naive_histogram(ref, 0, 100, width);
        const auto expected = oracle::naive_labels(data, naive, th);
        const auto h = build_histogram<PlainContext>(to_plain(ref), l, ctx);
        const auto labels = label_samples<PlainContext>(to_plain(data), h, Threshold(th), ctx);
        ASSERT_EQ(labels, Vec(expected.begin(), expected.end()));
    }
}

TEST(LabelSamples, ThresholdMonotonicity)
{
    Rng rng(99);
    PlainContext ctx;
    const auto l = make_layout(0, 100, 10);
    for (int trial = 0; trial < 300; ++trial) {
        Vec ref(24), data(24);
        for (auto& x : ref)
            x = uniform_int(rng, 0, 99);
        for (auto& x : data)
            x = uniform_int(rng, 0, 99);
        const auto h = build_histogram<PlainContext>(ref, l, ctx);
        Vec prev(24, 0);
        for (int th = 0; th <= 6; ++th) {
            const auto labels = label_samples<PlainContext>(data, h, Threshold(th), ctx);
            for (std::size_t i = 0; i < labels.size(); ++i)
                ASSERT_LE(prev[i], labels[i]) << "th=" << th;
            prev = labels;
        }
    }
}

TEST(LabelSamples, ContextEquivalence)
{
    Rng rng(8);
    PlainContext plain;
    Sim sim;
    for (int trial = 0; trial < 40; ++trial) {
        const auto l = make_layout_with_buckets(0, 100, std::vector<int>{5, 10, 20, 50}[trial % 4]);
        Vec ref(24), data(24);
        for (auto& x : ref)
            x = uniform_int(rng, 0, 99);
        for (auto& x : data)
            x = uniform_int(rng, 0, 99);
        const Threshold th(static_cast<int>(uniform_int(rng, 1, 3)));
        const auto h = build_histogram<PlainContext>(ref, l, plain);
        const auto eh = build_histogram<SimulatedContext>(sim.enc(ref), l, sim.ctx);
        ASSERT_EQ(sim.dec(eh.counts), h.counts);
        const auto labels = label_samples<PlainContext>(data, h, th, plain);
        const auto enc = label_samples<SimulatedContext>(sim.enc(data), eh, th, sim.ctx);
        ASSERT_EQ(sim.dec(enc), labels);
        for (auto v : labels)
            ASSERT_TRUE(v == 0 || v == 1);
    }
}

}  // namespace
}  // namespace hegram
