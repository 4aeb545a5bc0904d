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

// Equi-width histogram construction and frequency-threshold labelling,
// written once against EvalContext so the same code runs on plain integers
// and on ciphertexts.
//
// Everything data-dependent goes through ctx.add / ctx.lookup. Bucket bounds
// and the threshold are public circuit parameters and are baked into lookup
// tables, never compared at run time.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hegram/errors.hpp"
#include "hegram/eval_context.hpp"
#include "hegram/lookup_table.hpp"

namespace hegram {

/// Contiguous equal-width buckets [low_i, high_i).
class BucketLayout {
public:
    int min() const noexcept { return min_; }
    int max() const noexcept { return max_; }
    int width() const noexcept { return width_; }
    std::size_t size() const noexcept { return lows_.size(); }
    const std::vector<int>& lows() const noexcept { return lows_; }
    const std::vector<int>& highs() const noexcept { return highs_; }

    /// Lookup table realizing membership of bucket i.
    const LookupTable& membership(std::size_t i) const { return membership_.at(i); }

    friend bool operator==(const BucketLayout& a, const BucketLayout& b)
    {
        return a.lows_ == b.lows_ && a.highs_ == b.highs_;
    }

private:
    friend BucketLayout make_layout(int min, int max, int bucket_width);

    int min_ = 0;
    int max_ = 0;
    int width_ = 0;
    std::vector<int> lows_;
    std::vector<int> highs_;
    std::vector<LookupTable> membership_;
};

constexpr int is_in_bucket(long long x, long long low, long long high) noexcept
{
    return low <= x && x < high ? 1 : 0;
}

/// Builds [min, min+w), [min+w, min+2w), ..., [max-w, max). The range must
/// lie inside the plaintext domain and divide evenly into buckets.
inline BucketLayout make_layout(int min, int max, int bucket_width)
{
    const auto values = "(min=" + std::to_string(min) + ", max=" + std::to_string(max) +
                        ", bucket_width=" + std::to_string(bucket_width) + ")";
    if (min >= max)
        throw ConfigError("layout needs min < max " + values);
    if (bucket_width <= 0)
        throw ConfigError("layout needs a positive bucket width " + values);
    if (min < 0 || max > kPlaintextSize)
        throw ConfigError("layout must lie within [0, 256] " + values);
    if ((max - min) % bucket_width != 0)
        throw ConfigError("range max - min is not a multiple of the bucket width " +
                          values);

    BucketLayout l;
    l.min_ = min;
    l.max_ = max;
    l.width_ = bucket_width;
    for (int low = min; low < max; low += bucket_width) {
        const int high = low + bucket_width;
        l.lows_.push_back(low);
        l.highs_.push_back(high);
        l.membership_.push_back(
            LookupTable::from([=](int x) { return is_in_bucket(x, low, high); }));
    }
    return l;
}

/// Layout with a given bucket count; the count must divide the range.
inline BucketLayout make_layout_with_buckets(int min, int max, int num_buckets)
{
    if (num_buckets <= 0 || (max - min) % num_buckets != 0)
        throw ConfigError("bucket count " + std::to_string(num_buckets) +
                          " does not divide the range [" + std::to_string(min) + ", " +
                          std::to_string(max) + ")");
    return make_layout(min, max, (max - min) / num_buckets);
}

/// Frequency threshold: a bucket is abnormal when its count is strictly below.
struct Threshold {
    int value = 2;

    constexpr Threshold() = default;
    constexpr explicit Threshold(int v) : value(v)
    {
        if (v < 0 || v > kPlaintextSize)
            throw ConfigError("threshold must lie in [0, 256]");
    }

    friend constexpr bool operator==(Threshold, Threshold) = default;
};

template <class V>
struct HistogramOf {
    BucketLayout layout;
    std::vector<V> counts;
};

using Histogram = HistogramOf<std::int64_t>;

constexpr int is_in_abnormal_bucket(long long x, long long low, long long high,
                                    long long count, Threshold th) noexcept
{
    return is_in_bucket(x, low, high) && count < th.value ? 1 : 0;
}

namespace detail {

inline LookupTable below_threshold_table(Threshold th)
{
    return LookupTable::from([v = th.value](int c) { return c < v ? 1 : 0; });
}

// Conjunction of two bits already summed: 1 + 1 == 2.
inline const LookupTable& both_set_table()
{
    static const LookupTable t = LookupTable::from([](int s) { return s == 2 ? 1 : 0; });
    return t;
}

template <EvalContext C>
std::vector<typename C::value_type> abnormal_bits(const typename C::value_type& x,
                                                  const BucketLayout& layout,
                                                  std::span<const typename C::value_type> counts,
                                                  const LookupTable& below, C& ctx)
{
    std::vector<typename C::value_type> r;
    r.reserve(layout.size());
    for (std::size_t i = 0; i < layout.size(); ++i) {
        auto in = ctx.lookup(x, layout.membership(i));
        auto rare = ctx.lookup(counts[i], below);
        auto both = ctx.refresh(ctx.add(in, rare));
        r.push_back(ctx.lookup(both, both_set_table()));
    }
    return r;
}

}  // namespace detail

/// One lookup per bucket; the result is one-hot for x inside the layout.
template <EvalContext C>
std::vector<typename C::value_type> vectorial_is_in_bucket(const typename C::value_type& x,
                                                           const BucketLayout& layout, C& ctx)
{
    std::vector<typename C::value_type> r;
    r.reserve(layout.size());
    for (std::size_t i = 0; i < layout.size(); ++i)
        r.push_back(ctx.lookup(x, layout.membership(i)));
    return r;
}

template <EvalContext C>
std::vector<typename C::value_type> vector_add(std::span<const typename C::value_type> u,
                                               std::span<const typename C::value_type> v,
                                               C& ctx)
{
    if (u.size() != v.size())
        throw DimensionError("vector_add on lengths " + std::to_string(u.size()) +
                             " and " + std::to_string(v.size()));
    std::vector<typename C::value_type> w;
    w.reserve(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        w.push_back(ctx.refresh(ctx.add(u[i], v[i])));
    return w;
}

/// Right fold x0 + (x1 + (... + (x_{n-1} + 0))). The empty sum is the
/// clear constant 0.
template <EvalContext C>
typename C::value_type reduce_sum(std::span<const typename C::value_type> v, C& ctx)
{
    auto acc = ctx.constant(0);
    for (auto it = v.rbegin(); it != v.rend(); ++it)
        acc = ctx.refresh(ctx.add(*it, acc));
    return acc;
}

/// h = [0...0]; h = h + vectorial_is_in_bucket(x_i) for every sample.
/// Samples are expected to be clamped into the layout already; anything
/// outside contributes to no bucket.
template <EvalContext C>
HistogramOf<typename C::value_type> build_histogram(std::span<const typename C::value_type> data,
                                                    const BucketLayout& layout, C& ctx)
{
    std::vector<typename C::value_type> h(layout.size(), ctx.constant(0));
    for (const auto& x : data) {
        const auto bits = vectorial_is_in_bucket(x, layout, ctx);
        h = vector_add<C>(h, bits, ctx);
    }
    return {layout, std::move(h)};
}

/// At most one element is 1: the bucket holding x, and only if its count is
/// below the threshold.
template <EvalContext C>
std::vector<typename C::value_type> vectorial_is_in_abnormal_bucket(
    const typename C::value_type& x, const BucketLayout& layout,
    std::span<const typename C::value_type> counts, Threshold th, C& ctx)
{
    if (counts.size() != layout.size())
        throw DimensionError("histogram has " + std::to_string(counts.size()) +
                             " counts for " + std::to_string(layout.size()) + " buckets");
    return detail::abnormal_bits(x, layout, counts, detail::below_threshold_table(th), ctx);
}

/// Per-sample labels, 1 = abnormal.
template <EvalContext C>
std::vector<typename C::value_type> label_samples(std::span<const typename C::value_type> data,
                                                  const HistogramOf<typename C::value_type>& hist,
                                                  Threshold th, C& ctx)
{
    if (hist.counts.size() != hist.layout.size())
        throw DimensionError("histogram counts do not match its layout");
    const auto below = detail::below_threshold_table(th);
    std::vector<typename C::value_type> labels;
    labels.reserve(data.size());
    for (const auto& x : data) {
        const auto bits = detail::abnormal_bits<C>(x, hist.layout, hist.counts, below, ctx);
        labels.push_back(reduce_sum<C>(bits, ctx));
    }
    return labels;
}

}  // namespace hegram
