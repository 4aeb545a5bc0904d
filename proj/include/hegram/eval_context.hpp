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

#include <concepts>
#include <cstdint>
#include <string>
#include <string_view>

#include "hegram/errors.hpp"
#include "hegram/lookup_table.hpp"
#include "hegram/op_counter.hpp"

namespace hegram {

enum class ContextKind { plain, simulated, native };

inline std::string_view to_string(ContextKind k)
{
    switch (k) {
    case ContextKind::plain:
        return "plain";
    case ContextKind::simulated:
        return "simulated";
    case ContextKind::native:
        return "native";
    }
    return "?";
}

inline ContextKind parse_context_kind(std::string_view s)
{
    if (s == "plain")
        return ContextKind::plain;
    if (s == "simulated")
        return ContextKind::simulated;
    if (s == "native")
        return ContextKind::native;
    throw ConfigError("unknown context kind '" + std::string(s) + "'");
}

/// Exact rational probability num/den.
struct Probability {
    std::uint64_t num = 1;
    std::uint64_t den = 100000;

    constexpr double value() const noexcept
    {
        return static_cast<double>(num) / static_cast<double>(den);
    }

    friend constexpr bool operator==(const Probability&, const Probability&) = default;
};

struct ContextConfig {
    ContextKind kind = ContextKind::simulated;
    // Lookup failure injection. Off by default so runs are reproducible.
    bool failure_injection = false;
    Probability failure_probability{1, 100000};
    // Additions a fresh ciphertext can absorb before it must be bootstrapped.
    std::uint32_t noise_budget = 8;
    std::uint64_t rng_seed = 0;
};

inline void validate(const ContextConfig& cfg)
{
    if (cfg.failure_probability.den == 0 ||
        cfg.failure_probability.num > cfg.failure_probability.den)
        throw ConfigError("failure probability must lie in [0, 1]");
    if (cfg.noise_budget == 0)
        throw ConfigError("noise budget must be positive");
}

/// The arithmetic substrate every circuit in the library is written against.
///
/// A context exposes exactly what a TFHE server can do: add two values, add
/// a clear constant (constant() produces a trivial value that add() treats as
/// clear), apply a univariate lookup table, and refresh a value whose noise
/// budget is exhausted. There is no multiplication, division or branching on
/// values. refresh() is a no-op where noise does not exist.
template <class C>
concept EvalContext =
    requires(C& ctx, const typename C::value_type& v, const LookupTable& t) {
        typename C::value_type;
        { ctx.constant(std::uint8_t{}) } -> std::same_as<typename C::value_type>;
        { ctx.add(v, v) } -> std::same_as<typename C::value_type>;
        { ctx.lookup(v, t) } -> std::same_as<typename C::value_type>;
        { ctx.refresh(v) } -> std::same_as<typename C::value_type>;
        { ctx.snapshot_counts() } -> std::same_as<OpCounter>;
        ctx.reset_counts();
    };

template <EvalContext C>
OpCounter snapshot_counts(const C& ctx)
{
    return ctx.snapshot_counts();
}

template <EvalContext C>
void reset_counts(C& ctx)
{
    ctx.reset_counts();
}

/// Plain-integer oracle. Values are ordinary integers; nothing is counted.
class PlainContext {
public:
    using value_type = std::int64_t;

    value_type constant(std::uint8_t k) const { return k; }

    value_type add(value_type a, value_type b) const { return a + b; }

    value_type lookup(value_type x, const LookupTable& t) const
    {
        if (!in_plaintext_domain(x))
            throw DomainError("lookup input " + std::to_string(x) +
                              " outside the 8-bit domain");
        return t[static_cast<std::size_t>(x)];
    }

    value_type refresh(value_type v) const { return v; }

    OpCounter snapshot_counts() const { return {}; }
    void reset_counts() {}
    static constexpr bool instrumented() { return false; }
};

static_assert(EvalContext<PlainContext>);

}  // namespace hegram
