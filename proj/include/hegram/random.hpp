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

#include <cstdint>
#include <random>

namespace hegram {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// std::mt19937_64 output is fixed by the standard but the <random>
// distributions are not, so anything that feeds golden files draws through
// these helpers instead.
using Rng = std::mt19937_64;

inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n)
{
    return n == 0 ? 0 : rng() % n;
}

// Uniform integer in [lo, hi].
inline std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi)
{
    return lo + static_cast<std::int64_t>(
                    uniform_below(rng, static_cast<std::uint64_t>(hi - lo) + 1));
}

inline double uniform_unit(Rng& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace hegram
