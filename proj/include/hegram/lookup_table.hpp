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

#include <array>
#include <cstddef>
#include <cstdint>

namespace hegram {

/// Width of the plaintext domain in bits. Every value a circuit touches,
/// inputs, intermediates and outputs, lives in [0, 2^kPlaintextBits).
inline constexpr int kPlaintextBits = 8;
inline constexpr int kPlaintextSize = 1 << kPlaintextBits;
inline constexpr int kPlaintextMax = kPlaintextSize - 1;

constexpr bool in_plaintext_domain(long long x) noexcept
{
    return x >= 0 && x <= kPlaintextMax;
}

/// A total function over the 8-bit plaintext domain. This is the only way
/// circuits evaluate anything that is not an addition.
class LookupTable {
public:
    constexpr LookupTable() = default;

    template <class F>
    static constexpr LookupTable from(F&& f)
    {
        LookupTable t;
        for (int x = 0; x < kPlaintextSize; ++x)
            t.entries_[static_cast<std::size_t>(x)] =
                static_cast<std::uint8_t>(f(x));
        return t;
    }

    static constexpr LookupTable identity()
    {
        return from([](int x) { return x; });
    }

    constexpr std::uint8_t operator[](std::size_t x) const { return entries_[x]; }

    constexpr const std::array<std::uint8_t, kPlaintextSize>& entries() const
    {
        return entries_;
    }

    friend constexpr bool operator==(const LookupTable&, const LookupTable&) = default;

private:
    std::array<std::uint8_t, kPlaintextSize> entries_{};
};

}  // namespace hegram
