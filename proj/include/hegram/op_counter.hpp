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
#include <ostream>

namespace hegram {

/// Operation tally in the categories a TFHE circuit report uses.
struct OpCounter {
    std::uint64_t pbs = 0;
    std::uint64_t key_switch = 0;
    std::uint64_t clear_add = 0;
    std::uint64_t encrypted_add = 0;
    std::uint64_t clear_mul = 0;
    std::uint64_t encrypted_neg = 0;

    constexpr std::uint64_t total() const noexcept
    {
        return pbs + key_switch + clear_add + encrypted_add + clear_mul +
               encrypted_neg;
    }

    constexpr OpCounter& operator+=(const OpCounter& o) noexcept
    {
        pbs += o.pbs;
        key_switch += o.key_switch;
        clear_add += o.clear_add;
        encrypted_add += o.encrypted_add;
        clear_mul += o.clear_mul;
        encrypted_neg += o.encrypted_neg;
        return *this;
    }

    friend constexpr OpCounter operator+(OpCounter a, const OpCounter& b) noexcept
    {
        return a += b;
    }

    friend constexpr bool operator==(const OpCounter&, const OpCounter&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const OpCounter& c)
{
    return os << "{pbs=" << c.pbs << ", key_switch=" << c.key_switch
              << ", clear_add=" << c.clear_add
              << ", encrypted_add=" << c.encrypted_add
              << ", clear_mul=" << c.clear_mul
              << ", encrypted_neg=" << c.encrypted_neg << "}";
}

}  // namespace hegram
