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

// Executable model of a TFHE-style backend.
//
// Ciphertexts are one-dimensional LWE samples (a, b = a*s + delta*m + e)
// over Z_{2^32} with the 8-bit message in the top bits. That is enough for
// additions to be genuinely homomorphic; it is not a secure scheme. What the
// model enforces are the constraints a real TFHE circuit lives under:
// 8-bit plaintexts, a finite number of additions between bootstraps, every
// non-linear step as a table lookup that also refreshes noise, and a small
// probability that a lookup returns the wrong entry.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <limits>
#include <mutex>
#include <string>

#include "hegram/errors.hpp"
#include "hegram/eval_context.hpp"
#include "hegram/lookup_table.hpp"
#include "hegram/op_counter.hpp"
#include "hegram/random.hpp"

namespace hegram {

#ifdef HEGRAM_HAVE_NATIVE
inline constexpr bool kNativeAvailable = true;
#else
inline constexpr bool kNativeAvailable = false;
#endif

/// Client-held key. The only thing that can decrypt.
struct SecretKey {
    std::uint64_t key_id = 0;
    std::uint32_t s = 0;
    std::uint32_t noise_budget = 8;

    friend bool operator==(const SecretKey&, const SecretKey&) = default;
};

/// Server-side evaluation key. bootstrap_key stands in for the encrypted
/// secret a real bootstrapping key carries; only the context's lookup and
/// bootstrap paths unwrap it.
struct EvalKey {
    std::uint64_t key_id = 0;
    std::uint32_t bootstrap_key = 0;
    std::uint32_t noise_budget = 8;

    friend bool operator==(const EvalKey&, const EvalKey&) = default;
};

struct KeyPair {
    SecretKey secret;
    EvalKey eval;

    friend bool operator==(const KeyPair&, const KeyPair&) = default;
};

struct Ciphertext {
    static constexpr std::uint32_t kUnlimited =
        std::numeric_limits<std::uint32_t>::max();

    std::uint64_t key_id = 0;
    std::uint32_t mask = 0;
    std::uint32_t body = 0;
    // Additions left before a bootstrap is mandatory. kUnlimited for
    // trivial (clear) values.
    std::uint32_t noise_budget = 0;
    bool trivial = false;

    friend bool operator==(const Ciphertext&, const Ciphertext&) = default;
};

namespace detail {

inline constexpr int kDeltaShift = 32 - kPlaintextBits;
inline constexpr std::uint32_t kDelta = 1u << kDeltaShift;
inline constexpr std::uint32_t kNoiseBound = 256;

inline std::uint32_t wrap_secret(std::uint32_t s, std::uint64_t key_id)
{
    return s ^ static_cast<std::uint32_t>(splitmix64(key_id));
}

inline std::atomic<std::uint64_t>& nonce_counter()
{
    static std::atomic<std::uint64_t> n{0};
    return n;
}

inline Ciphertext fresh(std::uint64_t key_id, std::uint32_t s, int m,
                        std::uint32_t budget)
{
    const std::uint64_t h = splitmix64(
        s ^ splitmix64(nonce_counter().fetch_add(1, std::memory_order_relaxed) ^
                       key_id));
    const auto a = static_cast<std::uint32_t>(h);
    const auto e = static_cast<std::uint32_t>((h >> 32) % (2 * kNoiseBound + 1)) -
                   kNoiseBound;
    Ciphertext c;
    c.key_id = key_id;
    c.mask = a;
    c.body = a * s + kDelta * static_cast<std::uint32_t>(m) + e;
    c.noise_budget = budget;
    return c;
}

inline int phase_decode(const Ciphertext& c, std::uint32_t s)
{
    const std::uint32_t phase = c.body - c.mask * s;
    return static_cast<int>(((phase + kDelta / 2) >> kDeltaShift) &
                            static_cast<std::uint32_t>(kPlaintextMax));
}

inline void check_plaintext(long long x)
{
    if (!in_plaintext_domain(x))
        throw DomainError("plaintext " + std::to_string(x) +
                          " outside the 8-bit domain [0, 255]");
}

}  // namespace detail

/// Deterministic in cfg.rng_seed. Throws CapabilityError for the native kind
/// when no native backend was compiled in.
inline KeyPair keygen(const ContextConfig& cfg)
{
    validate(cfg);
    if (cfg.kind == ContextKind::native && !kNativeAvailable)
        throw CapabilityError("native FHE adapter not built into this binary");
    Rng rng(cfg.rng_seed);
    const std::uint32_t s = static_cast<std::uint32_t>(rng()) | 1u;
    const std::uint64_t key_id = splitmix64(rng());
    KeyPair k;
    k.secret = {key_id, s, cfg.noise_budget};
    k.eval = {key_id, detail::wrap_secret(s, key_id), cfg.noise_budget};
    return k;
}

inline Ciphertext encrypt(const SecretKey& sk, long long x)
{
    detail::check_plaintext(x);
    return detail::fresh(sk.key_id, sk.s, static_cast<int>(x), sk.noise_budget);
}

inline Ciphertext encrypt(const KeyPair& k, long long x)
{
    return encrypt(k.secret, x);
}

inline std::uint8_t decrypt(const SecretKey& sk, const Ciphertext& c)
{
    if (c.key_id != sk.key_id)
        throw IntegrityError("ciphertext was not encrypted under this key");
    return static_cast<std::uint8_t>(detail::phase_decode(c, sk.s));
}

inline std::uint8_t decrypt(const KeyPair& k, const Ciphertext& c)
{
    return decrypt(k.secret, c);
}

/// Server-side evaluator holding only the evaluation key.
class SimulatedContext {
public:
    using value_type = Ciphertext;

    explicit SimulatedContext(EvalKey key, const ContextConfig& cfg = {})
        : key_(key),
          failure_injection_(cfg.failure_injection),
          failure_(cfg.failure_probability),
          rng_(splitmix64(cfg.rng_seed ^ 0x5eedfa11u))
    {
        validate(cfg);
    }

    const EvalKey& eval_key() const noexcept { return key_; }
    std::uint32_t full_budget() const noexcept { return key_.noise_budget; }

    Ciphertext constant(std::uint8_t k) const
    {
        Ciphertext c;
        c.key_id = key_.key_id;
        c.body = detail::kDelta * k;
        c.noise_budget = Ciphertext::kUnlimited;
        c.trivial = true;
        return c;
    }

    /// Homomorphic addition. Clear + encrypted counts as a clear add,
    /// clear + clear folds without being counted.
    Ciphertext add(const Ciphertext& a, const Ciphertext& b)
    {
        check_key(a);
        check_key(b);
        const int sum = plaintext(a) + plaintext(b);
        if (sum > kPlaintextMax)
            throw DomainError("encrypted addition overflows 8 bits (sum " +
                              std::to_string(sum) + ")");
        if (!a.trivial && a.noise_budget == 0)
            throw NoiseBudgetError("left operand noise budget exhausted");
        if (!b.trivial && b.noise_budget == 0)
            throw NoiseBudgetError("right operand noise budget exhausted");

        Ciphertext r;
        r.key_id = key_.key_id;
        r.mask = a.mask + b.mask;
        r.body = a.body + b.body;
        if (a.trivial && b.trivial) {
            r.trivial = true;
            r.noise_budget = Ciphertext::kUnlimited;
            return r;
        }
        r.noise_budget = std::min(a.noise_budget, b.noise_budget) - 1;
        if (a.trivial || b.trivial)
            counts_.clear_add.fetch_add(1, std::memory_order_relaxed);
        else
            counts_.encrypted_add.fetch_add(1, std::memory_order_relaxed);
        return r;
    }

    /// Programmable bootstrap: applies the table and resets the noise
    /// budget. Charged as one PBS plus one key switch.
    Ciphertext lookup(const Ciphertext& c, const LookupTable& table)
    {
        check_key(c);
        int out = table[static_cast<std::size_t>(plaintext(c))];
        if (failure_injection_ && draw_failure()) {
            const std::lock_guard lock(rng_mutex_);
            out = (out + 1 + static_cast<int>(uniform_below(rng_, kPlaintextMax))) &
                  kPlaintextMax;
        }
        counts_.pbs.fetch_add(1, std::memory_order_relaxed);
        counts_.key_switch.fetch_add(1, std::memory_order_relaxed);
        return reencrypt(out);
    }

    Ciphertext bootstrap(const Ciphertext& c)
    {
        check_key(c);
        counts_.pbs.fetch_add(1, std::memory_order_relaxed);
        return reencrypt(plaintext(c));
    }

    /// Bootstraps only when the budget is exhausted.
    Ciphertext refresh(const Ciphertext& c)
    {
        if (!c.trivial && c.noise_budget == 0)
            return bootstrap(c);
        return c;
    }

    OpCounter snapshot_counts() const
    {
        OpCounter o;
        o.pbs = counts_.pbs.load();
        o.key_switch = counts_.key_switch.load();
        o.clear_add = counts_.clear_add.load();
        o.encrypted_add = counts_.encrypted_add.load();
        o.clear_mul = counts_.clear_mul.load();
        o.encrypted_neg = counts_.encrypted_neg.load();
        return o;
    }

    void reset_counts()
    {
        counts_.pbs = 0;
        counts_.key_switch = 0;
        counts_.clear_add = 0;
        counts_.encrypted_add = 0;
        counts_.clear_mul = 0;
        counts_.encrypted_neg = 0;
    }

    static constexpr bool instrumented() { return true; }

private:
    struct AtomicCounts {
        std::atomic<std::uint64_t> pbs{0};
        std::atomic<std::uint64_t> key_switch{0};
        std::atomic<std::uint64_t> clear_add{0};
        std::atomic<std::uint64_t> encrypted_add{0};
        std::atomic<std::uint64_t> clear_mul{0};
        std::atomic<std::uint64_t> encrypted_neg{0};
    };

    std::uint32_t unwrapped_secret() const
    {
        return detail::wrap_secret(key_.bootstrap_key, key_.key_id);
    }

    void check_key(const Ciphertext& c) const
    {
        if (c.key_id != key_.key_id)
            throw IntegrityError("ciphertext key does not match evaluation key");
    }

    int plaintext(const Ciphertext& c) const
    {
        return detail::phase_decode(c, unwrapped_secret());
    }

    Ciphertext reencrypt(int m) const
    {
        return detail::fresh(key_.key_id, unwrapped_secret(), m, key_.noise_budget);
    }

    bool draw_failure()
    {
        if (failure_.num == 0)
            return false;
        const std::lock_guard lock(rng_mutex_);
        return uniform_below(rng_, failure_.den) < failure_.num;
    }

    EvalKey key_;
    bool failure_injection_;
    Probability failure_;
    AtomicCounts counts_;
    std::mutex rng_mutex_;
    Rng rng_;
};

static_assert(EvalContext<SimulatedContext>);

}  // namespace hegram
