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

// Versioned binary formats for keys and ciphertexts, and the on-disk key
// store: <root>/<context-id>/secret.bin and <root>/<context-id>/eval.bin.
//
// Every blob starts with a 4-byte magic and a one-byte format version; all
// integers are little-endian.
//
//   secret.bin  "HGSK" ver | key_id u64 | s u32 | noise_budget u32
//   eval.bin    "HGEK" ver | key_id u64 | bootstrap_key u32 | noise_budget u32
//   ciphertexts "HGCV" ver | key_id u64 | plaintext_bits u8 | count u32 |
//               count x (mask u32 | body u32 | noise_budget u32 | trivial u8)

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hegram/errors.hpp"
#include "hegram/simulated.hpp"

namespace hegram {

inline constexpr std::uint8_t kFormatVersion = 1;

namespace detail {

class ByteWriter {
public:
    void magic(std::string_view m) { bytes_.insert(bytes_.end(), m.begin(), m.end()); }
    void u8(std::uint8_t v) { bytes_.push_back(v); }
    void u32(std::uint32_t v)
    {
        for (int i = 0; i < 4; ++i)
            bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v)
    {
        for (int i = 0; i < 8; ++i)
            bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    std::vector<std::uint8_t> take() { return std::move(bytes_); }

private:
    std::vector<std::uint8_t> bytes_;
};

class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> b) : bytes_(b) {}

    void expect_header(std::string_view m)
    {
        need(m.size() + 1);
        if (!std::equal(m.begin(), m.end(), bytes_.begin() + pos_))
            throw IntegrityError("bad magic, expected '" + std::string(m) + "'");
        pos_ += m.size();
        const auto ver = u8();
        if (ver != kFormatVersion)
            throw IntegrityError("unsupported format version " + std::to_string(ver));
    }
    std::uint8_t u8()
    {
        need(1);
        return bytes_[pos_++];
    }
    std::uint32_t u32()
    {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(bytes_[pos_++]) << (8 * i);
        return v;
    }
    std::uint64_t u64()
    {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * i);
        return v;
    }
    void expect_end() const
    {
        if (pos_ != bytes_.size())
            throw IntegrityError("trailing bytes after blob");
    }

private:
    void need(std::size_t n) const
    {
        if (bytes_.size() - pos_ < n)
            throw IntegrityError("truncated blob");
    }

    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

inline std::vector<std::uint8_t> read_file(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    if (!in)
        throw KeyError("cannot open " + p.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::filesystem::path& p, std::span<const std::uint8_t> b)
{
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out)
        throw KeyError("cannot write " + p.string());
    out.write(reinterpret_cast<const char*>(b.data()),
              static_cast<std::streamsize>(b.size()));
}

}  // namespace detail

inline std::vector<std::uint8_t> serialize(const SecretKey& k)
{
    detail::ByteWriter w;
    w.magic("HGSK");
    w.u8(kFormatVersion);
    w.u64(k.key_id);
    w.u32(k.s);
    w.u32(k.noise_budget);
    return w.take();
}

inline std::vector<std::uint8_t> serialize(const EvalKey& k)
{
    detail::ByteWriter w;
    w.magic("HGEK");
    w.u8(kFormatVersion);
    w.u64(k.key_id);
    w.u32(k.bootstrap_key);
    w.u32(k.noise_budget);
    return w.take();
}

inline SecretKey deserialize_secret_key(std::span<const std::uint8_t> b)
{
    detail::ByteReader r(b);
    r.expect_header("HGSK");
    SecretKey k;
    k.key_id = r.u64();
    k.s = r.u32();
    k.noise_budget = r.u32();
    r.expect_end();
    return k;
}

inline EvalKey deserialize_eval_key(std::span<const std::uint8_t> b)
{
    detail::ByteReader r(b);
    r.expect_header("HGEK");
    EvalKey k;
    k.key_id = r.u64();
    k.bootstrap_key = r.u32();
    k.noise_budget = r.u32();
    r.expect_end();
    return k;
}

/// All ciphertexts must share one key.
inline std::vector<std::uint8_t> serialize(std::span<const Ciphertext> cts,
                                           std::uint64_t key_id)
{
    detail::ByteWriter w;
    w.magic("HGCV");
    w.u8(kFormatVersion);
    w.u64(key_id);
    w.u8(kPlaintextBits);
    w.u32(static_cast<std::uint32_t>(cts.size()));
    for (const auto& c : cts) {
        if (c.key_id != key_id)
            throw IntegrityError("mixed keys in ciphertext vector");
        w.u32(c.mask);
        w.u32(c.body);
        w.u32(c.noise_budget);
        w.u8(c.trivial ? 1 : 0);
    }
    return w.take();
}

inline std::vector<Ciphertext> deserialize_ciphertexts(std::span<const std::uint8_t> b)
{
    detail::ByteReader r(b);
    r.expect_header("HGCV");
    const auto key_id = r.u64();
    if (r.u8() != kPlaintextBits)
        throw IntegrityError("plaintext domain width mismatch");
    const auto n = r.u32();
    std::vector<Ciphertext> out;
    out.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        Ciphertext c;
        c.key_id = key_id;
        c.mask = r.u32();
        c.body = r.u32();
        c.noise_budget = r.u32();
        c.trivial = r.u8() != 0;
        out.push_back(c);
    }
    r.expect_end();
    return out;
}

/// Directory of per-context key pairs.
class KeyStore {
public:
    explicit KeyStore(std::filesystem::path root) : root_(std::move(root)) {}

    /// HEGRAM_KEYSTORE if set, otherwise ./keys.
    static KeyStore from_environment()
    {
        if (const char* env = std::getenv("HEGRAM_KEYSTORE"); env && *env)
            return KeyStore(env);
        return KeyStore("keys");
    }

    const std::filesystem::path& root() const noexcept { return root_; }

    std::filesystem::path dir(std::string_view context_id) const
    {
        if (context_id.empty() || context_id.find('/') != std::string_view::npos ||
            context_id == "." || context_id == "..")
            throw ConfigError("invalid context id '" + std::string(context_id) + "'");
        return root_ / std::string(context_id);
    }

    void save(std::string_view context_id, const KeyPair& k) const
    {
        const auto d = dir(context_id);
        std::filesystem::create_directories(d);
        detail::write_file(d / "secret.bin", serialize(k.secret));
        detail::write_file(d / "eval.bin", serialize(k.eval));
    }

    bool contains(std::string_view context_id) const
    {
        const auto d = dir(context_id);
        return std::filesystem::exists(d / "secret.bin") &&
               std::filesystem::exists(d / "eval.bin");
    }

    EvalKey load_eval(std::string_view context_id) const
    {
        return deserialize_eval_key(detail::read_file(existing(context_id, "eval.bin")));
    }

    SecretKey load_secret(std::string_view context_id) const
    {
        return deserialize_secret_key(
            detail::read_file(existing(context_id, "secret.bin")));
    }

    KeyPair load(std::string_view context_id) const
    {
        KeyPair k{load_secret(context_id), load_eval(context_id)};
        if (k.secret.key_id != k.eval.key_id)
            throw IntegrityError("secret and evaluation keys in '" +
                                 std::string(context_id) + "' do not match");
        return k;
    }

private:
    std::filesystem::path existing(std::string_view context_id, const char* name) const
    {
        auto p = dir(context_id) / name;
        if (!std::filesystem::exists(p))
            throw KeyError("key store has no " + std::string(name) + " for context '" +
                           std::string(context_id) + "' under " + root_.string());
        return p;
    }

    std::filesystem::path root_;
};

}  // namespace hegram
