#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "elsort/error.hpp"
#include "elsort/record.hpp"

namespace elsort {

/// 95 printable ASCII characters, codes 32..126.
inline constexpr std::uint64_t kAlphabetSize = 95;

/// A 64-bit value holds at most 9 base-95 digits.
inline constexpr std::size_t kEncodedPrefixBytes = 9;

/// 95^0 .. 95^8.
inline constexpr std::array<std::uint64_t, kEncodedPrefixBytes> kPow95 = {
    1ULL,
    95ULL,
    9025ULL,
    857375ULL,
    81450625ULL,
    7737809375ULL,
    735091890625ULL,
    69833729609375ULL,
    6634204312890625ULL,
};

/// 95^9 - 1, the largest encodable value.
inline constexpr std::uint64_t kMaxEncodedKey = 630249409724609374ULL;

inline constexpr bool is_printable_ascii(std::uint8_t b) {
    return b >= 32 && b <= 126;
}

/// Base-95 positional embedding of a key prefix. Character i (1-based,
/// value c) contributes (c - 32) * 95^(m - i) where m = min(effective_length, 9).
/// Positions past the end of the key contribute 0, so "abc" sorts before
/// "abca" under any shared effective length. Numeric order of the results
/// matches byte order of the keys whenever their first 9 bytes differ.
///
/// Throws NonPrintableKeyError for a contributing byte outside 32..126 and
/// EmptyInputError when effective_length is 0.
inline std::uint64_t encode_key(std::span<const std::uint8_t> key, std::size_t effective_length) {
    if (effective_length == 0) {
        throw EmptyInputError("encode_key: effective length must be at least 1");
    }
    const std::size_t m =
        effective_length < kEncodedPrefixBytes ? effective_length : kEncodedPrefixBytes;
    std::uint64_t value = 0;
    const std::size_t contributing = key.size() < m ? key.size() : m;
    for (std::size_t i = 0; i < contributing; ++i) {
        const std::uint8_t b = key[i];
        if (!is_printable_ascii(b)) {
            throw NonPrintableKeyError("encode_key: key byte " + std::to_string(i) +
                                       " outside printable range 32..126");
        }
        value += static_cast<std::uint64_t>(b - 32) * kPow95[m - 1 - i];
    }
    return value;
}

inline std::uint64_t encode_key(std::string_view key, std::size_t effective_length) {
    return encode_key(
        std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(key.data()),
                                      key.size()),
        effective_length);
}

/// Fixed-format fast path: first 9 bytes of a record key, assumed printable.
inline std::uint64_t encode_record_key_unchecked(const Record& r) {
    std::uint64_t value = 0;
    for (std::size_t i = 0; i < kEncodedPrefixBytes; ++i) {
        value += static_cast<std::uint64_t>(r.key[i] - 32) * kPow95[kEncodedPrefixBytes - 1 - i];
    }
    return value;
}

/// Fast path with validation; nullopt when any of the 10 key bytes is
/// non-printable (the caller quarantines the record instead of aborting).
inline std::optional<std::uint64_t> try_encode_record_key(const Record& r) {
    if (!key_is_printable(r)) {
        return std::nullopt;
    }
    return encode_record_key_unchecked(r);
}

/// Largest key length in a non-empty batch; input to variable-length encoding.
/// Throws EmptyInputError on an empty sequence.
inline std::size_t max_observed_length(std::span<const std::string_view> keys) {
    if (keys.empty()) {
        throw EmptyInputError("max_observed_length: empty key sequence");
    }
    std::size_t m = 0;
    for (const auto& k : keys) {
        if (k.size() > m) m = k.size();
    }
    return m;
}

} // namespace elsort
