#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <cstring>
#include <string>

namespace elsort {

inline constexpr std::size_t kKeySize = 10;
inline constexpr std::size_t kPayloadSize = 90;
inline constexpr std::size_t kRecordSize = kKeySize + kPayloadSize;

/// One fixed-width record: a 10-byte printable-ASCII key followed by a
/// 90-byte payload. Payload bytes are unconstrained; only keys must be
/// printable. The on-disk layout is exactly these 100 bytes, no framing.
struct Record {
    std::array<std::uint8_t, kKeySize> key;
    std::array<std::uint8_t, kPayloadSize> payload;
};

static_assert(sizeof(Record) == kRecordSize, "record layout must be exactly 100 bytes");
static_assert(alignof(Record) == 1);

/// Byte-lexicographic order of the 10-byte keys. Payload never participates.
inline std::strong_ordering compare_keys(const Record& a, const Record& b) {
    const int c = std::memcmp(a.key.data(), b.key.data(), kKeySize);
    if (c < 0) return std::strong_ordering::less;
    if (c > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

/// FNV-1a 64-bit over all 100 bytes.
inline std::uint64_t record_hash(const Record& r) {
    std::uint64_t h = 14695981039346656037ULL;
    const auto* bytes = reinterpret_cast<const std::uint8_t*>(&r);
    for (std::size_t i = 0; i < kRecordSize; ++i) {
        h = (h ^ bytes[i]) * 1099511628211ULL;
    }
    return h;
}

inline bool key_is_printable(const Record& r) {
    for (std::uint8_t b : r.key) {
        if (b < 32 || b > 126) return false;
    }
    return true;
}

/// A file of contiguous 100-byte records.
struct RecordFile {
    std::string path;
    std::uint64_t record_count = 0;
    std::uint64_t byte_length = 0;
};

/// Stats the file and checks that its length is a record multiple.
/// Throws IoError if the file is missing, MalformedFileError on a bad length.
RecordFile stat_record_file(const std::string& path);

/// Order-invariant checksum: sum of record_hash over all records, mod 2^64.
/// Streaming, bounded memory. Equal for any permutation of the same records.
std::uint64_t file_checksum(const RecordFile& f);

} // namespace elsort
