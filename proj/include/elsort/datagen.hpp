#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

#include "elsort/record.hpp"

namespace elsort {

/// 128 entries of 6 printable bytes; skewed generation overwrites the most
/// significant key bytes with one of these.
using SkewTable = std::array<std::array<std::uint8_t, 6>, 128>;

SkewTable make_skew_table(std::uint64_t seed);

/// floor(log2(rec_idx)) mod 128, rec_idx 1-based.
std::size_t skew_table_index(std::uint64_t rec_idx);

/// The record at `index` (0-based) for a given seed, independent of any
/// other record: key bytes come from a splitmix64 stream positioned at the
/// record, the payload spells out seed and index in hex. Generation order
/// therefore never changes the bytes, and any index range can be produced in
/// isolation.
Record make_record(std::uint64_t seed, std::uint64_t index, bool skew,
                   const SkewTable* table);

struct GenConfig {
    std::uint64_t records = 0;
    std::uint64_t seed = 1;
    bool skew = false;
    unsigned threads = 1;
};

/// Writes `records` records to `out_path`. Byte-identical for identical
/// (records, seed, skew) regardless of thread count.
RecordFile generate_records(const GenConfig& config, const std::string& out_path);

struct ValidationReport {
    bool sorted = true;
    std::optional<std::uint64_t> first_violation_index;
    std::uint64_t checksum = 0;
    std::uint64_t record_count = 0;
};

/// Streaming scan: non-decreasing keys plus the order-invariant checksum.
/// Bounded memory at any file size. Throws MalformedFileError on a length
/// that is not a record multiple.
ValidationReport validate_file(const std::string& path);

} // namespace elsort
