#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "elsort/cdf_model.hpp"
#include "elsort/record.hpp"

namespace elsort {

/// Sort key: cached base-95 encoding plus the index of the record in the
/// buffer. Sorting permutes these entries; record bytes never move until the
/// writer materializes them.
struct SortEntry {
    std::uint64_t encoded;
    std::uint32_t index;
};

/// One partition's records gathered into memory, with per-record entries.
class SortBuffer {
public:
    SortBuffer() = default;
    explicit SortBuffer(std::uint64_t capacity_records);

    /// Appends raw record bytes (a whole fragment) and builds their entries.
    /// Throws PartitionOverflowError past capacity and MalformedFileError if
    /// the byte count is not a record multiple.
    void append_records(std::span<const std::uint8_t> bytes);

    std::size_t size() const { return entries_.size(); }
    std::uint64_t capacity() const { return capacity_records_; }
    bool empty() const { return entries_.empty(); }

    const Record& record(std::uint32_t index) const {
        return *reinterpret_cast<const Record*>(bytes_.data() +
                                                std::size_t{index} * kRecordSize);
    }
    const std::uint8_t* record_bytes() const { return bytes_.data(); }

    std::span<SortEntry> entries() { return entries_; }
    std::span<const SortEntry> entries() const { return entries_; }

    /// Record bytes in entry order; used by tests and small writers.
    std::vector<std::uint8_t> materialize() const;

private:
    std::uint64_t capacity_records_ = 0;
    std::vector<std::uint8_t> bytes_;
    std::vector<SortEntry> entries_;
};

struct TouchUpStats {
    std::uint64_t comparisons = 0;
    std::uint64_t shifts = 0;
};

struct SortStats {
    std::uint64_t records = 0;
    std::uint64_t spilled = 0;
    TouchUpStats touch_up;
};

/// Insertion sort on full 10-byte keys. Near-linear on nearly-sorted input;
/// stable among equal keys.
TouchUpStats touch_up(std::span<SortEntry> entries, const std::uint8_t* record_bytes);

/// Model-placed in-memory sort of one partition. Placement slots come from
/// the global model rescaled to partition j of f, capped at 4 records per
/// slot with the overflow spilled to a comparison sort, then a final
/// insertion-sort pass over full keys repairs residual disorder (including
/// keys that collide in their first 9 bytes).
///
/// Precondition: every record in the buffer maps to partition j under the
/// same model and f.
SortStats learned_sort(SortBuffer& buffer, const CdfModel& model, std::size_t partition,
                       std::size_t f);

} // namespace elsort
