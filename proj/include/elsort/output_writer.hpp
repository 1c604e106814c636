#pragma once

#include <condition_variable>
#include <cstdint>
#include <mutex>
#include <string>
#include <vector>

#include "elsort/internal_sort.hpp"
#include "elsort/io.hpp"
#include "elsort/report.hpp"

namespace elsort {

/// Concurrent sorter count: the longest prefix of partitions whose byte
/// sizes sum within the memory budget, clamped to [1, min(f, max_workers)].
struct SorterWave {
    unsigned concurrent_sorters = 1;
};

/// Throws OversizedPartitionError if any single partition exceeds the budget
/// (the fix is a larger partition count).
SorterWave compute_wave(const std::vector<std::uint64_t>& partition_records,
                        std::uint64_t memory_budget_bytes, unsigned max_workers);

/// Admission gate keeping the sum of gathered partition bytes within the
/// budget. acquire() blocks until the request fits; every request must be
/// individually <= budget (compute_wave guarantees that), so waiters always
/// make progress. Tracks the high-water mark for the report.
class MemoryBudgetGate {
public:
    explicit MemoryBudgetGate(std::uint64_t budget_bytes) : budget_(budget_bytes) {}

    void acquire(std::uint64_t bytes);
    void release(std::uint64_t bytes);
    std::uint64_t high_water() const;

private:
    mutable std::mutex mutex_;
    std::condition_variable cv_;
    std::uint64_t budget_;
    std::uint64_t in_use_ = 0;
    std::uint64_t high_water_ = 0;
};

/// Concatenates partition j's fragment files (worker 0..readers-1) into a
/// sort buffer, deleting each fragment as soon as it has been read. Missing
/// fragments are empty; a count mismatch against the partition plan is a
/// malformed-file error.
SortBuffer gather_partition(std::size_t partition, const std::string& fragment_dir,
                            unsigned readers, std::uint64_t expected_records,
                            Instrumentation* inst = nullptr);

/// Creates (or truncates) the output at its final logical size without
/// writing data blocks. Throws IoError when the space cannot be reserved.
FileHandle create_sparse_output(const std::string& path, std::uint64_t byte_length);

/// Materializes the sorted buffer through a coalesce buffer and writes it at
/// the partition's precomputed offset. Returns the sum of record hashes
/// written (the output-checksum contribution). `out` may be shared across
/// sorters only in the sense of the file: each sorter passes its own handle.
std::uint64_t write_partition(std::size_t partition, const SortBuffer& sorted,
                              const PartitionPlan& plan, const FileHandle& out,
                              std::size_t coalesce_bytes, Instrumentation* inst = nullptr);

} // namespace elsort
