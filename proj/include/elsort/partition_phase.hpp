#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "elsort/cdf_model.hpp"
#include "elsort/record.hpp"
#include "elsort/report.hpp"

namespace elsort {

/// One reader worker's slice of the input, in whole records.
struct ReadAssignment {
    unsigned worker = 0;
    std::uint64_t first_record = 0;
    std::uint64_t record_count = 0;

    std::uint64_t byte_offset() const { return first_record * kRecordSize; }
};

/// Tiles [0, record_count) across `readers` workers: each quota is
/// floor(n/r) records and the last worker absorbs the remainder. When
/// readers > n the worker count drops to n so no assignment is empty.
std::vector<ReadAssignment> plan_reads(std::uint64_t record_count, unsigned readers);

/// Fragment file name inside the fragment directory.
std::string fragment_file_name(unsigned worker, std::size_t partition);
std::string quarantine_file_name(unsigned worker);

struct ScatterConfig {
    std::size_t partitions = 0;
    std::string fragment_dir;
    std::size_t flush_watermark_bytes = 64 * 1024;
    /// Fragment handles stay open across flushes only while the grid fits
    /// this many descriptors; otherwise files are opened per flush.
    std::size_t descriptor_budget = 512;
    unsigned total_workers = 1;
};

/// Per-worker scatter state: one row of the fragment grid. Each worker owns
/// its row exclusively, so no synchronization exists anywhere on this path.
///
/// scatter_batch() only records per-partition indices into the caller's
/// batch. flush_batch() materializes those indices into per-fragment pending
/// buffers and appends any buffer past the watermark to its fragment file;
/// drain() flushes the rest.
class WorkerScatter {
public:
    WorkerScatter(unsigned worker, const ScatterConfig& config, const CdfModel& model);
    ~WorkerScatter();

    WorkerScatter(const WorkerScatter&) = delete;
    WorkerScatter& operator=(const WorkerScatter&) = delete;

    /// Routes every record of the batch to a partition. Records with
    /// non-printable key bytes go to the quarantine file instead of failing
    /// the run.
    void scatter_batch(std::span<const Record> batch);

    /// Materializes and flushes ready fragments for the batch scattered last.
    /// Must be called once per scatter_batch before the next batch reuses the
    /// underlying buffer.
    void flush_batch(std::span<const Record> batch);

    /// Flushes every pending fragment buffer regardless of watermark.
    void drain();

    const std::vector<std::uint64_t>& partition_counts() const { return counts_; }
    std::uint64_t quarantined() const { return quarantined_; }
    std::uint64_t input_hash_sum() const { return input_hash_sum_; }
    std::uint64_t bytes_written() const { return bytes_written_; }
    std::uint64_t quarantine_bytes() const { return quarantine_bytes_; }

private:
    void flush_fragment(std::size_t partition);

    unsigned worker_;
    ScatterConfig config_;
    const CdfModel& model_;
    bool cache_handles_ = false;

    std::vector<std::vector<std::uint32_t>> batch_indices_; // per partition
    std::vector<std::vector<std::uint8_t>> pending_;        // per partition
    std::vector<int> handles_;                              // cached fds, -1 = closed
    std::vector<std::uint64_t> counts_;
    std::uint64_t quarantined_ = 0;
    std::uint64_t quarantine_bytes_ = 0;
    std::uint64_t input_hash_sum_ = 0;
    std::uint64_t bytes_written_ = 0;
    std::vector<std::uint8_t> quarantine_pending_;
};

struct PartitionPhaseResult {
    std::vector<std::uint64_t> partition_sizes;
    std::uint64_t quarantined_records = 0;
    std::uint64_t quarantine_bytes = 0;
    /// Sum of record_hash over all input records (including quarantined).
    std::uint64_t input_checksum = 0;
};

struct PartitionPhaseConfig {
    unsigned readers = 1;
    std::size_t partitions = 1;
    std::size_t batch_records = 10486;
    std::size_t flush_watermark_bytes = 64 * 1024;
    std::size_t descriptor_budget = 512;
    std::string fragment_dir;
};

/// Runs the whole phase: `readers` threads each scan their slice in batches,
/// route records through their shared read-only model, and append fragment
/// files. Per-worker counters are merged after the join.
PartitionPhaseResult run_partition_phase(const RecordFile& input, const CdfModel& model,
                                         const PartitionPhaseConfig& config,
                                         Instrumentation& inst);

/// Min/max encoded key per partition across its fragment files, plus the
/// monotonicity verdict: max(partition j) <= min(partition j+1) for every
/// adjacent non-empty pair. Re-reads all fragments; debug tooling.
struct InvariantScanResult {
    bool ok = true;
    std::size_t first_bad_partition = 0;
    std::uint64_t bytes_scanned = 0;
    std::vector<std::uint64_t> min_encoded;
    std::vector<std::uint64_t> max_encoded;
    std::vector<bool> non_empty;
};

InvariantScanResult scan_fragment_invariant(const std::string& fragment_dir,
                                            unsigned readers, std::size_t partitions);

} // namespace elsort
