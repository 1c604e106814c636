#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "elsort/record.hpp"
#include "elsort/report.hpp"
#include "elsort/run_config.hpp"

namespace elsort {

/// A sorted intermediate file.
struct Run {
    std::string path;
    std::uint64_t record_count = 0;
};

/// Splits the input into memory-sized chunks, sorts each with a comparison
/// sort, and writes one run file per chunk. Parallel across disjoint input
/// ranges; each of `workers` gets an equal share of the memory budget.
/// Returns the runs in deterministic order. `input_checksum_out`, when
/// non-null, receives the sum of record hashes seen while reading.
std::vector<Run> create_runs(const RecordFile& input, std::uint64_t memory_budget_bytes,
                             unsigned workers, const std::string& temp_dir,
                             Instrumentation* inst = nullptr,
                             std::uint64_t* input_checksum_out = nullptr);

/// K-way heap merge of sorted runs into `output_path`. Ties break by run
/// index, so the merge is deterministic. When more than `fan_in` runs exist,
/// batches of `fan_in` are merged into intermediate runs first, like the
/// bounded-batch merging of the stock Unix sort utility; each consumed run
/// file is deleted. Returns the sum of record hashes written to the output.
std::uint64_t merge_runs(std::vector<Run> runs, const std::string& output_path,
                         std::uint64_t total_records, unsigned fan_in,
                         const std::string& temp_dir, Instrumentation* inst = nullptr);

/// The complete baseline pipeline with reporting, mirroring the learned
/// sorter's interface.
RunReport mergesort_sort(const RunConfig& config);

} // namespace elsort
