#include "elsort/output_writer.hpp"

#include <algorithm>
#include <cstring>

#include "elsort/error.hpp"
#include "elsort/partition_phase.hpp"

namespace elsort {

SorterWave compute_wave(const std::vector<std::uint64_t>& partition_records,
                        std::uint64_t memory_budget_bytes, unsigned max_workers) {
    if (max_workers < 1) {
        throw ConfigError("compute_wave: need at least one worker");
    }
    for (std::size_t j = 0; j < partition_records.size(); ++j) {
        const std::uint64_t bytes = partition_records[j] * kRecordSize;
        if (bytes > memory_budget_bytes) {
            throw OversizedPartitionError(
                "partition " + std::to_string(j) + " needs " + std::to_string(bytes) +
                " bytes but the budget is " + std::to_string(memory_budget_bytes) +
                "; rerun with more partitions, a larger training sample, or "
                "--sample-mode reservoir");
        }
    }
    std::uint64_t prefix = 0;
    unsigned s = 0;
    for (std::uint64_t records : partition_records) {
        prefix += records * kRecordSize;
        if (prefix > memory_budget_bytes) break;
        ++s;
    }
    s = std::max(s, 1u);
    s = std::min<unsigned>(s, max_workers);
    if (!partition_records.empty()) {
        s = std::min<unsigned>(s, static_cast<unsigned>(partition_records.size()));
    }
    return SorterWave{s};
}

void MemoryBudgetGate::acquire(std::uint64_t bytes) {
    std::unique_lock<std::mutex> lock(mutex_);
    cv_.wait(lock, [&] { return in_use_ + bytes <= budget_; });
    in_use_ += bytes;
    high_water_ = std::max(high_water_, in_use_);
}

void MemoryBudgetGate::release(std::uint64_t bytes) {
    {
        std::lock_guard<std::mutex> lock(mutex_);
        in_use_ -= bytes;
    }
    cv_.notify_all();
}

std::uint64_t MemoryBudgetGate::high_water() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return high_water_;
}

SortBuffer gather_partition(std::size_t partition, const std::string& fragment_dir,
                            unsigned readers, std::uint64_t expected_records,
                            Instrumentation* inst) {
    if (expected_records > UINT32_MAX) {
        throw OversizedPartitionError("partition " + std::to_string(partition) +
                                      " exceeds the per-partition record limit");
    }
    SortBuffer buffer(expected_records);
    std::vector<std::uint8_t> bytes;
    for (unsigned w = 0; w < readers; ++w) {
        const std::string path = fragment_dir + "/" + fragment_file_name(w, partition);
        if (!file_exists(path)) continue;
        {
            FileHandle fh = FileHandle::open_read(path);
            const std::uint64_t len = fh.size();
            if (len % kRecordSize != 0) {
                throw MalformedFileError("fragment '" + path + "' has a torn record");
            }
            bytes.resize(len);
            if (len > 0) fh.read_exact(bytes.data(), len, 0);
        }
        remove_file(path); // consumed; reclaim the space right away
        if (inst != nullptr) inst->add_read(Phase::Gather, bytes.size());
        buffer.append_records(bytes);
    }
    if (buffer.size() != expected_records) {
        throw MalformedFileError("partition " + std::to_string(partition) + " gathered " +
                                 std::to_string(buffer.size()) + " records, expected " +
                                 std::to_string(expected_records));
    }
    return buffer;
}

FileHandle create_sparse_output(const std::string& path, std::uint64_t byte_length) {
    FileHandle out = FileHandle::create_truncate(path);
    out.truncate(byte_length);
    return out;
}

std::uint64_t write_partition(std::size_t partition, const SortBuffer& sorted,
                              const PartitionPlan& plan, const FileHandle& out,
                              std::size_t coalesce_bytes, Instrumentation* inst) {
    coalesce_bytes = std::max<std::size_t>(coalesce_bytes, kRecordSize);
    std::vector<std::uint8_t> coalesce;
    coalesce.reserve(coalesce_bytes);

    std::uint64_t offset = plan.offsets[partition];
    std::uint64_t hash_sum = 0;
    double coalesce_seconds = 0.0;
    double flush_seconds = 0.0;
    std::uint64_t written = 0;

    auto flush = [&] {
        if (coalesce.empty()) return;
        Stopwatch w;
        out.write_exact(coalesce.data(), coalesce.size(), offset);
        flush_seconds += w.seconds();
        offset += coalesce.size();
        written += coalesce.size();
        coalesce.clear();
    };

    Stopwatch c;
    for (const SortEntry& e : sorted.entries()) {
        const auto* bytes = reinterpret_cast<const std::uint8_t*>(&sorted.record(e.index));
        coalesce.insert(coalesce.end(), bytes, bytes + kRecordSize);
        hash_sum += record_hash(sorted.record(e.index));
        if (coalesce.size() + kRecordSize > coalesce_bytes) {
            coalesce_seconds += c.seconds();
            flush();
            c.restart();
        }
    }
    coalesce_seconds += c.seconds();
    flush();

    if (inst != nullptr) {
        inst->add_seconds(Phase::Coalesce, coalesce_seconds);
        inst->add_seconds(Phase::Flush, flush_seconds);
        inst->add_write(Phase::Flush, written);
    }
    return hash_sum;
}

} // namespace elsort
