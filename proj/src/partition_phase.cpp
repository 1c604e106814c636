#include "elsort/partition_phase.hpp"

#include <cerrno>
#include <cstring>
#include <fcntl.h>
#include <thread>
#include <unistd.h>

#include "elsort/error.hpp"
#include "elsort/io.hpp"
#include "elsort/key_encoding.hpp"

namespace elsort {

std::vector<ReadAssignment> plan_reads(std::uint64_t record_count, unsigned readers) {
    if (readers < 1) {
        throw ConfigError("plan_reads: need at least one reader");
    }
    if (record_count == 0) {
        return {};
    }
    const auto effective = static_cast<unsigned>(
        std::min<std::uint64_t>(readers, record_count));
    const std::uint64_t quota = record_count / effective;
    std::vector<ReadAssignment> assignments(effective);
    for (unsigned i = 0; i < effective; ++i) {
        assignments[i].worker = i;
        assignments[i].first_record = quota * i;
        assignments[i].record_count =
            (i + 1 == effective) ? record_count - quota * i : quota;
    }
    return assignments;
}

std::string fragment_file_name(unsigned worker, std::size_t partition) {
    return "frag_" + std::to_string(worker) + "_" + std::to_string(partition);
}

std::string quarantine_file_name(unsigned worker) {
    return "quarantine_" + std::to_string(worker);
}

WorkerScatter::WorkerScatter(unsigned worker, const ScatterConfig& config,
                             const CdfModel& model)
    : worker_(worker),
      config_(config),
      model_(model),
      batch_indices_(config.partitions),
      pending_(config.partitions),
      counts_(config.partitions, 0) {
    cache_handles_ =
        static_cast<std::size_t>(config.total_workers) * config.partitions <=
        config.descriptor_budget;
    if (cache_handles_) {
        handles_.assign(config_.partitions, -1);
    }
}

WorkerScatter::~WorkerScatter() {
    for (int fd : handles_) {
        if (fd >= 0) ::close(fd);
    }
}

void WorkerScatter::scatter_batch(std::span<const Record> batch) {
    for (std::uint32_t i = 0; i < batch.size(); ++i) {
        const Record& r = batch[i];
        input_hash_sum_ += record_hash(r);
        const auto encoded = try_encode_record_key(r);
        if (!encoded) {
            ++quarantined_;
            const auto* p = reinterpret_cast<const std::uint8_t*>(&r);
            quarantine_pending_.insert(quarantine_pending_.end(), p, p + kRecordSize);
            continue;
        }
        const std::size_t p = partition_of(model_, *encoded, config_.partitions);
        batch_indices_[p].push_back(i);
        ++counts_[p];
    }
}

void WorkerScatter::flush_batch(std::span<const Record> batch) {
    for (std::size_t p = 0; p < config_.partitions; ++p) {
        auto& indices = batch_indices_[p];
        if (indices.empty()) continue;
        auto& pend = pending_[p];
        for (std::uint32_t i : indices) {
            const auto* bytes = reinterpret_cast<const std::uint8_t*>(&batch[i]);
            pend.insert(pend.end(), bytes, bytes + kRecordSize);
        }
        indices.clear();
        if (pend.size() >= config_.flush_watermark_bytes) {
            flush_fragment(p);
        }
    }
    if (!quarantine_pending_.empty()) {
        const std::string path =
            config_.fragment_dir + "/" + quarantine_file_name(worker_);
        FileHandle fh = FileHandle::open_append(path);
        fh.append(quarantine_pending_.data(), quarantine_pending_.size());
        quarantine_bytes_ += quarantine_pending_.size();
        quarantine_pending_.clear();
    }
}

void WorkerScatter::drain() {
    for (std::size_t p = 0; p < config_.partitions; ++p) {
        if (!pending_[p].empty()) {
            flush_fragment(p);
        }
    }
}

void WorkerScatter::flush_fragment(std::size_t partition) {
    auto& pend = pending_[partition];
    const std::string path =
        config_.fragment_dir + "/" + fragment_file_name(worker_, partition);
    if (cache_handles_) {
        int& fd = handles_[partition];
        if (fd < 0) {
            fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
            if (fd < 0) {
                throw IoError("cannot create fragment '" + path + "': " +
                              std::strerror(errno));
            }
        }
        const std::uint8_t* p = pend.data();
        std::size_t len = pend.size();
        while (len > 0) {
            ssize_t n = ::write(fd, p, len);
            if (n < 0 && errno == EINTR) continue;
            if (n <= 0) {
                throw IoError("cannot append fragment '" + path + "': " +
                              std::strerror(errno));
            }
            p += n;
            len -= static_cast<std::size_t>(n);
        }
    } else {
        FileHandle fh = FileHandle::open_append(path);
        fh.append(pend.data(), pend.size());
    }
    bytes_written_ += pend.size();
    pend.clear();
}

PartitionPhaseResult run_partition_phase(const RecordFile& input, const CdfModel& model,
                                         const PartitionPhaseConfig& config,
                                         Instrumentation& inst) {
    const auto assignments = plan_reads(input.record_count, config.readers);

    ScatterConfig scatter_config;
    scatter_config.partitions = config.partitions;
    scatter_config.fragment_dir = config.fragment_dir;
    scatter_config.flush_watermark_bytes = config.flush_watermark_bytes;
    scatter_config.descriptor_budget = config.descriptor_budget;
    scatter_config.total_workers = static_cast<unsigned>(assignments.size());

    struct WorkerOutcome {
        std::vector<std::uint64_t> counts;
        std::uint64_t quarantined = 0;
        std::uint64_t quarantine_bytes = 0;
        std::uint64_t hash_sum = 0;
        std::uint64_t bytes_read = 0;
        std::uint64_t bytes_written = 0;
        std::exception_ptr error;
    };
    std::vector<WorkerOutcome> outcomes(assignments.size());

    auto worker_body = [&](const ReadAssignment& a, WorkerOutcome& out) {
        try {
            FileHandle in = FileHandle::open_read(input.path);
            WorkerScatter scatter(a.worker, scatter_config, model);
            std::vector<Record> batch;
            std::uint64_t done = 0;
            while (done < a.record_count) {
                const std::size_t take = static_cast<std::size_t>(std::min<std::uint64_t>(
                    config.batch_records, a.record_count - done));
                batch.resize(take);
                in.read_exact(batch.data(), take * kRecordSize,
                              (a.first_record + done) * kRecordSize);
                out.bytes_read += take * kRecordSize;
                scatter.scatter_batch(batch);
                scatter.flush_batch(batch);
                done += take;
            }
            scatter.drain();
            out.counts = scatter.partition_counts();
            out.quarantined = scatter.quarantined();
            out.quarantine_bytes = scatter.quarantine_bytes();
            out.hash_sum = scatter.input_hash_sum();
            out.bytes_written = scatter.bytes_written();
        } catch (...) {
            out.error = std::current_exception();
        }
    };

    if (assignments.size() <= 1) {
        if (!assignments.empty()) {
            worker_body(assignments[0], outcomes[0]);
        }
    } else {
        std::vector<std::thread> threads;
        threads.reserve(assignments.size());
        for (std::size_t i = 0; i < assignments.size(); ++i) {
            threads.emplace_back(worker_body, std::cref(assignments[i]),
                                 std::ref(outcomes[i]));
        }
        for (auto& t : threads) t.join();
    }

    PartitionPhaseResult result;
    result.partition_sizes.assign(config.partitions, 0);
    for (auto& out : outcomes) {
        if (out.error) std::rethrow_exception(out.error);
        for (std::size_t p = 0; p < out.counts.size(); ++p) {
            result.partition_sizes[p] += out.counts[p];
        }
        result.quarantined_records += out.quarantined;
        result.quarantine_bytes += out.quarantine_bytes;
        result.input_checksum += out.hash_sum;
        inst.add_read(Phase::Partition, out.bytes_read);
        inst.add_write(Phase::Partition, out.bytes_written);
    }
    return result;
}

InvariantScanResult scan_fragment_invariant(const std::string& fragment_dir,
                                            unsigned readers, std::size_t partitions) {
    InvariantScanResult result;
    result.min_encoded.assign(partitions, 0);
    result.max_encoded.assign(partitions, 0);
    result.non_empty.assign(partitions, false);

    std::vector<Record> chunk(4096);
    for (std::size_t p = 0; p < partitions; ++p) {
        for (unsigned w = 0; w < readers; ++w) {
            const std::string path = fragment_dir + "/" + fragment_file_name(w, p);
            if (!file_exists(path)) continue;
            FileHandle fh = FileHandle::open_read(path);
            const std::uint64_t bytes = fh.size();
            if (bytes % kRecordSize != 0) {
                throw MalformedFileError("fragment '" + path + "' has a torn record");
            }
            std::uint64_t offset = 0;
            while (offset < bytes) {
                const std::size_t take = static_cast<std::size_t>(std::min<std::uint64_t>(
                    chunk.size() * kRecordSize, bytes - offset));
                fh.read_exact(chunk.data(), take, offset);
                const std::size_t n = take / kRecordSize;
                for (std::size_t i = 0; i < n; ++i) {
                    const std::uint64_t enc = encode_record_key_unchecked(chunk[i]);
                    if (!result.non_empty[p]) {
                        result.min_encoded[p] = enc;
                        result.max_encoded[p] = enc;
                        result.non_empty[p] = true;
                    } else {
                        result.min_encoded[p] = std::min(result.min_encoded[p], enc);
                        result.max_encoded[p] = std::max(result.max_encoded[p], enc);
                    }
                }
                offset += take;
                result.bytes_scanned += take;
            }
        }
    }

    std::size_t prev = partitions; // index of last non-empty partition seen
    for (std::size_t p = 0; p < partitions; ++p) {
        if (!result.non_empty[p]) continue;
        if (prev != partitions && result.max_encoded[prev] > result.min_encoded[p]) {
            result.ok = false;
            result.first_bad_partition = prev;
            return result;
        }
        prev = p;
    }
    return result;
}

} // namespace elsort
