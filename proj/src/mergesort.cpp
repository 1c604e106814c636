#include "elsort/mergesort.hpp"

#include <algorithm>
#include <cstring>
#include <queue>
#include <thread>

#include "elsort/error.hpp"
#include "elsort/io.hpp"
#include "elsort/partition_phase.hpp"

namespace elsort {

namespace {

/// Sequential chunked reader over one run file; deletes the file once drained.
class RunReader {
public:
    RunReader(const Run& run, std::size_t buffer_bytes)
        : fh_(FileHandle::open_read(run.path)),
          path_(run.path),
          size_(fh_.size()),
          buf_(std::max(buffer_bytes / kRecordSize, std::size_t{1}) * kRecordSize) {}

    bool next(Record& out) {
        if (pos_ == avail_) {
            if (offset_ == size_) {
                if (!drained_) {
                    fh_.close();
                    remove_file(path_);
                    drained_ = true;
                }
                return false;
            }
            const std::size_t take = static_cast<std::size_t>(
                std::min<std::uint64_t>(buf_.size(), size_ - offset_));
            fh_.read_exact(buf_.data(), take, offset_);
            offset_ += take;
            bytes_read_ += take;
            avail_ = take;
            pos_ = 0;
        }
        std::memcpy(&out, buf_.data() + pos_, kRecordSize);
        pos_ += kRecordSize;
        return true;
    }

    std::uint64_t bytes_read() const { return bytes_read_; }

private:
    FileHandle fh_;
    std::string path_;
    std::uint64_t size_;
    std::uint64_t offset_ = 0;
    std::vector<std::uint8_t> buf_;
    std::size_t pos_ = 0;
    std::size_t avail_ = 0;
    std::uint64_t bytes_read_ = 0;
    bool drained_ = false;
};

/// Buffered sequential writer at an advancing offset.
class SequentialWriter {
public:
    SequentialWriter(const FileHandle& fh, std::size_t buffer_bytes)
        : fh_(fh), buf_() {
        buf_.reserve(std::max(buffer_bytes, kRecordSize));
        cap_ = std::max(buffer_bytes, kRecordSize);
    }

    void put(const Record& r) {
        const auto* p = reinterpret_cast<const std::uint8_t*>(&r);
        buf_.insert(buf_.end(), p, p + kRecordSize);
        if (buf_.size() + kRecordSize > cap_) flush();
    }

    void flush() {
        if (buf_.empty()) return;
        fh_.write_exact(buf_.data(), buf_.size(), offset_);
        offset_ += buf_.size();
        written_ += buf_.size();
        buf_.clear();
    }

    std::uint64_t bytes_written() const { return written_; }

private:
    const FileHandle& fh_;
    std::vector<std::uint8_t> buf_;
    std::size_t cap_;
    std::uint64_t offset_ = 0;
    std::uint64_t written_ = 0;
};

struct HeapEntry {
    Record record;
    std::uint32_t run;
};

struct HeapGreater {
    bool operator()(const HeapEntry& a, const HeapEntry& b) const {
        const int c = std::memcmp(a.record.key.data(), b.record.key.data(), kKeySize);
        if (c != 0) return c > 0;
        return a.run > b.run;
    }
};

/// Merges `group` into `out`, returning (records, hash sum). Readers delete
/// their run files as they drain.
std::pair<std::uint64_t, std::uint64_t> merge_group(const std::vector<Run>& group,
                                                    SequentialWriter& out,
                                                    std::size_t reader_buffer_bytes,
                                                    Instrumentation* inst) {
    std::vector<RunReader> readers;
    readers.reserve(group.size());
    for (const Run& run : group) readers.emplace_back(run, reader_buffer_bytes);

    std::priority_queue<HeapEntry, std::vector<HeapEntry>, HeapGreater> heap;
    for (std::uint32_t i = 0; i < readers.size(); ++i) {
        Record r;
        if (readers[i].next(r)) heap.push(HeapEntry{r, i});
    }

    std::uint64_t records = 0;
    std::uint64_t hash_sum = 0;
    while (!heap.empty()) {
        HeapEntry top = heap.top();
        heap.pop();
        out.put(top.record);
        hash_sum += record_hash(top.record);
        ++records;
        Record r;
        if (readers[top.run].next(r)) heap.push(HeapEntry{r, top.run});
    }
    if (inst != nullptr) {
        for (const auto& reader : readers) {
            inst->add_read(Phase::Gather, reader.bytes_read());
        }
    }
    return {records, hash_sum};
}

} // namespace

std::vector<Run> create_runs(const RecordFile& input, std::uint64_t memory_budget_bytes,
                             unsigned workers, const std::string& temp_dir,
                             Instrumentation* inst, std::uint64_t* input_checksum_out) {
    if (memory_budget_bytes < kRecordSize) {
        throw ConfigError("create_runs: memory budget below one record");
    }
    const auto assignments = plan_reads(input.record_count, std::max(workers, 1u));
    const std::uint64_t capacity_records = std::max<std::uint64_t>(
        memory_budget_bytes / std::max<unsigned>(1, assignments.empty() ? 1 : assignments.size()) /
            kRecordSize,
        1);

    struct WorkerOutcome {
        std::vector<Run> runs;
        std::uint64_t bytes_read = 0;
        std::uint64_t bytes_written = 0;
        std::uint64_t hash_sum = 0;
        double sort_seconds = 0.0;
        std::exception_ptr error;
    };
    std::vector<WorkerOutcome> outcomes(assignments.size());

    auto worker_body = [&](const ReadAssignment& a, WorkerOutcome& out) {
        try {
            FileHandle in = FileHandle::open_read(input.path);
            std::vector<Record> chunk;
            std::uint64_t done = 0;
            unsigned run_index = 0;
            while (done < a.record_count) {
                const std::size_t take = static_cast<std::size_t>(std::min<std::uint64_t>(
                    capacity_records, a.record_count - done));
                chunk.resize(take);
                in.read_exact(chunk.data(), take * kRecordSize,
                              (a.first_record + done) * kRecordSize);
                out.bytes_read += take * kRecordSize;
                for (const Record& r : chunk) out.hash_sum += record_hash(r);

                Stopwatch sw;
                std::sort(chunk.begin(), chunk.end(), [](const Record& x, const Record& y) {
                    return std::memcmp(x.key.data(), y.key.data(), kKeySize) < 0;
                });
                out.sort_seconds += sw.seconds();

                const std::string path = temp_dir + "/run_" + std::to_string(a.worker) +
                                         "_" + std::to_string(run_index++);
                FileHandle rf = FileHandle::create_truncate(path);
                rf.write_exact(chunk.data(), take * kRecordSize, 0);
                out.bytes_written += take * kRecordSize;
                out.runs.push_back(Run{path, take});
                done += take;
            }
        } catch (...) {
            out.error = std::current_exception();
        }
    };

    if (assignments.size() <= 1) {
        if (!assignments.empty()) worker_body(assignments[0], outcomes[0]);
    } else {
        std::vector<std::thread> threads;
        for (std::size_t i = 0; i < assignments.size(); ++i) {
            threads.emplace_back(worker_body, std::cref(assignments[i]),
                                 std::ref(outcomes[i]));
        }
        for (auto& t : threads) t.join();
    }

    std::vector<Run> runs;
    std::uint64_t checksum = 0;
    for (auto& out : outcomes) {
        if (out.error) std::rethrow_exception(out.error);
        runs.insert(runs.end(), out.runs.begin(), out.runs.end());
        checksum += out.hash_sum;
        if (inst != nullptr) {
            inst->add_read(Phase::Partition, out.bytes_read);
            inst->add_write(Phase::Partition, out.bytes_written);
            inst->add_seconds(Phase::Sort, out.sort_seconds);
        }
    }
    if (input_checksum_out != nullptr) *input_checksum_out = checksum;
    return runs;
}

std::uint64_t merge_runs(std::vector<Run> runs, const std::string& output_path,
                         std::uint64_t total_records, unsigned fan_in,
                         const std::string& temp_dir, Instrumentation* inst) {
    fan_in = std::max(fan_in, 2u);
    constexpr std::size_t kReaderBuffer = 256 * 1024;
    constexpr std::size_t kWriterBuffer = 1024 * 1024;

    // Bounded-batch passes until one final merge reaches the output.
    unsigned intermediate_index = 0;
    while (runs.size() > fan_in) {
        std::vector<Run> next;
        for (std::size_t start = 0; start < runs.size(); start += fan_in) {
            const std::size_t end = std::min(runs.size(), start + fan_in);
            if (end - start == 1) {
                next.push_back(runs[start]);
                continue;
            }
            std::vector<Run> group(runs.begin() + start, runs.begin() + end);
            const std::string path =
                temp_dir + "/merge_" + std::to_string(intermediate_index++);
            FileHandle fh = FileHandle::create_truncate(path);
            SequentialWriter writer(fh, kWriterBuffer);
            const auto [records, _] = merge_group(group, writer, kReaderBuffer, inst);
            writer.flush();
            if (inst != nullptr) inst->add_write(Phase::Flush, writer.bytes_written());
            next.push_back(Run{path, records});
        }
        runs = std::move(next);
    }

    FileHandle out = FileHandle::create_truncate(output_path);
    out.truncate(total_records * kRecordSize);
    SequentialWriter writer(out, kWriterBuffer);
    std::uint64_t hash_sum = 0;
    if (!runs.empty()) {
        const auto [records, sum] = merge_group(runs, writer, kReaderBuffer, inst);
        writer.flush();
        hash_sum = sum;
        if (records != total_records) {
            throw MalformedFileError("merge produced " + std::to_string(records) +
                                     " records, expected " + std::to_string(total_records));
        }
    }
    if (inst != nullptr) inst->add_write(Phase::Flush, writer.bytes_written());
    return hash_sum;
}

RunReport mergesort_sort(const RunConfig& config) {
    Stopwatch total;
    RunReport report;
    report.algorithm = "mergesort";

    const RecordFile input = stat_record_file(config.input_path);
    report.record_count = input.record_count;
    report.input_bytes = input.byte_length;

    const std::string temp_dir = make_temp_dir(config.temp_dir, "elsort_ms_");
    Instrumentation inst;
    try {
        Stopwatch run_phase;
        std::uint64_t input_checksum = 0;
        std::vector<Run> runs = create_runs(input, config.memory_budget, config.readers,
                                            temp_dir, &inst, &input_checksum);
        inst.add_seconds(Phase::Partition, run_phase.seconds());

        std::vector<std::uint64_t> run_sizes;
        run_sizes.reserve(runs.size());
        for (const Run& r : runs) run_sizes.push_back(r.record_count);
        const SizeStats stats = size_stats(run_sizes.data(), run_sizes.size());
        report.partition_mean = stats.mean;
        report.partition_stddev = stats.stddev;
        report.partition_max = stats.max;
        report.partition_count = runs.size();

        Stopwatch merge_phase;
        report.checksum_output = merge_runs(std::move(runs), config.output_path,
                                            input.record_count, config.merge_fan_in,
                                            temp_dir, &inst);
        inst.add_seconds(Phase::Flush, merge_phase.seconds());
        report.checksum_input = input_checksum;
    } catch (...) {
        remove_dir_recursive(temp_dir);
        throw;
    }
    remove_dir_recursive(temp_dir);

    for (std::size_t i = 0; i < kPhaseCount; ++i) {
        report.phases[i] = inst.phase(static_cast<Phase>(i));
    }
    report.wall_seconds = total.seconds();
    report.finalize_totals();
    return report;
}

} // namespace elsort
