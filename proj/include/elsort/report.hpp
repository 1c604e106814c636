#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <string>

namespace elsort {

/// Pipeline phases instrumented for timing and byte accounting.
enum class Phase : unsigned {
    Train = 0,
    Partition,
    Gather,
    Sort,
    Coalesce,
    Flush,
};
inline constexpr std::size_t kPhaseCount = 6;

const char* phase_name(Phase p);

struct PhaseIo {
    double seconds = 0.0;
    std::uint64_t bytes_read = 0;
    std::uint64_t bytes_written = 0;
};

/// Per-worker counters, merged at phase barriers. Workers keep a private
/// Instrumentation and the orchestrator combines them, so no counter is
/// touched by two threads at once.
class Instrumentation {
public:
    void add_seconds(Phase p, double s) { phases_[idx(p)].seconds += s; }
    void add_read(Phase p, std::uint64_t bytes) { phases_[idx(p)].bytes_read += bytes; }
    void add_write(Phase p, std::uint64_t bytes) { phases_[idx(p)].bytes_written += bytes; }

    void merge(const Instrumentation& other) {
        for (std::size_t i = 0; i < kPhaseCount; ++i) {
            phases_[i].seconds += other.phases_[i].seconds;
            phases_[i].bytes_read += other.phases_[i].bytes_read;
            phases_[i].bytes_written += other.phases_[i].bytes_written;
        }
    }

    const PhaseIo& phase(Phase p) const { return phases_[idx(p)]; }
    PhaseIo& phase(Phase p) { return phases_[idx(p)]; }

    std::uint64_t total_bytes_read() const;
    std::uint64_t total_bytes_written() const;

private:
    static std::size_t idx(Phase p) { return static_cast<std::size_t>(p); }
    std::array<PhaseIo, kPhaseCount> phases_{};
};

/// Monotonic stopwatch for phase timing.
class Stopwatch {
public:
    Stopwatch() : start_(clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(clock::now() - start_).count();
    }
    void restart() { start_ = clock::now(); }

private:
    using clock = std::chrono::steady_clock;
    clock::time_point start_;
};

/// Everything a run reports: per-phase walls and byte counters, partition
/// statistics, memory high-water mark, throughput, and the order-invariant
/// checksums computed inline while records stream through.
struct RunReport {
    std::string algorithm;
    std::uint64_t record_count = 0;
    std::uint64_t input_bytes = 0;

    std::array<PhaseIo, kPhaseCount> phases{};
    double wall_seconds = 0.0;

    std::uint64_t total_bytes_read = 0;
    std::uint64_t total_bytes_written = 0;
    std::uint64_t total_io_bytes = 0;

    double partition_mean = 0.0;
    double partition_stddev = 0.0;
    std::uint64_t partition_max = 0;
    std::size_t partition_count = 0;

    std::uint64_t peak_resident_bytes = 0;
    std::uint64_t quarantined_records = 0;

    /// Internal-sort health: slot-overflow volume and touch-up work. A mean
    /// displacement (shifts / records) creeping toward O(n) means the model
    /// stopped placing records anywhere near their rank.
    std::uint64_t spilled_records = 0;
    std::uint64_t touchup_shifts = 0;

    std::uint64_t checksum_input = 0;
    std::uint64_t checksum_output = 0;

    double records_per_sec = 0.0;
    double bytes_per_sec = 0.0;

    /// Fragment bytes re-read by the optional invariant scan; kept outside
    /// the phase totals, which cover only the sort pipeline itself.
    std::uint64_t debug_scan_bytes = 0;

    const PhaseIo& phase(Phase p) const { return phases[static_cast<std::size_t>(p)]; }
    PhaseIo& phase(Phase p) { return phases[static_cast<std::size_t>(p)]; }

    void finalize_totals();
    void print_text(std::ostream& os) const;
    void write_json(const std::string& path) const;
    /// One-row CSV with a header line; includes the checksum fields.
    void write_csv(const std::string& path) const;
};

/// Mean, population standard deviation and max of partition record counts.
struct SizeStats {
    double mean = 0.0;
    double stddev = 0.0;
    std::uint64_t max = 0;
    double stddev_over_mean() const { return mean > 0.0 ? stddev / mean : 0.0; }
};

SizeStats size_stats(const std::uint64_t* sizes, std::size_t count);

} // namespace elsort
