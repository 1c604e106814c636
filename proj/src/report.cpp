#include "elsort/report.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>

#include <json.hpp>

#include "elsort/error.hpp"

namespace elsort {

const char* phase_name(Phase p) {
    switch (p) {
        case Phase::Train: return "train";
        case Phase::Partition: return "partition";
        case Phase::Gather: return "gather";
        case Phase::Sort: return "sort";
        case Phase::Coalesce: return "coalesce";
        case Phase::Flush: return "flush";
    }
    return "?";
}

std::uint64_t Instrumentation::total_bytes_read() const {
    std::uint64_t total = 0;
    for (const auto& p : phases_) total += p.bytes_read;
    return total;
}

std::uint64_t Instrumentation::total_bytes_written() const {
    std::uint64_t total = 0;
    for (const auto& p : phases_) total += p.bytes_written;
    return total;
}

SizeStats size_stats(const std::uint64_t* sizes, std::size_t count) {
    SizeStats stats;
    if (count == 0) return stats;
    double sum = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        sum += static_cast<double>(sizes[i]);
        stats.max = std::max(stats.max, sizes[i]);
    }
    stats.mean = sum / static_cast<double>(count);
    double var = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        const double d = static_cast<double>(sizes[i]) - stats.mean;
        var += d * d;
    }
    stats.stddev = std::sqrt(var / static_cast<double>(count));
    return stats;
}

void RunReport::finalize_totals() {
    total_bytes_read = 0;
    total_bytes_written = 0;
    for (const auto& p : phases) {
        total_bytes_read += p.bytes_read;
        total_bytes_written += p.bytes_written;
    }
    total_io_bytes = total_bytes_read + total_bytes_written;
    if (wall_seconds > 0.0) {
        records_per_sec = static_cast<double>(record_count) / wall_seconds;
        bytes_per_sec = static_cast<double>(input_bytes) / wall_seconds;
    }
}

void RunReport::print_text(std::ostream& os) const {
    os << "algorithm        " << algorithm << '\n'
       << "records          " << record_count << '\n'
       << "input bytes      " << input_bytes << '\n'
       << "wall seconds     " << std::fixed << std::setprecision(3) << wall_seconds
       << '\n';
    os << "phase            seconds      read bytes     written bytes\n";
    for (std::size_t i = 0; i < kPhaseCount; ++i) {
        const PhaseIo& p = phases[i];
        os << "  " << std::left << std::setw(11) << phase_name(static_cast<Phase>(i))
           << std::right << std::setw(10) << std::setprecision(3) << p.seconds
           << std::setw(16) << p.bytes_read << std::setw(18) << p.bytes_written << '\n';
    }
    os << "total I/O bytes  " << total_io_bytes << " (" << std::setprecision(2)
       << (input_bytes > 0
               ? static_cast<double>(total_io_bytes) / static_cast<double>(input_bytes)
               : 0.0)
       << "x input)\n";
    os << "partitions       " << partition_count << "  mean " << std::setprecision(1)
       << partition_mean << "  stddev " << partition_stddev << "  max " << partition_max
       << '\n';
    if (peak_resident_bytes > 0) {
        os << "peak resident    " << peak_resident_bytes << " bytes\n";
    }
    if (quarantined_records > 0) {
        os << "quarantined      " << quarantined_records << " records\n";
    }
    if (record_count > 0 && algorithm == "elsar") {
        os << "sort health      " << spilled_records << " spilled, mean displacement "
           << std::setprecision(3)
           << static_cast<double>(touchup_shifts) / static_cast<double>(record_count)
           << " slots/record\n";
    }
    if (debug_scan_bytes > 0) {
        os << "invariant scan   " << debug_scan_bytes << " bytes re-read\n";
    }
    os << "throughput       " << std::setprecision(0) << records_per_sec << " records/s, "
       << bytes_per_sec << " bytes/s\n"
       << "checksum in      " << std::hex << std::setfill('0') << std::setw(16)
       << checksum_input << '\n'
       << "checksum out     " << std::setw(16) << checksum_output << std::dec
       << std::setfill(' ') << '\n';
}

void RunReport::write_json(const std::string& path) const {
    nlohmann::json j;
    j["algorithm"] = algorithm;
    j["records"] = record_count;
    j["input_bytes"] = input_bytes;
    j["wall_seconds"] = wall_seconds;
    for (std::size_t i = 0; i < kPhaseCount; ++i) {
        nlohmann::json& p = j["phases"][phase_name(static_cast<Phase>(i))];
        p["seconds"] = phases[i].seconds;
        p["bytes_read"] = phases[i].bytes_read;
        p["bytes_written"] = phases[i].bytes_written;
    }
    j["total_bytes_read"] = total_bytes_read;
    j["total_bytes_written"] = total_bytes_written;
    j["total_io_bytes"] = total_io_bytes;
    j["partition_count"] = partition_count;
    j["partition_mean"] = partition_mean;
    j["partition_stddev"] = partition_stddev;
    j["partition_max"] = partition_max;
    j["peak_resident_bytes"] = peak_resident_bytes;
    j["quarantined_records"] = quarantined_records;
    j["spilled_records"] = spilled_records;
    j["touchup_shifts"] = touchup_shifts;
    j["debug_scan_bytes"] = debug_scan_bytes;
    j["records_per_sec"] = records_per_sec;
    j["bytes_per_sec"] = bytes_per_sec;
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(checksum_input));
    j["checksum_input"] = buf;
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(checksum_output));
    j["checksum_output"] = buf;

    std::ofstream out(path);
    if (!out) throw IoError("cannot write report '" + path + "'");
    out << j.dump(2) << '\n';
}

void RunReport::write_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write report '" + path + "'");
    out << "algorithm,records,wall_seconds,total_bytes_read,total_bytes_written,"
           "partition_stddev_over_mean,peak_resident_bytes,quarantined,"
           "checksum_input,checksum_output\n";
    char line[512];
    std::snprintf(line, sizeof line, "%s,%llu,%.6f,%llu,%llu,%.6f,%llu,%llu,%016llx,%016llx\n",
                  algorithm.c_str(), static_cast<unsigned long long>(record_count),
                  wall_seconds, static_cast<unsigned long long>(total_bytes_read),
                  static_cast<unsigned long long>(total_bytes_written),
                  partition_mean > 0.0 ? partition_stddev / partition_mean : 0.0,
                  static_cast<unsigned long long>(peak_resident_bytes),
                  static_cast<unsigned long long>(quarantined_records),
                  static_cast<unsigned long long>(checksum_input),
                  static_cast<unsigned long long>(checksum_output));
    out << line;
}

} // namespace elsort
