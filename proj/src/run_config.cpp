#include "elsort/run_config.hpp"

#include <cctype>
#include <cstdlib>
#include <thread>
#include <unistd.h>

#include "elsort/error.hpp"
#include "elsort/record.hpp"

namespace elsort {

unsigned detect_logical_cpus() {
    const unsigned n = std::thread::hardware_concurrency();
    return n > 0 ? n : 1;
}

std::uint64_t detect_physical_memory_bytes() {
    const long pages = ::sysconf(_SC_PHYS_PAGES);
    const long page_size = ::sysconf(_SC_PAGE_SIZE);
    if (pages <= 0 || page_size <= 0) {
        return 1ULL << 30;
    }
    return static_cast<std::uint64_t>(pages) * static_cast<std::uint64_t>(page_size);
}

std::uint64_t parse_byte_size(const std::string& text) {
    if (text.empty()) throw ConfigError("empty byte size");
    std::size_t pos = 0;
    unsigned long long value = 0;
    try {
        value = std::stoull(text, &pos);
    } catch (const std::exception&) {
        throw ConfigError("cannot parse byte size '" + text + "'");
    }
    std::uint64_t multiplier = 1;
    if (pos < text.size()) {
        if (pos + 1 != text.size()) {
            throw ConfigError("cannot parse byte size '" + text + "'");
        }
        switch (std::toupper(static_cast<unsigned char>(text[pos]))) {
            case 'K': multiplier = 1ULL << 10; break;
            case 'M': multiplier = 1ULL << 20; break;
            case 'G': multiplier = 1ULL << 30; break;
            case 'T': multiplier = 1ULL << 40; break;
            default:
                throw ConfigError("unknown byte-size suffix in '" + text + "'");
        }
    }
    return static_cast<std::uint64_t>(value) * multiplier;
}

void RunConfig::resolve_and_validate() {
    if (readers == 0) readers = detect_logical_cpus();
    if (memory_budget == 0) memory_budget = detect_physical_memory_bytes() / 2;
    if (max_sorters == 0) max_sorters = readers;

    if (input_path.empty()) throw ConfigError("input path required");
    if (output_path.empty()) throw ConfigError("output path required");
    if (input_path == output_path) {
        throw ConfigError("input and output must be distinct files");
    }
    if (partitions < 1) throw ConfigError("partitions must be at least 1");
    if (memory_budget < kRecordSize) {
        throw ConfigError("memory budget below one record");
    }
    if (batch_records < 1) throw ConfigError("batch size must be at least 1 record");
    if (!(sample_rate > 0.0) || sample_rate > 1.0) {
        throw ConfigError("sample rate must be in (0, 1]");
    }
    if (leaf_count < 1) throw ConfigError("leaf count must be at least 1");
    if (sample_cap < 2) throw ConfigError("sample cap must be at least 2");
    if (coalesce_bytes < kRecordSize) {
        throw ConfigError("coalesce buffer below one record");
    }
    if (merge_fan_in < 2) throw ConfigError("merge fan-in must be at least 2");

    // Pending fragment buffers must never outgrow the budget; shrink the
    // flush watermark when the fragment grid is large relative to it.
    const std::uint64_t grid = static_cast<std::uint64_t>(readers) * partitions;
    const std::uint64_t cap = memory_budget / (2 * std::max<std::uint64_t>(grid, 1));
    if (cap < flush_watermark_bytes) {
        flush_watermark_bytes =
            static_cast<std::size_t>(std::max<std::uint64_t>(cap, kRecordSize));
    }
}

} // namespace elsort
