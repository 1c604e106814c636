#pragma once

#include <cstdint>
#include <string>

namespace elsort {

enum class Algorithm {
    Elsar,
    Mergesort,
};

enum class SampleMode {
    FirstBatch, // sample uniformly from the first reader batch
    Reservoir,  // reservoir-sample the whole input
};

/// Tunables for one sort run. Field defaults are the library defaults; the
/// CLI mirrors them one flag per field.
struct RunConfig {
    std::string input_path;
    std::string output_path;
    std::string temp_dir = "/tmp";

    Algorithm algorithm = Algorithm::Elsar;

    std::size_t partitions = 1000;       // f
    unsigned readers = 0;                // r; 0 = logical CPU count
    std::uint64_t memory_budget = 0;     // M bytes; 0 = half of physical memory
    std::size_t batch_records = 10486;   // B, ~1 MiB of records per read
    std::size_t leaf_count = 1000;       // L, second-layer model count
    double sample_rate = 0.01;
    std::size_t sample_cap = 10'000'000;
    SampleMode sample_mode = SampleMode::FirstBatch;
    std::uint64_t seed = 1;

    std::size_t coalesce_bytes = 100 * 1024;
    std::size_t flush_watermark_bytes = 64 * 1024;
    std::size_t descriptor_budget = 512;  // cached fragment handles across the grid
    unsigned max_sorters = 0;            // 0 = readers
    unsigned merge_fan_in = 16;          // baseline: max runs merged per pass

    bool check_invariants = false;       // debug fragment scan after partitioning
    std::string model_dump_path;         // write model coefficients when non-empty

    /// Fills readers / memory_budget / max_sorters from the machine when left
    /// at 0 and validates ranges. Throws ConfigError.
    void resolve_and_validate();
};

unsigned detect_logical_cpus();
std::uint64_t detect_physical_memory_bytes();

/// Parses "1048576", "64K", "100M", "2G" (binary units).
std::uint64_t parse_byte_size(const std::string& text);

} // namespace elsort
