#include "elsort/sorter.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <thread>
#include <vector>

#include "elsort/cdf_model.hpp"
#include "elsort/error.hpp"
#include "elsort/internal_sort.hpp"
#include "elsort/io.hpp"
#include "elsort/mergesort.hpp"
#include "elsort/output_writer.hpp"
#include "elsort/partition_phase.hpp"

namespace elsort {

namespace {

/// Copies input to output verbatim; a file of 0 or 1 records is sorted.
RunReport trivial_copy(const RunConfig& config, const RecordFile& input,
                       RunReport report) {
    FileHandle out = create_sparse_output(config.output_path, input.byte_length);
    std::uint64_t checksum = 0;
    if (input.record_count > 0) {
        Record r;
        FileHandle in = FileHandle::open_read(input.path);
        in.read_exact(&r, kRecordSize, 0);
        out.write_exact(&r, kRecordSize, 0);
        checksum = record_hash(r);
        report.phase(Phase::Partition).bytes_read += kRecordSize;
        report.phase(Phase::Flush).bytes_written += kRecordSize;
    }
    report.checksum_input = checksum;
    report.checksum_output = checksum;
    report.partition_count = input.record_count > 0 ? 1 : 0;
    report.finalize_totals();
    return report;
}

TrainingSample draw_sample_with_floor(const RecordFile& input, const RunConfig& config,
                                      Instrumentation& inst) {
    TrainingSample sample = draw_sample(input, config.sample_rate, config.sample_cap,
                                        config.seed, config.batch_records,
                                        config.sample_mode, &inst);
    if (sample.keys.size() >= 2) {
        return sample;
    }
    // Degenerate rate-times-batch products still need two points to fit a
    // line; re-draw at the smallest workable rate.
    const std::uint64_t pool = config.sample_mode == SampleMode::FirstBatch
                                   ? std::min<std::uint64_t>(config.batch_records,
                                                             input.record_count)
                                   : input.record_count;
    if (pool >= 2) {
        const double rate = std::min(1.0, 2.5 / static_cast<double>(pool));
        sample = draw_sample(input, rate, config.sample_cap, config.seed,
                             config.batch_records, config.sample_mode, &inst);
    }
    return sample;
}

} // namespace

RunReport elsar_sort(const RunConfig& config) {
    Stopwatch total;
    RunReport report;
    report.algorithm = "elsar";

    const RecordFile input = stat_record_file(config.input_path);
    report.record_count = input.record_count;
    report.input_bytes = input.byte_length;

    if (input.record_count < 2) {
        return trivial_copy(config, input, std::move(report));
    }

    Instrumentation inst;
    const std::string fragment_dir = make_temp_dir(config.temp_dir, "elsort_frag_");
    try {
        // Reserve the full output up front; no space means no work done.
        {
            FileHandle out = create_sparse_output(config.output_path, input.byte_length);
        }

        // Train.
        Stopwatch train_watch;
        const TrainingSample sample = draw_sample_with_floor(input, config, inst);
        const CdfModel model = CdfModel::train(sample, config.leaf_count);
        inst.add_seconds(Phase::Train, train_watch.seconds());
        if (!config.model_dump_path.empty()) {
            std::ofstream dump(config.model_dump_path);
            if (!dump) {
                throw IoError("cannot write model dump '" + config.model_dump_path + "'");
            }
            model.dump(dump);
        }

        // Partition: scatter every record into per-worker fragment files.
        Stopwatch partition_watch;
        PartitionPhaseConfig phase_config;
        phase_config.readers = config.readers;
        phase_config.partitions = config.partitions;
        phase_config.batch_records = config.batch_records;
        phase_config.flush_watermark_bytes = config.flush_watermark_bytes;
        phase_config.descriptor_budget = config.descriptor_budget;
        phase_config.fragment_dir = fragment_dir;
        const PartitionPhaseResult partition =
            run_partition_phase(input, model, phase_config, inst);
        inst.add_seconds(Phase::Partition, partition_watch.seconds());

        report.checksum_input = partition.input_checksum;
        report.quarantined_records = partition.quarantined_records;

        if (config.check_invariants) {
            const InvariantScanResult scan = scan_fragment_invariant(
                fragment_dir, config.readers, config.partitions);
            report.debug_scan_bytes = scan.bytes_scanned;
            if (!scan.ok) {
                throw Error("fragment order invariant violated between partitions " +
                            std::to_string(scan.first_bad_partition) + " and its successor");
            }
        }

        const PartitionPlan plan =
            PartitionPlan::from_sizes(partition.partition_sizes, config.readers);
        const SizeStats stats = size_stats(plan.sizes.data(), plan.sizes.size());
        report.partition_mean = stats.mean;
        report.partition_stddev = stats.stddev;
        report.partition_max = stats.max;
        report.partition_count = plan.partition_count;

        // Size the sorter wave faithfully from the partition prefix, then let
        // the admission gate keep simultaneous gathers within the budget even
        // when dynamic assignment picks a heavier mix than that prefix.
        const SorterWave wave =
            compute_wave(plan.sizes, config.memory_budget, config.max_sorters);

        MemoryBudgetGate gate(config.memory_budget);
        std::atomic<std::size_t> next_partition{0};
        std::atomic<std::uint64_t> output_checksum{0};
        std::atomic<std::uint64_t> spilled_records{0};
        std::atomic<std::uint64_t> touchup_shifts{0};
        std::vector<Instrumentation> sorter_inst(wave.concurrent_sorters);
        std::vector<std::exception_ptr> sorter_errors(wave.concurrent_sorters);

        auto sorter_body = [&](unsigned sorter_index) {
            Instrumentation& local = sorter_inst[sorter_index];
            try {
                FileHandle out = FileHandle::open_write(config.output_path);
                for (;;) {
                    const std::size_t j = next_partition.fetch_add(1);
                    if (j >= plan.partition_count) break;
                    const std::uint64_t records = plan.sizes[j];
                    if (records == 0) continue;
                    const std::uint64_t bytes = records * kRecordSize;

                    gate.acquire(bytes);
                    try {
                        Stopwatch gather_watch;
                        SortBuffer buffer = gather_partition(
                            j, fragment_dir, config.readers, records, &local);
                        local.add_seconds(Phase::Gather, gather_watch.seconds());

                        Stopwatch sort_watch;
                        const SortStats sort_stats =
                            learned_sort(buffer, model, j, config.partitions);
                        local.add_seconds(Phase::Sort, sort_watch.seconds());
                        spilled_records.fetch_add(sort_stats.spilled);
                        touchup_shifts.fetch_add(sort_stats.touch_up.shifts);

                        output_checksum.fetch_add(write_partition(
                            j, buffer, plan, out, config.coalesce_bytes, &local));
                    } catch (...) {
                        gate.release(bytes);
                        throw;
                    }
                    gate.release(bytes);
                }
            } catch (...) {
                sorter_errors[sorter_index] = std::current_exception();
            }
        };

        if (wave.concurrent_sorters <= 1) {
            sorter_body(0);
        } else {
            std::vector<std::thread> sorters;
            for (unsigned i = 0; i < wave.concurrent_sorters; ++i) {
                sorters.emplace_back(sorter_body, i);
            }
            for (auto& t : sorters) t.join();
        }
        for (auto& e : sorter_errors) {
            if (e) std::rethrow_exception(e);
        }
        for (const auto& local : sorter_inst) {
            inst.merge(local);
        }
        report.checksum_output = output_checksum.load();
        report.peak_resident_bytes = gate.high_water();
        report.spilled_records = spilled_records.load();
        report.touchup_shifts = touchup_shifts.load();

        // Quarantined records shrink the output; their bytes move next to it.
        if (partition.quarantined_records > 0) {
            FileHandle out = FileHandle::open_write(config.output_path);
            out.truncate(plan.total_records() * kRecordSize);
            std::vector<std::uint8_t> quarantined;
            for (unsigned w = 0; w < config.readers; ++w) {
                const std::string path = fragment_dir + "/" + quarantine_file_name(w);
                if (!file_exists(path)) continue;
                const auto bytes = read_entire_file(path);
                quarantined.insert(quarantined.end(), bytes.begin(), bytes.end());
            }
            write_entire_file(config.output_path + ".quarantine", quarantined);
        }
    } catch (...) {
        remove_dir_recursive(fragment_dir);
        throw;
    }
    remove_dir_recursive(fragment_dir);

    for (std::size_t i = 0; i < kPhaseCount; ++i) {
        report.phases[i] = inst.phase(static_cast<Phase>(i));
    }
    report.wall_seconds = total.seconds();
    report.finalize_totals();
    return report;
}

RunReport run_sort(RunConfig config) {
    config.resolve_and_validate();
    switch (config.algorithm) {
        case Algorithm::Elsar:
            return elsar_sort(config);
        case Algorithm::Mergesort:
            return mergesort_sort(config);
    }
    throw ConfigError("unknown algorithm");
}

} // namespace elsort
