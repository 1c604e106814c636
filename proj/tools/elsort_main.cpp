// Command-line front end: gen / sort / validate / bench subcommands over the
// elsort library. Exit codes: 0 success, 1 sort or validation failure,
// 2 configuration error, 3 I/O error.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "elsort/datagen.hpp"
#include "elsort/error.hpp"
#include "elsort/io.hpp"
#include "elsort/report.hpp"
#include "elsort/run_config.hpp"
#include "elsort/sorter.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

std::string default_temp_dir() {
    if (const char* env = std::getenv("ELSORT_TMPDIR"); env != nullptr && *env != '\0') {
        return env;
    }
    return "/tmp";
}

struct SortOptions {
    elsort::RunConfig config;
    std::string algorithm = "elsar";
    std::string sample_mode = "first-batch";
    std::string memory;
    std::string report_json;
    std::string report_csv;
    bool quiet = false;
};

int do_sort(SortOptions& opt) {
    if (opt.algorithm == "elsar") {
        opt.config.algorithm = elsort::Algorithm::Elsar;
    } else if (opt.algorithm == "mergesort") {
        opt.config.algorithm = elsort::Algorithm::Mergesort;
    } else {
        throw elsort::ConfigError("unknown algorithm '" + opt.algorithm + "'");
    }
    if (opt.sample_mode == "first-batch") {
        opt.config.sample_mode = elsort::SampleMode::FirstBatch;
    } else if (opt.sample_mode == "reservoir") {
        opt.config.sample_mode = elsort::SampleMode::Reservoir;
    } else {
        throw elsort::ConfigError("unknown sample mode '" + opt.sample_mode + "'");
    }
    if (!opt.memory.empty()) {
        opt.config.memory_budget = elsort::parse_byte_size(opt.memory);
    }

    const elsort::RunReport report = elsort::run_sort(opt.config);
    if (!opt.quiet) {
        report.print_text(std::cout);
    }
    if (!opt.report_json.empty()) report.write_json(opt.report_json);
    if (!opt.report_csv.empty()) report.write_csv(opt.report_csv);
    return kExitOk;
}

struct BenchOptions {
    std::string out_csv;
    std::vector<std::uint64_t> sizes{100000, 1000000, 10000000};
    std::uint64_t seed = 1;
    std::string temp_dir = default_temp_dir();
    std::string sample_mode = "first-batch";
    std::string memory;
    std::size_t partitions = 1000;
    unsigned readers = 0;
};

int do_bench(const BenchOptions& opt) {
    std::ofstream csv(opt.out_csv);
    if (!csv) throw elsort::IoError("cannot write '" + opt.out_csv + "'");
    csv << "algorithm,records,skew,seconds,bytes_read,bytes_written,"
           "part_stddev_over_mean\n";

    const std::string work_dir = elsort::make_temp_dir(opt.temp_dir, "elsort_bench_");
    try {
        for (const std::uint64_t records : opt.sizes) {
            for (const bool skew : {false, true}) {
                const std::string input = work_dir + "/input";
                elsort::GenConfig gen;
                gen.records = records;
                gen.seed = opt.seed;
                gen.skew = skew;
                gen.threads = elsort::detect_logical_cpus();
                elsort::generate_records(gen, input);

                for (const char* algorithm : {"elsar", "mergesort"}) {
                    const std::string output = work_dir + "/output";
                    elsort::RunConfig config;
                    config.input_path = input;
                    config.output_path = output;
                    config.temp_dir = opt.temp_dir;
                    config.seed = opt.seed;
                    config.partitions = opt.partitions;
                    config.readers = opt.readers;
                    config.algorithm = std::string(algorithm) == "elsar"
                                           ? elsort::Algorithm::Elsar
                                           : elsort::Algorithm::Mergesort;
                    config.sample_mode = opt.sample_mode == "reservoir"
                                             ? elsort::SampleMode::Reservoir
                                             : elsort::SampleMode::FirstBatch;
                    if (!opt.memory.empty()) {
                        config.memory_budget = elsort::parse_byte_size(opt.memory);
                    }
                    const elsort::RunReport report = elsort::run_sort(config);

                    char line[256];
                    std::snprintf(line, sizeof line, "%s,%llu,%d,%.3f,%llu,%llu,%.6f\n",
                                  algorithm, static_cast<unsigned long long>(records),
                                  skew ? 1 : 0, report.wall_seconds,
                                  static_cast<unsigned long long>(report.total_bytes_read),
                                  static_cast<unsigned long long>(
                                      report.total_bytes_written),
                                  report.partition_mean > 0.0
                                      ? report.partition_stddev / report.partition_mean
                                      : 0.0);
                    csv << line;
                    csv.flush();
                    elsort::remove_file_if_exists(output);
                }
                elsort::remove_file_if_exists(input);
            }
        }
    } catch (...) {
        elsort::remove_dir_recursive(work_dir);
        throw;
    }
    elsort::remove_dir_recursive(work_dir);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"elsort: learned partition-and-concatenate external sorter"};
    app.require_subcommand(1);

    // gen
    auto* gen_cmd = app.add_subcommand("gen", "generate a record file");
    elsort::GenConfig gen;
    gen.threads = 0; // resolved to the CPU count after parsing
    std::string gen_out;
    gen_cmd->add_option("--records", gen.records, "record count")->required();
    gen_cmd->add_option("--seed", gen.seed, "generator seed");
    gen_cmd->add_flag("--skew", gen.skew, "inject prefix skew");
    gen_cmd->add_option("--threads", gen.threads, "generator threads (default CPUs)");
    gen_cmd->add_option("--out", gen_out, "output path")->required();

    // sort
    auto* sort_cmd = app.add_subcommand("sort", "sort a record file");
    SortOptions sort_opt;
    sort_opt.config.temp_dir = default_temp_dir();
    sort_cmd->add_option("--input", sort_opt.config.input_path, "input file")->required();
    sort_cmd->add_option("--output", sort_opt.config.output_path, "output file")
        ->required();
    sort_cmd->add_option("--algorithm", sort_opt.algorithm, "elsar | mergesort")
        ->check(CLI::IsMember({"elsar", "mergesort"}));
    sort_cmd->add_option("--partitions", sort_opt.config.partitions, "partition count f");
    sort_cmd->add_option("--readers", sort_opt.config.readers,
                         "reader workers r (default CPUs)");
    sort_cmd->add_option("--memory", sort_opt.memory,
                         "memory budget, e.g. 512M (default half of RAM)");
    sort_cmd->add_option("--batch-records", sort_opt.config.batch_records,
                         "records per read batch");
    sort_cmd->add_option("--leaves", sort_opt.config.leaf_count, "model leaf count L");
    sort_cmd->add_option("--sample-rate", sort_opt.config.sample_rate,
                         "training sample rate");
    sort_cmd->add_option("--sample-cap", sort_opt.config.sample_cap,
                         "max training sample size");
    sort_cmd->add_option("--sample-mode", sort_opt.sample_mode,
                         "first-batch | reservoir")
        ->check(CLI::IsMember({"first-batch", "reservoir"}));
    sort_cmd->add_option("--seed", sort_opt.config.seed, "sampling seed");
    sort_cmd->add_option("--temp-dir", sort_opt.config.temp_dir,
                         "fragment directory (env ELSORT_TMPDIR)");
    sort_cmd->add_option("--coalesce-bytes", sort_opt.config.coalesce_bytes,
                         "output coalesce buffer");
    sort_cmd->add_option("--flush-watermark", sort_opt.config.flush_watermark_bytes,
                         "fragment flush watermark bytes");
    sort_cmd->add_option("--descriptor-budget", sort_opt.config.descriptor_budget,
                         "max cached fragment descriptors");
    sort_cmd->add_option("--max-sorters", sort_opt.config.max_sorters,
                         "cap on concurrent sorters");
    sort_cmd->add_option("--merge-fan-in", sort_opt.config.merge_fan_in,
                         "baseline: max runs merged per pass");
    sort_cmd->add_flag("--check-invariants", sort_opt.config.check_invariants,
                       "scan fragments for partition order violations");
    sort_cmd->add_option("--dump-model", sort_opt.config.model_dump_path,
                         "write model coefficients to a text file");
    sort_cmd->add_option("--report-json", sort_opt.report_json, "write JSON report");
    sort_cmd->add_option("--report-csv", sort_opt.report_csv, "write CSV report");
    sort_cmd->add_flag("--quiet", sort_opt.quiet, "suppress the text report");

    // validate
    auto* val_cmd = app.add_subcommand("validate", "check sortedness and checksum");
    std::string val_input;
    std::string val_json;
    val_cmd->add_option("--input", val_input, "file to validate")->required();
    val_cmd->add_option("--report-json", val_json, "write JSON validation report");

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "sweep sizes x skew x algorithm");
    BenchOptions bench;
    bench_cmd->add_option("--out", bench.out_csv, "CSV output path")->required();
    bench_cmd->add_option("--sizes", bench.sizes, "record counts to sweep, e.g. 1000,100000")
        ->delimiter(',');
    bench_cmd->add_option("--seed", bench.seed, "generator seed");
    bench_cmd->add_option("--partitions", bench.partitions, "partition count f");
    bench_cmd->add_option("--readers", bench.readers, "reader workers");
    bench_cmd->add_option("--memory", bench.memory, "memory budget, e.g. 512M");
    bench_cmd->add_option("--temp-dir", bench.temp_dir, "working directory");
    bench_cmd->add_option("--sample-mode", bench.sample_mode, "first-batch | reservoir")
        ->check(CLI::IsMember({"first-batch", "reservoir"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen_cmd->parsed()) {
            if (gen.threads == 0) gen.threads = elsort::detect_logical_cpus();
            elsort::generate_records(gen, gen_out);
            std::cout << "wrote " << gen.records << " records to " << gen_out << '\n';
            return kExitOk;
        }
        if (sort_cmd->parsed()) {
            return do_sort(sort_opt);
        }
        if (val_cmd->parsed()) {
            const elsort::ValidationReport report = elsort::validate_file(val_input);
            char checksum[17];
            std::snprintf(checksum, sizeof checksum, "%016llx",
                          static_cast<unsigned long long>(report.checksum));
            std::cout << "records  " << report.record_count << '\n'
                      << "sorted   " << (report.sorted ? "yes" : "no") << '\n'
                      << "checksum " << checksum << '\n';
            if (report.first_violation_index) {
                std::cout << "first violation at record " << *report.first_violation_index
                          << '\n';
            }
            if (!val_json.empty()) {
                std::ofstream out(val_json);
                out << "{\n  \"records\": " << report.record_count
                    << ",\n  \"sorted\": " << (report.sorted ? "true" : "false")
                    << ",\n  \"checksum\": \"" << checksum << "\"\n}\n";
            }
            return report.sorted ? kExitOk : kExitFailure;
        }
        if (bench_cmd->parsed()) {
            return do_bench(bench);
        }
    } catch (const elsort::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const elsort::IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const elsort::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitConfig;
}
