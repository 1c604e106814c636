#include <doctest.h>

#include <algorithm>
#include <vector>

#include "elsort/datagen.hpp"
#include "elsort/error.hpp"
#include "elsort/io.hpp"
#include "elsort/record.hpp"
#include "elsort/report.hpp"
#include "elsort/run_config.hpp"
#include "elsort/sorter.hpp"

#include "test_util.hpp"

using namespace elsort;

namespace {

RunConfig base_config(const testutil::ScratchDir& dir, const std::string& in,
                      const std::string& out) {
    RunConfig config;
    config.input_path = dir.file(in);
    config.output_path = dir.file(out);
    config.temp_dir = dir.path();
    config.readers = 3;
    config.partitions = 50;
    config.memory_budget = 16 << 20;
    config.check_invariants = true;
    return config;
}

} // namespace

TEST_CASE("elsar end to end: sorted output, checksum preserved") {
    testutil::ScratchDir dir("e2e");
    for (const bool skew : {false, true}) {
        GenConfig gen;
        gen.records = 50000;
        gen.seed = skew ? 101 : 100;
        gen.skew = skew;
        gen.threads = 2;
        generate_records(gen, dir.file("input"));

        RunConfig config = base_config(dir, "input", "output");
        config.sample_mode = skew ? SampleMode::Reservoir : SampleMode::FirstBatch;
        const RunReport report = run_sort(config);

        const ValidationReport validation = validate_file(dir.file("output"));
        CHECK(validation.sorted);
        CHECK(validation.record_count == gen.records);
        CHECK(validation.checksum == validate_file(dir.file("input")).checksum);
        CHECK(report.checksum_input == report.checksum_output);
        CHECK(report.checksum_output == validation.checksum);
        CHECK(report.quarantined_records == 0);

        // Fragment lifecycle: written in the partition phase, read back in
        // the gather phase, byte for byte.
        CHECK(report.phase(Phase::Partition).bytes_written ==
              report.phase(Phase::Gather).bytes_read);
        CHECK(report.phase(Phase::Partition).bytes_written == report.input_bytes);
        CHECK(report.peak_resident_bytes <= config.memory_budget);
    }
}

TEST_CASE("elsar and the baseline produce the same key stream") {
    testutil::ScratchDir dir("equiv");
    GenConfig gen;
    gen.records = 30000;
    gen.seed = 202;
    gen.skew = true;
    generate_records(gen, dir.file("input"));

    RunConfig config = base_config(dir, "input", "learned");
    config.sample_mode = SampleMode::Reservoir;
    run_sort(config);

    config.output_path = dir.file("baseline");
    config.algorithm = Algorithm::Mergesort;
    run_sort(config);

    CHECK(testutil::read_keys(dir.file("learned")) ==
          testutil::read_keys(dir.file("baseline")));
}

TEST_CASE("degenerate inputs") {
    testutil::ScratchDir dir("degenerate");

    SUBCASE("empty file sorts to an empty file") {
        testutil::write_records(dir.file("input"), {});
        RunConfig config = base_config(dir, "input", "output");
        const RunReport report = run_sort(config);
        CHECK(report.record_count == 0);
        CHECK(validate_file(dir.file("output")).record_count == 0);
    }

    SUBCASE("single record copies through") {
        testutil::write_records(dir.file("input"), {testutil::make_record("only-one!!")});
        RunConfig config = base_config(dir, "input", "output");
        const RunReport report = run_sort(config);
        CHECK(report.checksum_input == report.checksum_output);
        const auto out = testutil::read_records(dir.file("output"));
        REQUIRE(out.size() == 1);
        CHECK(std::memcmp(&out[0], testutil::read_records(dir.file("input")).data(),
                          kRecordSize) == 0);
    }

    SUBCASE("tiny files below the sample floor still sort") {
        std::vector<Record> records = {testutil::make_record("zzzz"),
                                       testutil::make_record("aaaa"),
                                       testutil::make_record("mmmm")};
        testutil::write_records(dir.file("input"), records);
        RunConfig config = base_config(dir, "input", "output");
        run_sort(config);
        const auto keys = testutil::read_keys(dir.file("output"));
        CHECK(keys == testutil::sorted_keys_oracle(records));
    }
}

TEST_CASE("quarantine: malformed keys are set aside and the rest sorts") {
    testutil::ScratchDir dir("quarantine");
    SplitMix64 rng(33);
    std::vector<Record> records;
    for (int i = 0; i < 5000; ++i) records.push_back(testutil::random_record(rng));
    records[123].key[0] = 0x01;
    records[4000].key[9] = 0xff;
    testutil::write_records(dir.file("input"), records);

    RunConfig config = base_config(dir, "input", "output");
    const RunReport report = run_sort(config);
    CHECK(report.quarantined_records == 2);

    const ValidationReport validation = validate_file(dir.file("output"));
    CHECK(validation.sorted);
    CHECK(validation.record_count == 4998);

    const auto bad = testutil::read_records(dir.file("output") + ".quarantine");
    CHECK(bad.size() == 2);

    // Conservation: output plus quarantine is a permutation of the input.
    std::uint64_t quarantine_sum = 0;
    for (const auto& r : bad) quarantine_sum += record_hash(r);
    CHECK(validation.checksum + quarantine_sum ==
          validate_file(dir.file("input")).checksum);
    remove_file_if_exists(dir.file("output") + ".quarantine");
}

TEST_CASE("reports are deterministic for a fixed seed and config") {
    testutil::ScratchDir dir("deterministic");
    GenConfig gen;
    gen.records = 20000;
    gen.seed = 7;
    generate_records(gen, dir.file("input"));

    RunConfig config = base_config(dir, "input", "out1");
    const RunReport first = run_sort(config);
    config.output_path = dir.file("out2");
    const RunReport second = run_sort(config);

    CHECK(first.checksum_input == second.checksum_input);
    CHECK(first.checksum_output == second.checksum_output);
    CHECK(first.partition_max == second.partition_max);
    CHECK(read_entire_file(dir.file("out1")) == read_entire_file(dir.file("out2")));
}

TEST_CASE("configuration and I/O errors carry their categories") {
    testutil::ScratchDir dir("errors");
    testutil::write_records(dir.file("input"), {testutil::make_record("x")});

    RunConfig config = base_config(dir, "input", "output");
    config.partitions = 0;
    CHECK_THROWS_AS(run_sort(config), ConfigError);

    config = base_config(dir, "input", "input"); // same path
    CHECK_THROWS_AS(run_sort(config), ConfigError);

    config = base_config(dir, "missing", "output");
    CHECK_THROWS_AS(run_sort(config), IoError);

    std::vector<std::uint8_t> torn(123, 0);
    write_entire_file(dir.file("torn"), torn);
    config = base_config(dir, "torn", "output");
    CHECK_THROWS_AS(run_sort(config), MalformedFileError);
}

TEST_CASE("training is a sliver of the run at a million records") {
    testutil::ScratchDir dir("train_share");
    GenConfig gen;
    gen.records = 1000000;
    gen.seed = 1;
    gen.threads = 2;
    generate_records(gen, dir.file("input"));

    RunConfig config = base_config(dir, "input", "output");
    config.partitions = 500;
    config.memory_budget = 256 << 20;
    config.check_invariants = false;
    const RunReport report = run_sort(config);

    CHECK(validate_file(dir.file("output")).sorted);
    CHECK(report.phase(Phase::Train).seconds < 0.05 * report.wall_seconds);

    // The partition-and-concatenate design reads and writes each record
    // twice; everything extra is the training sample.
    const double io_ratio = static_cast<double>(report.total_io_bytes) /
                            static_cast<double>(report.input_bytes);
    CHECK(io_ratio >= 4.0);
    CHECK(io_ratio <= 4.4);
}
