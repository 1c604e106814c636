#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "elsort/cdf_model.hpp"
#include "elsort/datagen.hpp"
#include "elsort/error.hpp"
#include "elsort/io.hpp"
#include "elsort/key_encoding.hpp"
#include "elsort/record.hpp"

#include "test_util.hpp"

using namespace elsort;

namespace {

/// stddev of key counts over equi-width bins of the encoded domain.
double histogram_stddev(const std::string& path, std::size_t bins) {
    std::vector<std::uint64_t> counts(bins, 0);
    for (const auto& r : testutil::read_records(path)) {
        ++counts[radix_partition_of(encode_record_key_unchecked(r), bins)];
    }
    double mean = 0.0;
    for (const auto c : counts) mean += static_cast<double>(c);
    mean /= static_cast<double>(bins);
    double var = 0.0;
    for (const auto c : counts) {
        const double d = static_cast<double>(c) - mean;
        var += d * d;
    }
    return std::sqrt(var / static_cast<double>(bins));
}

} // namespace

TEST_CASE("generator basics") {
    testutil::ScratchDir dir("gen");

    SUBCASE("count zero writes an empty file") {
        GenConfig gen;
        gen.records = 0;
        const RecordFile f = generate_records(gen, dir.file("empty"));
        CHECK(f.byte_length == 0);
        CHECK(stat_record_file(dir.file("empty")).record_count == 0);
    }

    SUBCASE("records are well-formed and payloads name their origin") {
        GenConfig gen;
        gen.records = 500;
        gen.seed = 12345;
        generate_records(gen, dir.file("plain"));
        const auto records = testutil::read_records(dir.file("plain"));
        REQUIRE(records.size() == 500);
        for (const auto& r : records) {
            CHECK(key_is_printable(r));
        }
        const std::string payload(reinterpret_cast<const char*>(records[7].payload.data()),
                                  kPayloadSize);
        CHECK(payload.substr(0, 1) == "S");
        CHECK(payload.find("0000000000003039") != std::string::npos); // seed 12345
        CHECK(payload.find("I0000000000000007") != std::string::npos);
    }

    SUBCASE("same configuration is byte-identical, including across thread counts") {
        GenConfig gen;
        gen.records = 4321;
        gen.seed = 9;
        gen.skew = true;
        gen.threads = 1;
        generate_records(gen, dir.file("a"));
        gen.threads = 5;
        generate_records(gen, dir.file("b"));
        CHECK(read_entire_file(dir.file("a")) == read_entire_file(dir.file("b")));

        gen.seed = 10;
        generate_records(gen, dir.file("c"));
        CHECK(read_entire_file(dir.file("a")) != read_entire_file(dir.file("c")));
    }
}

TEST_CASE("skew substitutes table prefixes by record index") {
    CHECK(skew_table_index(1) == 0);
    CHECK(skew_table_index(2) == 1);
    CHECK(skew_table_index(3) == 1);
    CHECK(skew_table_index(1024) == 10);
    CHECK(skew_table_index(1ULL << 63) == 63);

    const SkewTable table = make_skew_table(4);
    for (const auto& entry : table) {
        for (const std::uint8_t b : entry) {
            CHECK(b >= 32);
            CHECK(b <= 126);
        }
    }

    // Record index i (0-based) uses table entry floor(log2(i+1)) mod 128.
    const Record r0 = make_record(4, 0, true, &table);
    CHECK(std::equal(table[0].begin(), table[0].end(), r0.key.begin()));
    const Record r1023 = make_record(4, 1023, true, &table);
    CHECK(std::equal(table[10].begin(), table[10].end(), r1023.key.begin()));

    // Bytes 7..10 stay as the uniform generator produced them.
    const Record plain = make_record(4, 1023, false, nullptr);
    CHECK(std::equal(plain.key.begin() + 6, plain.key.end(), r1023.key.begin() + 6));
}

TEST_CASE("skewed files are visibly more clustered than uniform ones") {
    testutil::ScratchDir dir("skewhist");
    GenConfig gen;
    gen.records = 200000;
    gen.seed = 31;
    gen.threads = 2;
    gen.skew = false;
    generate_records(gen, dir.file("uniform"));
    gen.skew = true;
    generate_records(gen, dir.file("skewed"));

    const double uniform_sd = histogram_stddev(dir.file("uniform"), 1000);
    const double skewed_sd = histogram_stddev(dir.file("skewed"), 1000);
    CHECK(skewed_sd >= 10.0 * uniform_sd);
}

TEST_CASE("validate reports sortedness, violations and the checksum") {
    testutil::ScratchDir dir("validate");

    SUBCASE("a sorted 3-record file, checksum equal to the brute-force sum") {
        std::vector<Record> records = {testutil::make_record("aaa"),
                                       testutil::make_record("bbb"),
                                       testutil::make_record("ccc")};
        std::uint64_t expected = 0;
        for (const auto& r : records) {
            expected += testutil::fnv1a64(reinterpret_cast<const std::uint8_t*>(&r),
                                          kRecordSize);
        }
        testutil::write_records(dir.file("sorted"), records);
        const ValidationReport report = validate_file(dir.file("sorted"));
        CHECK(report.sorted);
        CHECK(!report.first_violation_index.has_value());
        CHECK(report.checksum == expected);
        CHECK(report.record_count == 3);
    }

    SUBCASE("a planted inversion is located") {
        std::vector<Record> records = {testutil::make_record("aaa"),
                                       testutil::make_record("ccc"),
                                       testutil::make_record("bbb"),
                                       testutil::make_record("ddd")};
        testutil::write_records(dir.file("inverted"), records);
        const ValidationReport report = validate_file(dir.file("inverted"));
        CHECK(!report.sorted);
        REQUIRE(report.first_violation_index.has_value());
        CHECK(*report.first_violation_index == 2);
    }

    SUBCASE("empty file validates with checksum zero") {
        testutil::write_records(dir.file("empty"), {});
        const ValidationReport report = validate_file(dir.file("empty"));
        CHECK(report.sorted);
        CHECK(report.checksum == 0);
        CHECK(report.record_count == 0);
    }

    SUBCASE("truncated file is malformed") {
        std::vector<std::uint8_t> bytes(150, 'x');
        write_entire_file(dir.file("torn"), bytes);
        CHECK_THROWS_AS(validate_file(dir.file("torn")), MalformedFileError);
    }
}
