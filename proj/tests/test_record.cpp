#include <doctest.h>

#include <algorithm>
#include <cstring>

#include "elsort/error.hpp"
#include "elsort/record.hpp"
#include "elsort/rng.hpp"

#include "test_util.hpp"

using namespace elsort;
using testutil::make_record;

TEST_CASE("compare_keys is byte-lexicographic on keys only") {
    CHECK(compare_keys(make_record("AAAAAAAAAA"), make_record("AAAAAAAAAB")) ==
          std::strong_ordering::less);

    Record a = make_record("ZZZZZZZZZZ", 'x');
    Record b = make_record("ZZZZZZZZZZ", 'y');
    CHECK(compare_keys(a, b) == std::strong_ordering::equal);

    // '!' is byte 33, '~' is byte 126; byte-wise comparison decides at byte 0.
    Record bang = make_record("!AAAAAAAAA");
    Record tilde = make_record("~AAAAAAAAA");
    REQUIRE(std::memcmp(bang.key.data(), tilde.key.data(), kKeySize) < 0);
    CHECK(compare_keys(bang, tilde) == std::strong_ordering::less);
}

TEST_CASE("compare_keys is a total preorder on random keys") {
    SplitMix64 rng(7);
    for (int i = 0; i < 2000; ++i) {
        const Record a = testutil::random_record(rng);
        const Record b = testutil::random_record(rng);
        const Record c = testutil::random_record(rng);

        CHECK(compare_keys(a, a) == std::strong_ordering::equal);

        // Antisymmetry on keys.
        if (compare_keys(a, b) == std::strong_ordering::less) {
            CHECK(compare_keys(b, a) == std::strong_ordering::greater);
        }
        if (compare_keys(a, b) == std::strong_ordering::equal) {
            CHECK(std::memcmp(a.key.data(), b.key.data(), kKeySize) == 0);
        }

        // Transitivity.
        if (compare_keys(a, b) != std::strong_ordering::greater &&
            compare_keys(b, c) != std::strong_ordering::greater) {
            CHECK(compare_keys(a, c) != std::strong_ordering::greater);
        }
    }
}

TEST_CASE("record_hash matches an independent FNV-1a implementation") {
    Record zero;
    zero.key.fill(0);
    zero.payload.fill(0);
    const std::uint64_t expected =
        testutil::fnv1a64(reinterpret_cast<const std::uint8_t*>(&zero), kRecordSize);
    CHECK(expected == 2287932734527865717ULL); // frozen from the oracle
    CHECK(record_hash(zero) == expected);

    // Identical records hash identically.
    const Record a = make_record("0123456789", 'q');
    const Record b = make_record("0123456789", 'q');
    CHECK(record_hash(a) == record_hash(b));

    // One payload byte flipped: both routes agree and the hashes differ.
    Record c = a;
    c.payload[41] ^= 1;
    CHECK(record_hash(c) ==
          testutil::fnv1a64(reinterpret_cast<const std::uint8_t*>(&c), kRecordSize));
    CHECK(record_hash(c) != record_hash(a));
}

TEST_CASE("file_checksum sums record hashes and ignores order") {
    testutil::ScratchDir dir("record");

    SUBCASE("empty file") {
        testutil::write_records(dir.file("empty"), {});
        CHECK(file_checksum(stat_record_file(dir.file("empty"))) == 0);
    }

    SUBCASE("three records equal the brute-force sum") {
        std::vector<Record> records = {make_record("cccccccccc"), make_record("aaaaaaaaaa"),
                                       make_record("bbbbbbbbbb")};
        std::uint64_t expected = 0;
        for (const auto& r : records) {
            expected += testutil::fnv1a64(reinterpret_cast<const std::uint8_t*>(&r),
                                          kRecordSize);
        }
        testutil::write_records(dir.file("three"), records);
        CHECK(file_checksum(stat_record_file(dir.file("three"))) == expected);
    }

    SUBCASE("any permutation of a random file keeps the checksum") {
        SplitMix64 rng(99);
        for (int round = 0; round < 10; ++round) {
            std::vector<Record> records;
            const std::size_t n = 1 + rng.next_below(64);
            for (std::size_t i = 0; i < n; ++i) {
                records.push_back(testutil::random_record(rng));
            }
            testutil::write_records(dir.file("orig"), records);
            const std::uint64_t before = file_checksum(stat_record_file(dir.file("orig")));

            for (std::size_t i = n; i > 1; --i) {
                std::swap(records[i - 1], records[rng.next_below(i)]);
            }
            testutil::write_records(dir.file("perm"), records);
            CHECK(file_checksum(stat_record_file(dir.file("perm"))) == before);
        }
    }

    SUBCASE("truncated file is rejected") {
        std::vector<std::uint8_t> bytes(kRecordSize + 37, 'x');
        write_entire_file(dir.file("torn"), bytes);
        CHECK_THROWS_AS(stat_record_file(dir.file("torn")), MalformedFileError);
    }
}

TEST_CASE("record round-trips through a file byte-exactly") {
    testutil::ScratchDir dir("roundtrip");
    SplitMix64 rng(5);
    std::vector<Record> records;
    for (int i = 0; i < 50; ++i) records.push_back(testutil::random_record(rng));

    testutil::write_records(dir.file("io"), records);
    const auto back = testutil::read_records(dir.file("io"));
    REQUIRE(back.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(std::memcmp(&records[i], &back[i], kRecordSize) == 0);
    }
}
