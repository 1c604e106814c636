#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "elsort/cdf_model.hpp"
#include "elsort/datagen.hpp"
#include "elsort/error.hpp"
#include "elsort/key_encoding.hpp"
#include "elsort/rng.hpp"

#include "test_util.hpp"

using namespace elsort;

namespace {

/// Empirical CDF of a sorted sample: min -> 0, max -> 1.
double empirical_cdf(const std::vector<std::uint64_t>& sorted_keys, std::size_t rank) {
    return static_cast<double>(rank) / static_cast<double>(sorted_keys.size() - 1);
}

TrainingSample uniform_sample(std::size_t n, std::uint64_t seed) {
    SplitMix64 rng(seed);
    TrainingSample s;
    s.keys.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        s.keys.push_back(rng.next_below(kMaxEncodedKey + 1));
    }
    std::sort(s.keys.begin(), s.keys.end());
    return s;
}

} // namespace

TEST_CASE("two extreme keys fit an exact line") {
    TrainingSample sample;
    sample.keys = {0, kMaxEncodedKey};
    const CdfModel model = CdfModel::train(sample, 1);
    CHECK(model.predict(0) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(model.predict(kMaxEncodedKey) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("trained model tracks the empirical CDF of a uniform sample") {
    const TrainingSample sample = uniform_sample(10000, 3);
    const CdfModel model = CdfModel::train(sample, 1000);
    double worst = 0.0;
    for (std::size_t i = 0; i < sample.keys.size(); ++i) {
        const double err =
            std::abs(model.predict(sample.keys[i]) - empirical_cdf(sample.keys, i));
        worst = std::max(worst, err);
    }
    CHECK(worst <= 0.05);
}

TEST_CASE("all-identical sample degenerates to a constant") {
    TrainingSample sample;
    sample.keys.assign(64, 123456789ULL);
    const CdfModel model = CdfModel::train(sample, 8);
    const double p = model.predict(123456789ULL);
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
    CHECK(model.predict(0) <= p);
    CHECK(model.predict(kMaxEncodedKey) >= p);
}

TEST_CASE("train rejects tiny samples") {
    TrainingSample sample;
    sample.keys = {42};
    CHECK_THROWS_AS(CdfModel::train(sample, 10), InsufficientSampleError);
}

TEST_CASE("predictions clamp at the sample boundaries") {
    const TrainingSample sample = uniform_sample(1000, 17);
    const CdfModel model = CdfModel::train(sample, 100);
    CHECK(model.predict(0) <= empirical_cdf(sample.keys, 0) + 1e-12);
    CHECK(model.predict(kMaxEncodedKey) <= 1.0);
    CHECK(model.predict(kMaxEncodedKey) >= model.predict(sample.keys.back()));
}

TEST_CASE("predict is monotone over random pairs") {
    const TrainingSample sample = uniform_sample(5000, 23);
    const CdfModel model = CdfModel::train(sample, 1000);
    SplitMix64 rng(29);
    for (int i = 0; i < 100000; ++i) {
        std::uint64_t a = rng.next_below(kMaxEncodedKey + 1);
        std::uint64_t b = rng.next_below(kMaxEncodedKey + 1);
        if (a > b) std::swap(a, b);
        CHECK(model.predict(a) <= model.predict(b));
    }
}

TEST_CASE("partition_of maps prediction boundaries as specified") {
    // Models pinned by hand: predict 0, 0.5 and 1 via a two-point fit.
    TrainingSample sample;
    sample.keys = {0, 2};
    const CdfModel model = CdfModel::train(sample, 1);
    CHECK(partition_of(model, 0, 7) == 0);    // predict 0 -> first partition
    CHECK(partition_of(model, 1, 4) == 2);    // predict 0.5, f=4 -> floor(2)
    CHECK(partition_of(model, 2, 7) == 6);    // predict 1 -> clamped to f-1
    CHECK(partition_of(model, kMaxEncodedKey, 7) == 6);
}

TEST_CASE("partition_of follows key order") {
    const TrainingSample sample = uniform_sample(2000, 31);
    const CdfModel model = CdfModel::train(sample, 64);
    SplitMix64 rng(37);
    for (int i = 0; i < 20000; ++i) {
        std::uint64_t a = rng.next_below(kMaxEncodedKey + 1);
        std::uint64_t b = rng.next_below(kMaxEncodedKey + 1);
        if (a > b) std::swap(a, b);
        CHECK(partition_of(model, a, 100) <= partition_of(model, b, 100));
    }
}

TEST_CASE("radix_partition_of splits the domain equi-width") {
    CHECK(radix_partition_of(0, 1000) == 0);
    CHECK(radix_partition_of(kMaxEncodedKey, 1000) == 999);
    CHECK(radix_partition_of(kMaxEncodedKey / 2, 2) == 0);
    CHECK(radix_partition_of(kMaxEncodedKey / 2 + 1, 2) == 1);
    // Brute-force cross-check on random keys.
    SplitMix64 rng(41);
    for (int i = 0; i < 10000; ++i) {
        const std::uint64_t k = rng.next_below(kMaxEncodedKey + 1);
        const std::size_t f = 1 + rng.next_below(5000);
        const auto expected = static_cast<std::size_t>(
            static_cast<unsigned __int128>(k) * f / (static_cast<unsigned __int128>(kMaxEncodedKey) + 1));
        CHECK(radix_partition_of(k, f) == expected);
    }
}

TEST_CASE("equi-depth: sample keys spread over partitions") {
    // Keys from the skewed generator; the model should still spread the
    // sample itself near-uniformly over 100 partitions.
    const SkewTable table = make_skew_table(7);
    TrainingSample sample;
    for (std::uint64_t i = 0; i < 20000; ++i) {
        const Record r = make_record(7, i, true, &table);
        sample.keys.push_back(encode_record_key_unchecked(r));
    }
    std::sort(sample.keys.begin(), sample.keys.end());

    const CdfModel model = CdfModel::train(sample, 1000);
    constexpr std::size_t f = 100;
    std::vector<std::uint64_t> loads(f, 0);
    for (const std::uint64_t k : sample.keys) {
        ++loads[partition_of(model, k, f)];
    }
    const double mean = static_cast<double>(sample.keys.size()) / f;
    const std::uint64_t max_load = *std::max_element(loads.begin(), loads.end());
    CHECK(static_cast<double>(max_load) <= 3.0 * mean);
}

TEST_CASE("draw_sample modes and determinism") {
    testutil::ScratchDir dir("sample");
    std::vector<Record> records;
    SplitMix64 rng(5);
    for (int i = 0; i < 1000; ++i) records.push_back(testutil::random_record(rng));
    testutil::write_records(dir.file("input"), records);
    const RecordFile input = stat_record_file(dir.file("input"));

    SUBCASE("one percent of a 1000-record batch is 10 keys") {
        const TrainingSample s = draw_sample(input, 0.01, 1000000, 1, 4096);
        CHECK(s.keys.size() == 10);
        CHECK(std::is_sorted(s.keys.begin(), s.keys.end()));
    }

    SUBCASE("rate 1.0 takes the whole 5-record file, sorted") {
        std::vector<Record> five(records.begin(), records.begin() + 5);
        testutil::write_records(dir.file("five"), five);
        const TrainingSample s =
            draw_sample(stat_record_file(dir.file("five")), 1.0, 1000000, 1, 4096);
        REQUIRE(s.keys.size() == 5);
        std::vector<std::uint64_t> expected;
        for (const auto& r : five) expected.push_back(encode_record_key_unchecked(r));
        std::sort(expected.begin(), expected.end());
        CHECK(s.keys == expected);
    }

    SUBCASE("same seed, same sample; different seed, different sample") {
        const TrainingSample a = draw_sample(input, 0.05, 1000000, 9, 512);
        const TrainingSample b = draw_sample(input, 0.05, 1000000, 9, 512);
        const TrainingSample c = draw_sample(input, 0.05, 1000000, 10, 512);
        CHECK(a.keys == b.keys);
        CHECK(a.keys != c.keys);
    }

    SUBCASE("first-batch mode only sees the first batch") {
        // Batch of 100: every sampled key must come from records[0..100).
        const TrainingSample s = draw_sample(input, 1.0, 1000000, 3, 100);
        CHECK(s.keys.size() == 100);
        std::vector<std::uint64_t> pool;
        for (int i = 0; i < 100; ++i) {
            pool.push_back(encode_record_key_unchecked(records[i]));
        }
        std::sort(pool.begin(), pool.end());
        CHECK(s.keys == pool);
    }

    SUBCASE("reservoir mode draws from the whole file") {
        const TrainingSample s =
            draw_sample(input, 0.2, 1000000, 3, 100, SampleMode::Reservoir);
        CHECK(s.keys.size() == 200); // 0.2 * 1000, not limited to one batch
        const TrainingSample again =
            draw_sample(input, 0.2, 1000000, 3, 100, SampleMode::Reservoir);
        CHECK(s.keys == again.keys);
    }

    SUBCASE("cap limits the sample") {
        const TrainingSample s = draw_sample(input, 1.0, 37, 3, 4096);
        CHECK(s.keys.size() == 37);
    }

    SUBCASE("empty input is an error") {
        testutil::write_records(dir.file("empty"), {});
        CHECK_THROWS_AS(draw_sample(stat_record_file(dir.file("empty")), 0.01, 100, 1, 64),
                        EmptyInputError);
    }
}

TEST_CASE("partition plan offsets are 100-byte prefix sums") {
    PartitionPlan plan = PartitionPlan::from_sizes({3, 5, 2}, 1);
    CHECK(plan.offsets == std::vector<std::uint64_t>{0, 300, 800});
    CHECK(plan.total_records() == 10);
}
