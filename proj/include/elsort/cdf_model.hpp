#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "elsort/record.hpp"
#include "elsort/report.hpp"
#include "elsort/run_config.hpp"

namespace elsort {

/// Encoded keys drawn from the input, sorted ascending.
struct TrainingSample {
    std::vector<std::uint64_t> keys;
};

/// Draws `min(cap, ceil(rate * batch))` keys without replacement from the
/// first `batch_records` of the input (FirstBatch mode) or reservoir-samples
/// `min(cap, ceil(rate * record_count))` keys from the whole file (Reservoir
/// mode). Deterministic for a given seed. Records with non-printable keys
/// are skipped. Throws EmptyInputError on an empty file.
TrainingSample draw_sample(const RecordFile& input, double rate, std::size_t cap,
                           std::uint64_t seed, std::size_t batch_records,
                           SampleMode mode = SampleMode::FirstBatch,
                           Instrumentation* inst = nullptr);

/// Two-layer model of the empirical key CDF. The root linear model routes a
/// key to one of L leaf models; each leaf is linear with its output clamped
/// to that leaf's CDF sub-interval. Root slope is non-negative and leaf
/// intervals are ordered and non-overlapping, so predictions are monotone in
/// the key for every trained model, not just well-behaved ones.
class CdfModel {
public:
    struct Leaf {
        double slope = 0.0;
        double intercept = 0.0;
        double lo = 0.0;
        double hi = 1.0;
    };

    /// Fits the model: the root maps the observed key range onto the leaf
    /// array, each leaf is least-squares fitted over (key, empirical CDF) for
    /// its routed sample points and clamped to their CDF sub-interval.
    /// Throws InsufficientSampleError when the sample has fewer than 2 keys.
    static CdfModel train(const TrainingSample& sample, std::size_t leaf_count);

    /// Estimated P(X <= key), in [0, 1]. O(1).
    double predict(std::uint64_t key) const;

    std::size_t leaf_count() const { return leaves_.size(); }
    double root_slope() const { return root_slope_; }

    /// Human-readable coefficient dump for debugging; not a load-bearing format.
    void dump(std::ostream& os) const;

private:
    double root_slope_ = 0.0;     // maps key to a fractional leaf index
    double root_intercept_ = 0.0;
    std::vector<Leaf> leaves_;
};

/// Equi-depth partition index: min(floor(predict(key) * f), f - 1).
std::size_t partition_of(const CdfModel& model, std::uint64_t key, std::size_t f);

/// Equi-width split of the encoded-key domain, floor(key * f / 95^9).
/// Benchmark comparison only; skew lands entire clusters in single cells.
std::size_t radix_partition_of(std::uint64_t key, std::size_t f);

/// Partition layout derived from final per-partition record counts.
struct PartitionPlan {
    std::size_t partition_count = 0;         // f
    unsigned reader_count = 0;               // r
    std::vector<std::uint64_t> sizes;        // records per partition
    std::vector<std::uint64_t> offsets;      // output byte offset per partition

    static PartitionPlan from_sizes(std::vector<std::uint64_t> sizes, unsigned readers);

    std::uint64_t total_records() const;
};

} // namespace elsort
