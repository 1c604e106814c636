#include "elsort/cdf_model.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "elsort/error.hpp"
#include "elsort/io.hpp"
#include "elsort/key_encoding.hpp"
#include "elsort/rng.hpp"

namespace elsort {

namespace {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Least squares over (x[i], y0 + i*dy), x ascending. Centered accumulation
/// keeps the sums stable for encoded keys near 95^9.
LinearFit fit_line(const std::uint64_t* x, std::size_t n, double y0, double dy) {
    double mean_x = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean_x += static_cast<double>(x[i]);
    mean_x /= static_cast<double>(n);
    const double mean_y = y0 + dy * static_cast<double>(n - 1) / 2.0;

    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double cx = static_cast<double>(x[i]) - mean_x;
        const double cy = (y0 + dy * static_cast<double>(i)) - mean_y;
        sxx += cx * cx;
        sxy += cx * cy;
    }
    if (sxx <= 0.0) {
        return {0.0, mean_y}; // all keys identical: constant model
    }
    const double slope = sxy / sxx;
    return {slope, mean_y - slope * mean_x};
}

/// Leaf index for a fractional root output: round half down, clamp to
/// [0, leaf_count). Clamps before the integer cast so far-out keys cannot
/// overflow it.
std::size_t route_leaf(double pos, std::size_t leaf_count) {
    if (!(pos > 0.5)) return 0;
    if (pos >= static_cast<double>(leaf_count)) return leaf_count - 1;
    const auto leaf = static_cast<std::size_t>(std::ceil(pos - 0.5));
    return leaf >= leaf_count ? leaf_count - 1 : leaf;
}

void read_record_batch(const FileHandle& fh, std::uint64_t first_record, std::size_t count,
                       std::vector<Record>& out) {
    out.resize(count);
    if (count > 0) {
        fh.read_exact(out.data(), count * kRecordSize, first_record * kRecordSize);
    }
}

} // namespace

TrainingSample draw_sample(const RecordFile& input, double rate, std::size_t cap,
                           std::uint64_t seed, std::size_t batch_records, SampleMode mode,
                           Instrumentation* inst) {
    if (input.record_count == 0) {
        throw EmptyInputError("draw_sample: '" + input.path + "' has no records");
    }
    if (!(rate > 0.0) || rate > 1.0) {
        throw ConfigError("draw_sample: rate must be in (0, 1]");
    }

    FileHandle fh = FileHandle::open_read(input.path);
    SplitMix64 rng(seed);
    std::vector<std::uint64_t> keys;

    if (mode == SampleMode::FirstBatch) {
        const std::size_t batch = static_cast<std::size_t>(
            std::min<std::uint64_t>(batch_records, input.record_count));
        std::vector<Record> records;
        read_record_batch(fh, 0, batch, records);
        if (inst != nullptr) inst->add_read(Phase::Train, batch * kRecordSize);

        std::size_t want = static_cast<std::size_t>(
            std::ceil(rate * static_cast<double>(batch)));
        want = std::min(want, cap);
        want = std::min(want, batch);

        // Partial Fisher-Yates: the first `want` slots become a uniform
        // subset of the batch, without replacement.
        std::vector<std::uint32_t> order(batch);
        for (std::size_t i = 0; i < batch; ++i) order[i] = static_cast<std::uint32_t>(i);
        keys.reserve(want);
        for (std::size_t i = 0; i < want; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.next_below(batch - i));
            std::swap(order[i], order[j]);
            if (auto enc = try_encode_record_key(records[order[i]])) {
                keys.push_back(*enc);
            }
        }
    } else {
        std::size_t want = static_cast<std::size_t>(
            std::ceil(rate * static_cast<double>(input.record_count)));
        want = std::min<std::size_t>(want, cap);
        want = static_cast<std::size_t>(
            std::min<std::uint64_t>(want, input.record_count));

        // Reservoir over the whole file, streamed in batches.
        keys.reserve(want);
        std::vector<Record> records;
        std::uint64_t seen = 0;
        std::uint64_t offset_records = 0;
        while (offset_records < input.record_count) {
            const std::size_t chunk = static_cast<std::size_t>(std::min<std::uint64_t>(
                batch_records, input.record_count - offset_records));
            read_record_batch(fh, offset_records, chunk, records);
            if (inst != nullptr) inst->add_read(Phase::Train, chunk * kRecordSize);
            for (std::size_t i = 0; i < chunk; ++i) {
                const auto enc = try_encode_record_key(records[i]);
                ++seen;
                if (!enc) continue;
                if (keys.size() < want) {
                    keys.push_back(*enc);
                } else {
                    const std::uint64_t j = rng.next_below(seen);
                    if (j < want) keys[static_cast<std::size_t>(j)] = *enc;
                }
            }
            offset_records += chunk;
        }
    }

    std::sort(keys.begin(), keys.end());
    return TrainingSample{std::move(keys)};
}

CdfModel CdfModel::train(const TrainingSample& sample, std::size_t leaf_count) {
    const std::size_t n = sample.keys.size();
    if (n < 2) {
        throw InsufficientSampleError("train: need at least 2 sample keys, got " +
                                      std::to_string(n));
    }
    if (leaf_count < 1) {
        throw ConfigError("train: leaf count must be at least 1");
    }
    const std::uint64_t* keys = sample.keys.data();
    const double denom = static_cast<double>(n - 1);

    CdfModel model;
    // Root: key -> fractional leaf index. Anchored to the observed key range
    // so every sampled key routes inside [0, L]. A least-squares root shoots
    // past that range under skew and piles the tails into the edge leaves,
    // where a single leaf line cannot follow a multi-cluster CDF.
    const double lo_key = static_cast<double>(keys[0]);
    const double hi_key = static_cast<double>(keys[n - 1]);
    if (hi_key > lo_key) {
        model.root_slope_ = static_cast<double>(leaf_count) / (hi_key - lo_key);
        model.root_intercept_ = -model.root_slope_ * lo_key;
    } else {
        model.root_slope_ = 0.0;
        model.root_intercept_ = static_cast<double>(leaf_count) / 2.0;
    }

    // Route the sorted sample through the root. A non-negative slope makes
    // the routed leaf sequence non-decreasing, so each leaf owns one
    // contiguous run [begin, end) of sample indices.
    std::vector<std::size_t> begin(leaf_count + 1, 0);
    {
        std::size_t current = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double pos =
                model.root_slope_ * static_cast<double>(keys[i]) + model.root_intercept_;
            const std::size_t leaf = route_leaf(pos, leaf_count);
            while (current < leaf) {
                begin[++current] = i;
            }
        }
        while (current < leaf_count) {
            begin[++current] = n;
        }
    }

    model.leaves_.resize(leaf_count);
    for (std::size_t j = 0; j < leaf_count; ++j) {
        Leaf& leaf = model.leaves_[j];
        const std::size_t b = begin[j];
        const std::size_t e = begin[j + 1];
        leaf.lo = std::min(static_cast<double>(b) / denom, 1.0);
        leaf.hi = std::min(static_cast<double>(e) / denom, 1.0);
        if (e == b) {
            // Empty leaf: constant at the midpoint of its (zero-width) interval.
            leaf.slope = 0.0;
            leaf.intercept = (leaf.lo + leaf.hi) / 2.0;
        } else {
            LinearFit fit = fit_line(keys + b, e - b, static_cast<double>(b) / denom,
                                     1.0 / denom);
            leaf.slope = std::max(fit.slope, 0.0);
            leaf.intercept = fit.slope == leaf.slope
                                 ? fit.intercept
                                 : (leaf.lo + leaf.hi) / 2.0;
        }
    }
    return model;
}

double CdfModel::predict(std::uint64_t key) const {
    const double x = static_cast<double>(key);
    const double pos = root_slope_ * x + root_intercept_;
    const Leaf& leaf = leaves_[route_leaf(pos, leaves_.size())];
    const double raw = leaf.slope * x + leaf.intercept;
    return std::clamp(raw, leaf.lo, leaf.hi);
}

void CdfModel::dump(std::ostream& os) const {
    os << "root " << root_slope_ << ' ' << root_intercept_ << '\n';
    for (std::size_t j = 0; j < leaves_.size(); ++j) {
        const Leaf& l = leaves_[j];
        os << "leaf " << j << ' ' << l.slope << ' ' << l.intercept << " [" << l.lo << ','
           << l.hi << "]\n";
    }
}

std::size_t partition_of(const CdfModel& model, std::uint64_t key, std::size_t f) {
    const double p = model.predict(key);
    const auto raw = static_cast<std::size_t>(p * static_cast<double>(f));
    return raw >= f ? f - 1 : raw;
}

std::size_t radix_partition_of(std::uint64_t key, std::size_t f) {
    constexpr unsigned __int128 kDomain =
        static_cast<unsigned __int128>(kMaxEncodedKey) + 1;
    const unsigned __int128 scaled =
        static_cast<unsigned __int128>(key) * static_cast<unsigned __int128>(f);
    auto raw = static_cast<std::size_t>(scaled / kDomain);
    return raw >= f ? f - 1 : raw;
}

PartitionPlan PartitionPlan::from_sizes(std::vector<std::uint64_t> sizes, unsigned readers) {
    PartitionPlan plan;
    plan.partition_count = sizes.size();
    plan.reader_count = readers;
    plan.offsets.resize(sizes.size());
    std::uint64_t offset = 0;
    for (std::size_t j = 0; j < sizes.size(); ++j) {
        plan.offsets[j] = offset;
        offset += sizes[j] * kRecordSize;
    }
    plan.sizes = std::move(sizes);
    return plan;
}

std::uint64_t PartitionPlan::total_records() const {
    std::uint64_t total = 0;
    for (std::uint64_t s : sizes) total += s;
    return total;
}

} // namespace elsort
