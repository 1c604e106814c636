#include "elsort/internal_sort.hpp"

#include <algorithm>
#include <cstring>

#include "elsort/error.hpp"
#include "elsort/key_encoding.hpp"

namespace elsort {

namespace {

constexpr std::uint32_t kSlotCapacity = 4;

inline const std::uint8_t* key_ptr(const std::uint8_t* bytes, std::uint32_t index) {
    return bytes + std::size_t{index} * kRecordSize;
}

inline int key_compare(const std::uint8_t* bytes, std::uint32_t a, std::uint32_t b) {
    return std::memcmp(key_ptr(bytes, a), key_ptr(bytes, b), kKeySize);
}

} // namespace

SortBuffer::SortBuffer(std::uint64_t capacity_records) : capacity_records_(capacity_records) {
    bytes_.reserve(capacity_records_ * kRecordSize);
    entries_.reserve(capacity_records_);
}

void SortBuffer::append_records(std::span<const std::uint8_t> bytes) {
    if (bytes.size() % kRecordSize != 0) {
        throw MalformedFileError("sort buffer fed " + std::to_string(bytes.size()) +
                                 " bytes, not a record multiple");
    }
    const std::size_t add = bytes.size() / kRecordSize;
    if (capacity_records_ != 0 && entries_.size() + add > capacity_records_) {
        throw PartitionOverflowError("partition holds more than the planned " +
                                     std::to_string(capacity_records_) + " records");
    }
    const std::size_t first = entries_.size();
    bytes_.insert(bytes_.end(), bytes.begin(), bytes.end());
    for (std::size_t i = 0; i < add; ++i) {
        const auto index = static_cast<std::uint32_t>(first + i);
        entries_.push_back(SortEntry{encode_record_key_unchecked(record(index)), index});
    }
}

std::vector<std::uint8_t> SortBuffer::materialize() const {
    std::vector<std::uint8_t> out;
    out.reserve(entries_.size() * kRecordSize);
    for (const SortEntry& e : entries_) {
        const auto* p = key_ptr(bytes_.data(), e.index);
        out.insert(out.end(), p, p + kRecordSize);
    }
    return out;
}

TouchUpStats touch_up(std::span<SortEntry> entries, const std::uint8_t* record_bytes) {
    TouchUpStats stats;
    for (std::size_t i = 1; i < entries.size(); ++i) {
        const SortEntry e = entries[i];
        std::size_t k = i;
        while (k > 0) {
            ++stats.comparisons;
            if (key_compare(record_bytes, entries[k - 1].index, e.index) > 0) {
                entries[k] = entries[k - 1];
                --k;
                ++stats.shifts;
            } else {
                break;
            }
        }
        entries[k] = e;
    }
    return stats;
}

SortStats learned_sort(SortBuffer& buffer, const CdfModel& model, std::size_t partition,
                       std::size_t f) {
    SortStats stats;
    auto entries = buffer.entries();
    const std::size_t n = entries.size();
    stats.records = n;
    if (n < 2) {
        return stats;
    }

    // Pass 1: slot histogram. The global prediction is rescaled into this
    // partition's sub-interval so one model serves every partition. A slot
    // takes at most kSlotCapacity records; later arrivals spill.
    const double base = static_cast<double>(partition) / static_cast<double>(f);
    const double scale = static_cast<double>(f) * static_cast<double>(n);
    std::vector<std::uint32_t> slot_of(n);
    std::vector<std::uint32_t> counts(n, 0);
    std::vector<SortEntry> spill;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = (model.predict(entries[i].encoded) - base) * scale;
        std::size_t slot = v <= 0.0 ? 0 : static_cast<std::size_t>(v);
        if (slot >= n) slot = n - 1;
        slot_of[i] = static_cast<std::uint32_t>(slot);
        if (counts[slot] < kSlotCapacity) {
            ++counts[slot];
        } else {
            slot_of[i] = UINT32_MAX;
            spill.push_back(entries[i]);
        }
    }
    stats.spilled = spill.size();

    // Pass 2: prefix sums, then scatter placed entries in arrival order.
    std::vector<std::uint32_t> cursor(n);
    std::uint32_t running = 0;
    for (std::size_t s = 0; s < n; ++s) {
        cursor[s] = running;
        running += counts[s];
    }
    std::vector<SortEntry> placed(running);
    for (std::size_t i = 0; i < n; ++i) {
        if (slot_of[i] != UINT32_MAX) {
            placed[cursor[slot_of[i]]++] = entries[i];
        }
    }

    // Spill is fully ordered by comparison sort on the whole key, so even a
    // buffer of identical encodings leaves the merge nearly sorted.
    const std::uint8_t* bytes = buffer.record_bytes();
    std::sort(spill.begin(), spill.end(), [bytes](const SortEntry& a, const SortEntry& b) {
        return key_compare(bytes, a.index, b.index) < 0;
    });

    // Merge placed and spill by encoded key, placed side first on ties.
    std::size_t pi = 0;
    std::size_t si = 0;
    std::size_t out = 0;
    while (pi < placed.size() && si < spill.size()) {
        if (spill[si].encoded < placed[pi].encoded) {
            entries[out++] = spill[si++];
        } else {
            entries[out++] = placed[pi++];
        }
    }
    while (pi < placed.size()) entries[out++] = placed[pi++];
    while (si < spill.size()) entries[out++] = spill[si++];

    stats.touch_up = touch_up(entries, bytes);
    return stats;
}

} // namespace elsort
