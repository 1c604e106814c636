#include "elsort/datagen.hpp"

#include <cstdio>
#include <cstring>
#include <thread>
#include <vector>

#include "elsort/error.hpp"
#include "elsort/io.hpp"
#include "elsort/rng.hpp"

namespace elsort {

namespace {

constexpr std::uint64_t kSkewTableSeedSalt = 0xa24baed4963ee407ULL;
constexpr std::size_t kKeyDrawsPerRecord = kKeySize;

inline std::uint8_t printable_byte(std::uint64_t v) {
    return static_cast<std::uint8_t>(32 + v % 95);
}

} // namespace

SkewTable make_skew_table(std::uint64_t seed) {
    SkewTable table;
    SplitMix64 rng(seed ^ kSkewTableSeedSalt);
    for (auto& entry : table) {
        for (auto& byte : entry) {
            byte = printable_byte(rng.next());
        }
    }
    return table;
}

std::size_t skew_table_index(std::uint64_t rec_idx) {
    std::size_t log2 = 0;
    while (rec_idx >>= 1) ++log2;
    return log2 % 128;
}

Record make_record(std::uint64_t seed, std::uint64_t index, bool skew,
                   const SkewTable* table) {
    Record r;
    // Stream values [index*10, index*10 + 10) of the master sequence.
    SplitMix64 rng(seed + index * kKeyDrawsPerRecord * kSplitMixGamma);
    for (std::size_t i = 0; i < kKeySize; ++i) {
        r.key[i] = printable_byte(rng.next());
    }
    if (skew) {
        const auto& entry = (*table)[skew_table_index(index + 1)];
        std::memcpy(r.key.data(), entry.data(), entry.size());
    }

    char head[40];
    const int len = std::snprintf(head, sizeof head, "S%016llX I%016llX ",
                                  static_cast<unsigned long long>(seed),
                                  static_cast<unsigned long long>(index));
    std::memcpy(r.payload.data(), head, static_cast<std::size_t>(len));
    std::memset(r.payload.data() + len, '.', kPayloadSize - static_cast<std::size_t>(len));
    return r;
}

RecordFile generate_records(const GenConfig& config, const std::string& out_path) {
    FileHandle out = FileHandle::create_truncate(out_path);
    out.truncate(config.records * kRecordSize);

    const SkewTable table = config.skew ? make_skew_table(config.seed) : SkewTable{};
    const SkewTable* table_ptr = config.skew ? &table : nullptr;

    const unsigned threads =
        static_cast<unsigned>(std::min<std::uint64_t>(
            std::max(config.threads, 1u), std::max<std::uint64_t>(config.records, 1)));

    auto fill_range = [&](std::uint64_t first, std::uint64_t count) {
        constexpr std::size_t kChunk = 8192;
        std::vector<Record> buf;
        buf.reserve(kChunk);
        std::uint64_t done = 0;
        while (done < count) {
            const std::size_t take =
                static_cast<std::size_t>(std::min<std::uint64_t>(kChunk, count - done));
            buf.clear();
            for (std::size_t i = 0; i < take; ++i) {
                buf.push_back(make_record(config.seed, first + done + i, config.skew,
                                          table_ptr));
            }
            out.write_exact(buf.data(), take * kRecordSize,
                            (first + done) * kRecordSize);
            done += take;
        }
    };

    if (threads <= 1) {
        fill_range(0, config.records);
    } else {
        const std::uint64_t quota = config.records / threads;
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(threads);
        for (unsigned t = 0; t < threads; ++t) {
            const std::uint64_t first = quota * t;
            const std::uint64_t count =
                (t + 1 == threads) ? config.records - first : quota;
            pool.emplace_back([&, t, first, count] {
                try {
                    fill_range(first, count);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
        for (auto& t : pool) t.join();
        for (auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }
    return RecordFile{out_path, config.records, config.records * kRecordSize};
}

ValidationReport validate_file(const std::string& path) {
    FileHandle fh = FileHandle::open_read(path);
    const std::uint64_t bytes = fh.size();
    if (bytes % kRecordSize != 0) {
        throw MalformedFileError("'" + path + "' is " + std::to_string(bytes) +
                                 " bytes, not a multiple of " + std::to_string(kRecordSize));
    }

    ValidationReport report;
    report.record_count = bytes / kRecordSize;

    constexpr std::size_t kChunkRecords = 4096;
    std::vector<Record> chunk(kChunkRecords);
    std::array<std::uint8_t, kKeySize> prev_key{};
    bool have_prev = false;
    std::uint64_t offset = 0;
    std::uint64_t index = 0;

    while (offset < bytes) {
        const std::size_t take = static_cast<std::size_t>(std::min<std::uint64_t>(
            kChunkRecords * kRecordSize, bytes - offset));
        fh.read_exact(chunk.data(), take, offset);
        const std::size_t n = take / kRecordSize;
        for (std::size_t i = 0; i < n; ++i) {
            const Record& r = chunk[i];
            report.checksum += record_hash(r);
            if (have_prev && report.sorted &&
                std::memcmp(prev_key.data(), r.key.data(), kKeySize) > 0) {
                report.sorted = false;
                report.first_violation_index = index;
            }
            prev_key = r.key;
            have_prev = true;
            ++index;
        }
        offset += take;
    }
    return report;
}

} // namespace elsort
