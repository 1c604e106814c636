#pragma once

// Shared helpers for the test suites: independent oracles, record builders,
// and a scratch-directory guard. Oracles here intentionally do not call into
// the library paths they check.

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "elsort/io.hpp"
#include "elsort/record.hpp"
#include "elsort/rng.hpp"

namespace testutil {

/// Reference FNV-1a 64 over an arbitrary byte span, written from the
/// published offset basis and prime, independent of record_hash.
inline std::uint64_t fnv1a64(const std::uint8_t* data, std::size_t len) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < len; ++i) {
        hash ^= data[i];
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

/// Exact base-95 positional value of a printable key prefix, accumulated in
/// 128-bit arithmetic: digits are (byte - 32), most significant first.
inline std::uint64_t base95_oracle(const std::string& key, std::size_t effective_length) {
    const std::size_t m = std::min<std::size_t>(effective_length, 9);
    unsigned __int128 value = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const unsigned digit = i < key.size() ? static_cast<unsigned char>(key[i]) - 32 : 0;
        value = value * 95 + digit;
    }
    return static_cast<std::uint64_t>(value);
}

inline elsort::Record make_record(const std::string& key, std::uint8_t payload_fill = '.') {
    elsort::Record r;
    r.key.fill(' ');
    std::memcpy(r.key.data(), key.data(), std::min(key.size(), elsort::kKeySize));
    r.payload.fill(payload_fill);
    return r;
}

inline elsort::Record random_record(elsort::SplitMix64& rng) {
    elsort::Record r;
    for (auto& b : r.key) b = static_cast<std::uint8_t>(32 + rng.next_below(95));
    for (auto& b : r.payload) b = static_cast<std::uint8_t>(rng.next_below(256));
    return r;
}

inline std::vector<std::uint8_t> to_bytes(const std::vector<elsort::Record>& records) {
    std::vector<std::uint8_t> bytes(records.size() * elsort::kRecordSize);
    if (!records.empty()) {
        std::memcpy(bytes.data(), records.data(), bytes.size());
    }
    return bytes;
}

inline void write_records(const std::string& path, const std::vector<elsort::Record>& records) {
    const auto bytes = to_bytes(records);
    elsort::write_entire_file(path, bytes);
}

inline std::vector<elsort::Record> read_records(const std::string& path) {
    const auto bytes = elsort::read_entire_file(path);
    std::vector<elsort::Record> records(bytes.size() / elsort::kRecordSize);
    if (!records.empty()) {
        std::memcpy(records.data(), bytes.data(), records.size() * elsort::kRecordSize);
    }
    return records;
}

/// Keys in file order, one 10-byte string per record.
inline std::vector<std::string> read_keys(const std::string& path) {
    std::vector<std::string> keys;
    for (const auto& r : read_records(path)) {
        keys.emplace_back(reinterpret_cast<const char*>(r.key.data()), elsort::kKeySize);
    }
    return keys;
}

/// Comparison-sort oracle: the key multiset in sorted order.
inline std::vector<std::string> sorted_keys_oracle(const std::vector<elsort::Record>& records) {
    std::vector<std::string> keys;
    keys.reserve(records.size());
    for (const auto& r : records) {
        keys.emplace_back(reinterpret_cast<const char*>(r.key.data()), elsort::kKeySize);
    }
    std::sort(keys.begin(), keys.end());
    return keys;
}

class ScratchDir {
public:
    explicit ScratchDir(const std::string& tag)
        : path_(elsort::make_temp_dir("/tmp", "elsort_test_" + tag + "_")) {}
    ~ScratchDir() { elsort::remove_dir_recursive(path_); }
    ScratchDir(const ScratchDir&) = delete;
    ScratchDir& operator=(const ScratchDir&) = delete;

    const std::string& path() const { return path_; }
    std::string file(const std::string& name) const { return path_ + "/" + name; }

private:
    std::string path_;
};

} // namespace testutil
