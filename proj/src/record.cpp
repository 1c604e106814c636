#include "elsort/record.hpp"

#include <vector>

#include "elsort/error.hpp"
#include "elsort/io.hpp"

namespace elsort {

RecordFile stat_record_file(const std::string& path) {
    FileHandle f = FileHandle::open_read(path);
    const std::uint64_t bytes = f.size();
    if (bytes % kRecordSize != 0) {
        throw MalformedFileError("'" + path + "' is " + std::to_string(bytes) +
                                 " bytes, not a multiple of " + std::to_string(kRecordSize));
    }
    return RecordFile{path, bytes / kRecordSize, bytes};
}

std::uint64_t file_checksum(const RecordFile& f) {
    FileHandle fh = FileHandle::open_read(f.path);
    if (fh.size() % kRecordSize != 0) {
        throw MalformedFileError("'" + f.path + "' length is not a record multiple");
    }
    constexpr std::size_t kChunkRecords = 4096;
    std::vector<Record> chunk(kChunkRecords);
    std::uint64_t sum = 0;
    std::uint64_t offset = 0;
    std::uint64_t remaining = fh.size();
    while (remaining > 0) {
        const std::size_t want =
            remaining < kChunkRecords * kRecordSize ? remaining : kChunkRecords * kRecordSize;
        fh.read_exact(chunk.data(), want, offset);
        const std::size_t n = want / kRecordSize;
        for (std::size_t i = 0; i < n; ++i) {
            sum += record_hash(chunk[i]);
        }
        offset += want;
        remaining -= want;
    }
    return sum;
}

} // namespace elsort
