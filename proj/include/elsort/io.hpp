#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace elsort {

/// RAII wrapper over a POSIX file descriptor. All reads and writes retry
/// short transfers and throw IoError on failure.
class FileHandle {
public:
    FileHandle() = default;
    FileHandle(FileHandle&& other) noexcept;
    FileHandle& operator=(FileHandle&& other) noexcept;
    FileHandle(const FileHandle&) = delete;
    FileHandle& operator=(const FileHandle&) = delete;
    ~FileHandle();

    static FileHandle open_read(const std::string& path);
    /// Creates or truncates.
    static FileHandle create_truncate(const std::string& path);
    /// Opens an existing file for positional writes without truncation.
    static FileHandle open_write(const std::string& path);
    static FileHandle open_append(const std::string& path);

    bool valid() const { return fd_ >= 0; }
    const std::string& path() const { return path_; }
    std::uint64_t size() const;

    void read_exact(void* buf, std::size_t len, std::uint64_t offset) const;
    /// Reads up to len bytes at offset; returns bytes actually read (0 at EOF).
    std::size_t read_some(void* buf, std::size_t len, std::uint64_t offset) const;
    void write_exact(const void* buf, std::size_t len, std::uint64_t offset) const;
    void append(const void* buf, std::size_t len) const;
    /// Sets the logical file size; sparse where the filesystem allows.
    void truncate(std::uint64_t new_size) const;
    void close();

private:
    FileHandle(int fd, std::string path) : fd_(fd), path_(std::move(path)) {}

    int fd_ = -1;
    std::string path_;
};

bool file_exists(const std::string& path);
void remove_file(const std::string& path);
void remove_file_if_exists(const std::string& path);

/// Creates a unique directory under `base` (mkdtemp semantics).
std::string make_temp_dir(const std::string& base, const std::string& prefix);
/// Removes a directory and every regular file directly inside it.
void remove_dir_recursive(const std::string& path);

/// Reads a whole file into memory. Intended for fragment files and tests.
std::vector<std::uint8_t> read_entire_file(const std::string& path);
void write_entire_file(const std::string& path, std::span<const std::uint8_t> bytes);

} // namespace elsort
