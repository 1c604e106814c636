#include "elsort/io.hpp"

#include <cerrno>
#include <cstring>
#include <dirent.h>
#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>
#include <utility>

#include "elsort/error.hpp"

namespace elsort {

namespace {

[[noreturn]] void throw_errno(const std::string& what, const std::string& path) {
    throw IoError(what + " '" + path + "': " + std::strerror(errno));
}

} // namespace

FileHandle::FileHandle(FileHandle&& other) noexcept
    : fd_(std::exchange(other.fd_, -1)), path_(std::move(other.path_)) {}

FileHandle& FileHandle::operator=(FileHandle&& other) noexcept {
    if (this != &other) {
        close();
        fd_ = std::exchange(other.fd_, -1);
        path_ = std::move(other.path_);
    }
    return *this;
}

FileHandle::~FileHandle() {
    close();
}

void FileHandle::close() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

FileHandle FileHandle::open_read(const std::string& path) {
    int fd = ::open(path.c_str(), O_RDONLY);
    if (fd < 0) throw_errno("cannot open", path);
    return FileHandle(fd, path);
}

FileHandle FileHandle::create_truncate(const std::string& path) {
    int fd = ::open(path.c_str(), O_RDWR | O_CREAT | O_TRUNC, 0644);
    if (fd < 0) throw_errno("cannot create", path);
    return FileHandle(fd, path);
}

FileHandle FileHandle::open_write(const std::string& path) {
    int fd = ::open(path.c_str(), O_WRONLY);
    if (fd < 0) throw_errno("cannot open for writing", path);
    return FileHandle(fd, path);
}

FileHandle FileHandle::open_append(const std::string& path) {
    int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
    if (fd < 0) throw_errno("cannot open for appending", path);
    return FileHandle(fd, path);
}

std::uint64_t FileHandle::size() const {
    struct stat st;
    if (::fstat(fd_, &st) != 0) throw_errno("cannot stat", path_);
    return static_cast<std::uint64_t>(st.st_size);
}

void FileHandle::read_exact(void* buf, std::size_t len, std::uint64_t offset) const {
    auto* p = static_cast<std::uint8_t*>(buf);
    while (len > 0) {
        ssize_t n = ::pread(fd_, p, len, static_cast<off_t>(offset));
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) throw_errno("cannot read", path_);
        p += n;
        offset += static_cast<std::uint64_t>(n);
        len -= static_cast<std::size_t>(n);
    }
}

std::size_t FileHandle::read_some(void* buf, std::size_t len, std::uint64_t offset) const {
    auto* p = static_cast<std::uint8_t*>(buf);
    std::size_t total = 0;
    while (len > 0) {
        ssize_t n = ::pread(fd_, p, len, static_cast<off_t>(offset));
        if (n < 0 && errno == EINTR) continue;
        if (n < 0) throw_errno("cannot read", path_);
        if (n == 0) break;
        p += n;
        offset += static_cast<std::uint64_t>(n);
        len -= static_cast<std::size_t>(n);
        total += static_cast<std::size_t>(n);
    }
    return total;
}

void FileHandle::write_exact(const void* buf, std::size_t len, std::uint64_t offset) const {
    const auto* p = static_cast<const std::uint8_t*>(buf);
    while (len > 0) {
        ssize_t n = ::pwrite(fd_, p, len, static_cast<off_t>(offset));
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) throw_errno("cannot write", path_);
        p += n;
        offset += static_cast<std::uint64_t>(n);
        len -= static_cast<std::size_t>(n);
    }
}

void FileHandle::append(const void* buf, std::size_t len) const {
    const auto* p = static_cast<const std::uint8_t*>(buf);
    while (len > 0) {
        ssize_t n = ::write(fd_, p, len);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) throw_errno("cannot append to", path_);
        p += n;
        len -= static_cast<std::size_t>(n);
    }
}

void FileHandle::truncate(std::uint64_t new_size) const {
    if (::ftruncate(fd_, static_cast<off_t>(new_size)) != 0) {
        throw_errno("cannot size", path_);
    }
}

bool file_exists(const std::string& path) {
    struct stat st;
    return ::stat(path.c_str(), &st) == 0;
}

void remove_file(const std::string& path) {
    if (::unlink(path.c_str()) != 0) throw_errno("cannot remove", path);
}

void remove_file_if_exists(const std::string& path) {
    if (::unlink(path.c_str()) != 0 && errno != ENOENT) throw_errno("cannot remove", path);
}

std::string make_temp_dir(const std::string& base, const std::string& prefix) {
    std::string tmpl = base;
    if (!tmpl.empty() && tmpl.back() != '/') tmpl.push_back('/');
    tmpl += prefix + "XXXXXX";
    std::vector<char> buf(tmpl.begin(), tmpl.end());
    buf.push_back('\0');
    if (::mkdtemp(buf.data()) == nullptr) throw_errno("cannot create temp dir under", base);
    return std::string(buf.data());
}

void remove_dir_recursive(const std::string& path) {
    DIR* dir = ::opendir(path.c_str());
    if (dir == nullptr) {
        if (errno == ENOENT) return;
        throw_errno("cannot open dir", path);
    }
    while (struct dirent* ent = ::readdir(dir)) {
        const std::string name = ent->d_name;
        if (name == "." || name == "..") continue;
        const std::string child = path + "/" + name;
        if (::unlink(child.c_str()) != 0 && (errno == EISDIR || errno == EPERM)) {
            remove_dir_recursive(child);
        }
    }
    ::closedir(dir);
    ::rmdir(path.c_str());
}

std::vector<std::uint8_t> read_entire_file(const std::string& path) {
    FileHandle f = FileHandle::open_read(path);
    std::vector<std::uint8_t> bytes(f.size());
    if (!bytes.empty()) {
        f.read_exact(bytes.data(), bytes.size(), 0);
    }
    return bytes;
}

void write_entire_file(const std::string& path, std::span<const std::uint8_t> bytes) {
    FileHandle f = FileHandle::create_truncate(path);
    if (!bytes.empty()) {
        f.write_exact(bytes.data(), bytes.size(), 0);
    }
}

} // namespace elsort
