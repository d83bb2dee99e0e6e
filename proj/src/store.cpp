#include "elicit/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "elicit/error.hpp"
#include "elicit/hash.hpp"

namespace elicit {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::size_t kHeaderSize = 8;
constexpr std::uint32_t kMaxRecord = 1u << 30;

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(const std::string& in, std::size_t pos) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
    return v;
}

std::uint32_t checksum(std::string_view body) {
    return static_cast<std::uint32_t>(stable_hash(body));
}

[[noreturn]] void storage_error(const std::string& what) {
    throw Error(ErrorCode::StorageError, what + ": " + std::strerror(errno));
}

void write_all(int fd, const std::string& data, const fs::path& path) {
    std::size_t done = 0;
    while (done < data.size()) {
        const auto n = ::write(fd, data.data() + done, data.size() - done);
        if (n < 0) {
            if (errno == EINTR) continue;
            storage_error("write " + path.string());
        }
        done += static_cast<std::size_t>(n);
    }
}

void sync_dir(const fs::path& dir) {
    const int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY);
    if (fd < 0) return;
    ::fsync(fd);
    ::close(fd);
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::StorageError, "cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct Scan {
    std::vector<SessionEvent> events;
    std::uint64_t good_bytes = 0;
    std::optional<std::string> problem;
};

Scan scan_log(const std::string& bytes) {
    Scan scan;
    std::size_t pos = 0;
    while (pos < bytes.size()) {
        if (bytes.size() - pos < kHeaderSize) {
            scan.problem = "truncated record header";
            break;
        }
        const auto length = get_u32(bytes, pos);
        const auto sum = get_u32(bytes, pos + 4);
        if (length > kMaxRecord || bytes.size() - pos - kHeaderSize < length) {
            scan.problem = "truncated record body";
            break;
        }
        const std::string_view body(bytes.data() + pos + kHeaderSize, length);
        if (checksum(body) != sum) {
            scan.problem = "checksum mismatch";
            break;
        }
        try {
            auto event = event_from_json(json::parse(body));
            const auto expected = scan.events.size() + 1;
            if (event.sequence != expected) {
                scan.problem = "sequence gap";
                break;
            }
            scan.events.push_back(std::move(event));
        } catch (const std::exception&) {
            scan.problem = "undecodable record";
            break;
        }
        pos += kHeaderSize + length;
        scan.good_bytes = pos;
    }
    return scan;
}

std::optional<std::uint64_t> snapshot_sequence(const fs::path& file) {
    const auto name = file.filename().string();
    if (!name.starts_with("snapshot-") || !name.ends_with(".json")) return std::nullopt;
    const auto digits = name.substr(9, name.size() - 9 - 5);
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) return std::nullopt;
    return std::stoull(digits);
}

} // namespace

std::string encode_record(const SessionEvent& event) {
    const auto body = event_to_json(event).dump();
    std::string out;
    out.reserve(kHeaderSize + body.size());
    put_u32(out, static_cast<std::uint32_t>(body.size()));
    put_u32(out, checksum(body));
    out += body;
    return out;
}

// ---------------------------------------------------------------------------
// FileEventStore

FileEventStore::FileEventStore(fs::path root) : root_(std::move(root)) {
    std::error_code ec;
    fs::create_directories(root_, ec);
    if (ec) throw Error(ErrorCode::StorageError, "cannot create " + root_.string() + ": " + ec.message());
}

fs::path FileEventStore::session_dir(const std::string& session_id) const {
    if (session_id.empty() || session_id.find_first_of("/\\.") != std::string::npos) {
        throw Error(ErrorCode::UnknownSession, "invalid session id");
    }
    return root_ / session_id;
}

fs::path FileEventStore::log_path(const std::string& session_id) const {
    return session_dir(session_id) / "events.log";
}

bool FileEventStore::exists(const std::string& session_id) const {
    try {
        return fs::exists(log_path(session_id));
    } catch (const Error&) {
        return false;
    }
}

std::vector<std::string> FileEventStore::list_sessions() const {
    std::vector<std::string> out;
    for (const auto& entry : fs::directory_iterator(root_)) {
        if (entry.is_directory() && fs::exists(entry.path() / "events.log")) out.push_back(entry.path().filename());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::uint64_t FileEventStore::last_sequence(const std::string& session_id) const {
    auto it = last_sequence_.find(session_id);
    if (it != last_sequence_.end()) return it->second;
    std::uint64_t last = 0;
    if (exists(session_id)) {
        const auto scan = scan_log(read_file(log_path(session_id)));
        if (scan.problem) {
            throw CorruptLogError(scan.good_bytes, scan.events.size(), "events.log of " + session_id + ": " + *scan.problem);
        }
        last = scan.events.size();
    }
    last_sequence_[session_id] = last;
    return last;
}

void FileEventStore::append(const std::string& session_id, const SessionEvent& event) {
    std::lock_guard lock(mutex_);
    const auto last = last_sequence(session_id);
    if (event.sequence != last + 1) {
        throw Error(ErrorCode::SequenceConflict, "expected sequence " + std::to_string(last + 1) + ", got " +
                                                     std::to_string(event.sequence));
    }
    const auto dir = session_dir(session_id);
    const bool fresh = !fs::exists(dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::StorageError, "cannot create " + dir.string() + ": " + ec.message());

    const auto path = log_path(session_id);
    const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
    if (fd < 0) storage_error("open " + path.string());
    try {
        write_all(fd, encode_record(event), path);
        if (::fsync(fd) != 0) storage_error("fsync " + path.string());
    } catch (...) {
        ::close(fd);
        throw;
    }
    ::close(fd);
    if (fresh) {
        sync_dir(dir);
        sync_dir(root_);
    }
    last_sequence_[session_id] = event.sequence;
}

void FileEventStore::write_snapshot(const std::string& session_id, std::uint64_t sequence, const json& state) {
    const auto dir = session_dir(session_id);
    const auto final_path = dir / ("snapshot-" + std::to_string(sequence) + ".json");
    const auto tmp_path = dir / ("snapshot-" + std::to_string(sequence) + ".json.tmp");
    const int fd = ::open(tmp_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    if (fd < 0) storage_error("open " + tmp_path.string());
    try {
        write_all(fd, state.dump(), tmp_path);
        if (::fsync(fd) != 0) storage_error("fsync " + tmp_path.string());
    } catch (...) {
        ::close(fd);
        throw;
    }
    ::close(fd);
    std::error_code ec;
    fs::rename(tmp_path, final_path, ec);
    if (ec) throw Error(ErrorCode::StorageError, "rename " + tmp_path.string() + ": " + ec.message());
    sync_dir(dir);
}

std::vector<SessionEvent> FileEventStore::read_events(const std::string& session_id, std::uint64_t after) const {
    if (!exists(session_id)) throw Error(ErrorCode::UnknownSession, "no session " + session_id);
    auto scan = scan_log(read_file(log_path(session_id)));
    if (scan.problem) {
        throw CorruptLogError(scan.good_bytes, scan.events.size(), "events.log of " + session_id + ": " + *scan.problem);
    }
    if (after >= scan.events.size()) return {};
    return {scan.events.begin() + static_cast<std::ptrdiff_t>(after), scan.events.end()};
}

std::optional<std::pair<std::uint64_t, json>> FileEventStore::latest_snapshot(const std::string& session_id) const {
    std::vector<std::uint64_t> sequences;
    const auto dir = session_dir(session_id);
    if (!fs::exists(dir)) return std::nullopt;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (auto seq = snapshot_sequence(entry.path())) sequences.push_back(*seq);
    }
    std::sort(sequences.rbegin(), sequences.rend());
    for (auto seq : sequences) {
        auto doc = json::parse(read_file(dir / ("snapshot-" + std::to_string(seq) + ".json")), nullptr, false);
        if (!doc.is_discarded()) return std::make_pair(seq, std::move(doc));
    }
    return std::nullopt;
}

void FileEventStore::remove(const std::string& session_id) {
    std::lock_guard lock(mutex_);
    std::error_code ec;
    fs::remove_all(session_dir(session_id), ec);
    last_sequence_.erase(session_id);
}

std::uint64_t recover_session(FileEventStore& store, const std::string& session_id) {
    return store.recover(session_id);
}

std::uint64_t FileEventStore::recover(const std::string& session_id) {
    std::lock_guard lock(mutex_);
    const auto path = log_path(session_id);
    if (!fs::exists(path)) throw Error(ErrorCode::UnknownSession, "no session " + session_id);
    const auto scan = scan_log(read_file(path));
    if (scan.problem) {
        std::error_code ec;
        fs::resize_file(path, scan.good_bytes, ec);
        if (ec) throw Error(ErrorCode::StorageError, "truncate " + path.string() + ": " + ec.message());
    }
    for (const auto& entry : fs::directory_iterator(session_dir(session_id))) {
        const auto seq = snapshot_sequence(entry.path());
        if ((seq && *seq > scan.events.size()) || entry.path().extension() == ".tmp") fs::remove(entry.path());
    }
    last_sequence_[session_id] = scan.events.size();
    return scan.events.size();
}

// ---------------------------------------------------------------------------
// MemoryEventStore

bool MemoryEventStore::exists(const std::string& session_id) const {
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(session_id);
    return it != sessions_.end() && !it->second.events.empty();
}

std::vector<std::string> MemoryEventStore::list_sessions() const {
    std::lock_guard lock(mutex_);
    std::vector<std::string> out;
    for (const auto& [id, entry] : sessions_) {
        if (!entry.events.empty()) out.push_back(id);
    }
    return out;
}

void MemoryEventStore::append(const std::string& session_id, const SessionEvent& event) {
    std::lock_guard lock(mutex_);
    auto& entry = sessions_[session_id];
    if (event.sequence != entry.events.size() + 1) {
        throw Error(ErrorCode::SequenceConflict, "expected sequence " + std::to_string(entry.events.size() + 1) +
                                                     ", got " + std::to_string(event.sequence));
    }
    entry.events.push_back(event);
}

void MemoryEventStore::write_snapshot(const std::string& session_id, std::uint64_t sequence, const json& state) {
    std::lock_guard lock(mutex_);
    sessions_[session_id].snapshots[sequence] = state;
}

std::vector<SessionEvent> MemoryEventStore::read_events(const std::string& session_id, std::uint64_t after) const {
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(session_id);
    if (it == sessions_.end()) throw Error(ErrorCode::UnknownSession, "no session " + session_id);
    const auto& events = it->second.events;
    if (after >= events.size()) return {};
    return {events.begin() + static_cast<std::ptrdiff_t>(after), events.end()};
}

std::optional<std::pair<std::uint64_t, json>> MemoryEventStore::latest_snapshot(const std::string& session_id) const {
    std::lock_guard lock(mutex_);
    auto it = sessions_.find(session_id);
    if (it == sessions_.end() || it->second.snapshots.empty()) return std::nullopt;
    const auto& last = *it->second.snapshots.rbegin();
    return std::make_pair(last.first, last.second);
}

void MemoryEventStore::remove(const std::string& session_id) {
    std::lock_guard lock(mutex_);
    sessions_.erase(session_id);
}

} // namespace elicit
