#pragma once

#include <filesystem>
#include <map>
#include <mutex>

#include "elicit/session.hpp"

namespace elicit {

// One directory per session under `root`:
//   events.log          records of [u32 length][u32 checksum][JSON event], little-endian
//   snapshot-<seq>.json full state after event <seq>, written via rename
class FileEventStore final : public EventStore {
public:
    explicit FileEventStore(std::filesystem::path root);

    bool exists(const std::string& session_id) const override;
    std::vector<std::string> list_sessions() const override;
    void append(const std::string& session_id, const SessionEvent& event) override;
    void write_snapshot(const std::string& session_id, std::uint64_t sequence, const nlohmann::json& state) override;
    // Throws CorruptLogError at the first torn or damaged record.
    std::vector<SessionEvent> read_events(const std::string& session_id, std::uint64_t after = 0) const override;
    std::optional<std::pair<std::uint64_t, nlohmann::json>> latest_snapshot(
        const std::string& session_id) const override;
    void remove(const std::string& session_id) override;

    std::filesystem::path session_dir(const std::string& session_id) const;
    std::filesystem::path log_path(const std::string& session_id) const;

    // See recover_session.
    std::uint64_t recover(const std::string& session_id);

private:
    std::uint64_t last_sequence(const std::string& session_id) const;

    std::filesystem::path root_;
    mutable std::mutex mutex_;
    mutable std::map<std::string, std::uint64_t> last_sequence_;
};

// Cuts the log back to its last intact record and drops snapshots beyond it.
// Returns the number of events kept.
std::uint64_t recover_session(FileEventStore& store, const std::string& session_id);

// Encodes one log record; exposed for crash-injection tests.
std::string encode_record(const SessionEvent& event);

class MemoryEventStore final : public EventStore {
public:
    bool exists(const std::string& session_id) const override;
    std::vector<std::string> list_sessions() const override;
    void append(const std::string& session_id, const SessionEvent& event) override;
    void write_snapshot(const std::string& session_id, std::uint64_t sequence, const nlohmann::json& state) override;
    std::vector<SessionEvent> read_events(const std::string& session_id, std::uint64_t after = 0) const override;
    std::optional<std::pair<std::uint64_t, nlohmann::json>> latest_snapshot(
        const std::string& session_id) const override;
    void remove(const std::string& session_id) override;

private:
    struct Entry {
        std::vector<SessionEvent> events;
        std::map<std::uint64_t, nlohmann::json> snapshots;
    };
    mutable std::mutex mutex_;
    std::map<std::string, Entry> sessions_;
};

} // namespace elicit
