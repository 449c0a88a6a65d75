#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ragwb::ledger {

enum class Status { Pending, Processed, Failed };
enum class Outcome { Processed, Failed };

std::string_view to_string(Status status);
Status status_from_string(std::string_view text);

struct Entry {
    std::string uri;
    Status status = Status::Pending;
    std::size_t attempts = 0;
    std::optional<std::string> last_error;
};

struct Counts {
    std::size_t pending = 0;
    std::size_t processed = 0;
    std::size_t failed = 0;

    std::size_t total() const { return pending + processed + failed; }
};

/// URI work ledger. Legal transitions are pending->processed,
/// pending->failed and failed->pending (retry); processed is terminal.
class Ledger {
public:
    /// Returns false when the uri is already tracked (its state is untouched).
    bool enqueue(std::string_view uri);

    /// Throws ValidationError on an unknown uri or an illegal transition.
    void advance(std::string_view uri, Outcome outcome,
                 std::optional<std::string> error = std::nullopt);

    /// failed -> pending.
    void retry(std::string_view uri);

    /// Re-enqueues every failed entry; returns how many moved.
    std::size_t retry_all_failed();

    bool contains(std::string_view uri) const;
    const Entry& entry(std::string_view uri) const;
    std::vector<std::string> uris_with(Status status) const;
    Counts counts() const;
    std::size_t size() const { return entries_.size(); }
    const std::map<std::string, Entry, std::less<>>& entries() const { return entries_; }

    /// Line format: `uri<TAB>status<TAB>attempts`, one entry per line.
    void write(std::ostream& out) const;
    static Ledger read(std::istream& in);

private:
    Entry& find(std::string_view uri);

    std::map<std::string, Entry, std::less<>> entries_;
};

}  // namespace ragwb::ledger
