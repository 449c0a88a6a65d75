#include "ragwb/ledger.hpp"

#include <istream>
#include <ostream>

#include "ragwb/error.hpp"

namespace ragwb::ledger {

std::string_view to_string(Status status) {
    switch (status) {
        case Status::Pending: return "pending";
        case Status::Processed: return "processed";
        case Status::Failed: return "failed";
    }
    return "pending";
}

Status status_from_string(std::string_view text) {
    if (text == "pending") return Status::Pending;
    if (text == "processed") return Status::Processed;
    if (text == "failed") return Status::Failed;
    throw ValidationError("unknown ledger status '" + std::string(text) + "'");
}

bool Ledger::enqueue(std::string_view uri) {
    if (uri.empty()) throw ValidationError("ledger uri must be non-empty");
    if (contains(uri)) return false;
    entries_.emplace(std::string(uri), Entry{std::string(uri), Status::Pending, 0, std::nullopt});
    return true;
}

Entry& Ledger::find(std::string_view uri) {
    auto it = entries_.find(uri);
    if (it == entries_.end()) throw ValidationError("unknown uri '" + std::string(uri) + "'");
    return it->second;
}

void Ledger::advance(std::string_view uri, Outcome outcome, std::optional<std::string> error) {
    Entry& e = find(uri);
    if (e.status != Status::Pending) {
        throw ValidationError("illegal ledger transition for '" + e.uri + "': " +
                              std::string(to_string(e.status)) + " -> " +
                              (outcome == Outcome::Processed ? "processed" : "failed"));
    }
    ++e.attempts;
    e.status = outcome == Outcome::Processed ? Status::Processed : Status::Failed;
    e.last_error = outcome == Outcome::Failed ? std::move(error) : std::nullopt;
}

void Ledger::retry(std::string_view uri) {
    Entry& e = find(uri);
    if (e.status != Status::Failed) {
        throw ValidationError("illegal ledger transition for '" + e.uri + "': " +
                              std::string(to_string(e.status)) + " -> pending");
    }
    e.status = Status::Pending;
}

std::size_t Ledger::retry_all_failed() {
    std::size_t moved = 0;
    for (auto& [uri, e] : entries_) {
        if (e.status == Status::Failed) {
            e.status = Status::Pending;
            ++moved;
        }
    }
    return moved;
}

bool Ledger::contains(std::string_view uri) const { return entries_.find(uri) != entries_.end(); }

const Entry& Ledger::entry(std::string_view uri) const {
    auto it = entries_.find(uri);
    if (it == entries_.end()) throw ValidationError("unknown uri '" + std::string(uri) + "'");
    return it->second;
}

std::vector<std::string> Ledger::uris_with(Status status) const {
    std::vector<std::string> out;
    for (const auto& [uri, e] : entries_) {
        if (e.status == status) out.push_back(uri);
    }
    return out;
}

Counts Ledger::counts() const {
    Counts c;
    for (const auto& [uri, e] : entries_) {
        switch (e.status) {
            case Status::Pending: ++c.pending; break;
            case Status::Processed: ++c.processed; break;
            case Status::Failed: ++c.failed; break;
        }
    }
    return c;
}

void Ledger::write(std::ostream& out) const {
    for (const auto& [uri, e] : entries_) {
        out << uri << '\t' << to_string(e.status) << '\t' << e.attempts << '\n';
    }
}

Ledger Ledger::read(std::istream& in) {
    Ledger ledger;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto t1 = line.find('\t');
        const auto t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
        if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos) {
            throw ValidationError("ledger line " + std::to_string(line_no) +
                                  ": expected uri<TAB>status<TAB>attempts");
        }
        Entry e;
        e.uri = line.substr(0, t1);
        e.status = status_from_string(std::string_view(line).substr(t1 + 1, t2 - t1 - 1));
        const std::string attempts = line.substr(t2 + 1);
        if (attempts.empty() || attempts.find_first_not_of("0123456789") != std::string::npos) {
            throw ValidationError("ledger line " + std::to_string(line_no) + ": bad attempts '" +
                                  attempts + "'");
        }
        e.attempts = std::stoull(attempts);
        if (e.uri.empty()) throw ValidationError("ledger line " + std::to_string(line_no) + ": empty uri");
        if (!ledger.entries_.emplace(e.uri, e).second) {
            throw ValidationError("ledger line " + std::to_string(line_no) + ": duplicate uri '" +
                                  e.uri + "'");
        }
    }
    return ledger;
}

}  // namespace ragwb::ledger
