#pragma once
// Session events and the append-only session log (JSON lines of
// {"at", "type", "body"}).

#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "aide/meddomain.hpp"
#include "aide/needsense.hpp"

namespace aide {

struct Utterance {
    std::string text;
};

struct Tick {};

using EventPayload = std::variant<UserAction, Utterance, GazeFixation, Tick>;

struct SessionEvent {
    double at = 0.0;
    EventPayload payload;
};

// Flat event object: {"type": "user_action"|"utterance"|"gaze"|"tick", ...}.
// A gaze event without "start" is taken to end at "at".
nlohmann::json event_body(const SessionEvent& event);
SessionEvent event_from_json(const nlohmann::json& body, double at);
SessionEvent event_from_json(const nlohmann::json& flat);  // reads "at" from the object
nlohmann::json to_json(const SessionEvent& event);          // flat, with "at"

enum class EntryType : std::uint8_t { Event, Need, Assistance, Alliance, Status };
std::string_view to_string(EntryType type) noexcept;
EntryType parse_entry_type(std::string_view text);
bool is_decision_entry(EntryType type) noexcept;

struct LogEntry {
    double at = 0.0;
    EntryType type = EntryType::Event;
    nlohmann::json body;

    nlohmann::json to_json() const;
    std::string to_line() const { return to_json().dump(); }
};

struct SessionLog {
    std::vector<LogEntry> entries;

    std::string to_jsonl() const;
    static SessionLog from_jsonl(std::istream& in);
    std::vector<SessionEvent> events() const;
};

}  // namespace aide
