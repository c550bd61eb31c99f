#include "aide/events.hpp"

#include <istream>

#include "aide/error.hpp"
#include "aide/json_fields.hpp"

namespace aide {

using nlohmann::json;

json event_body(const SessionEvent& event) {
    return std::visit(
        [](const auto& p) -> json {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, UserAction>) {
                return json{{"type", "user_action"},
                            {"kind", to_string(p.kind)},
                            {"medication", p.medication},
                            {"day", to_string(p.target.day)},
                            {"slot", to_string(p.target.slot)}};
            } else if constexpr (std::is_same_v<T, Utterance>) {
                return json{{"type", "utterance"}, {"text", p.text}};
            } else if constexpr (std::is_same_v<T, GazeFixation>) {
                return json{{"type", "gaze"},
                            {"target", to_string(p.target)},
                            {"start", p.start},
                            {"duration", p.duration}};
            } else {
                return json{{"type", "tick"}};
            }
        },
        event.payload);
}

SessionEvent event_from_json(const json& body, double at) {
    try {
        const auto type = body.at("type").get<std::string>();
        if (type == "user_action") {
            require_known_fields(body, {"at", "type", "kind", "medication", "day", "slot"}, "user_action event");
            UserAction action{parse_action_kind(body.at("kind").get<std::string>()),
                              body.at("medication").get<std::string>(),
                              SlotId{parse_weekday(body.at("day").get<std::string>()),
                                     parse_slot(body.at("slot").get<std::string>())},
                              at};
            return SessionEvent{at, std::move(action)};
        }
        if (type == "utterance") {
            require_known_fields(body, {"at", "type", "text"}, "utterance event");
            return SessionEvent{at, Utterance{body.at("text").get<std::string>()}};
        }
        if (type == "gaze") {
            require_known_fields(body, {"at", "type", "target", "start", "duration"}, "gaze event");
            const double duration = body.at("duration").get<double>();
            if (!(duration > 0.0)) throw Error(ErrorCode::ParseError, "gaze duration must be positive");
            const double start = body.contains("start") ? body.at("start").get<double>() : at - duration;
            return SessionEvent{at, GazeFixation{parse_gaze_target(body.at("target").get<std::string>()), start,
                                                 duration}};
        }
        if (type == "tick") {
            require_known_fields(body, {"at", "type"}, "tick event");
            return SessionEvent{at, Tick{}};
        }
        throw Error(ErrorCode::ParseError, "unknown event type '" + type + "'");
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("event: ") + e.what());
    }
}

SessionEvent event_from_json(const json& flat) {
    try {
        return event_from_json(flat, flat.at("at").get<double>());
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("event: ") + e.what());
    }
}

json to_json(const SessionEvent& event) {
    json out = event_body(event);
    out["at"] = event.at;
    return out;
}

std::string_view to_string(EntryType type) noexcept {
    switch (type) {
        case EntryType::Event: return "event";
        case EntryType::Need: return "need";
        case EntryType::Assistance: return "assistance";
        case EntryType::Alliance: return "alliance";
        case EntryType::Status: return "status";
    }
    return "?";
}

EntryType parse_entry_type(std::string_view text) {
    for (auto t : {EntryType::Event, EntryType::Need, EntryType::Assistance, EntryType::Alliance,
                   EntryType::Status}) {
        if (text == to_string(t)) return t;
    }
    throw Error(ErrorCode::ParseError, "unknown log entry type '" + std::string(text) + "'");
}

bool is_decision_entry(EntryType type) noexcept { return type != EntryType::Event; }

json LogEntry::to_json() const { return json{{"at", at}, {"type", aide::to_string(type)}, {"body", body}}; }

std::string SessionLog::to_jsonl() const {
    std::string out;
    for (const auto& entry : entries) {
        out += entry.to_line();
        out += '\n';
    }
    return out;
}

SessionLog SessionLog::from_jsonl(std::istream& in) {
    SessionLog log;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const json j = json::parse(line);
            require_known_fields(j, {"at", "type", "body"}, "log entry");
            log.entries.push_back(
                LogEntry{j.at("at").get<double>(), parse_entry_type(j.at("type").get<std::string>()), j.at("body")});
        } catch (const json::exception& e) {
            throw Error(ErrorCode::ParseError, "log line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return log;
}

std::vector<SessionEvent> SessionLog::events() const {
    std::vector<SessionEvent> out;
    for (const auto& entry : entries) {
        if (entry.type == EntryType::Event) out.push_back(event_from_json(entry.body, entry.at));
    }
    return out;
}

}  // namespace aide
