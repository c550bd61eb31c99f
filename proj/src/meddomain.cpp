#include "aide/meddomain.hpp"

#include <algorithm>
#include <tuple>

#include "text_util.hpp"

namespace aide {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, kDaysPerWeek> kDayNames{
    "Sunday", "Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday"};
constexpr std::array<std::string_view, kSlotsPerDay> kSlotNames{"morning", "afternoon", "evening",
                                                                 "bedtime"};
constexpr std::array<std::string_view, 9> kColorNames{"white", "blue",   "red",    "yellow", "green",
                                                      "orange", "pink", "purple", "brown"};
constexpr std::array<std::string_view, 7> kShapeNames{"round",  "oval",    "oblong",  "capsule",
                                                      "square", "diamond", "triangle"};

template <class Enum, std::size_t N>
Enum parse_enum(std::string_view text, const std::array<std::string_view, N>& names,
                std::string_view what) {
    for (std::size_t i = 0; i < N; ++i) {
        if (detail::iequals(text, names[i])) return static_cast<Enum>(i);
    }
    throw Error(ErrorCode::ParseError, "unknown " + std::string(what) + " '" + std::string(text) + "'");
}

std::string scenario_context(std::string_view where, const json::exception& e) {
    return std::string(where) + ": " + e.what();
}

CellKey parse_cell_key(const json& cell) {
    return CellKey{SlotId{parse_weekday(cell.at("day").get<std::string>()),
                          parse_slot(cell.at("slot").get<std::string>())},
                   cell.at("medication").get<std::string>()};
}

template <class Counts>
Counts counts_from_json(const json& cells) {
    if (!cells.is_array()) {
        throw Error(ErrorCode::ParseError, "cell list must be an array");
    }
    Counts out;
    for (const auto& cell : cells) {
        require_known_fields(cell, {"day", "slot", "medication", "count"}, "cell");
        const int count = cell.at("count").get<int>();
        if (count < 0) {
            throw Error(ErrorCode::ParseError, "cell count must be non-negative");
        }
        out.add(parse_cell_key(cell), count);
    }
    return out;
}

}  // namespace

std::string_view to_string(Weekday day) noexcept { return kDayNames[static_cast<std::size_t>(day)]; }
std::string_view to_string(Slot slot) noexcept { return kSlotNames[static_cast<std::size_t>(slot)]; }
std::string_view to_string(Color color) noexcept { return kColorNames[static_cast<std::size_t>(color)]; }
std::string_view to_string(Shape shape) noexcept { return kShapeNames[static_cast<std::size_t>(shape)]; }

std::string_view to_string(DiscrepancyKind kind) noexcept {
    switch (kind) {
        case DiscrepancyKind::MissingPill: return "missing_pill";
        case DiscrepancyKind::ExtraPill: return "extra_pill";
        case DiscrepancyKind::WrongTime: return "wrong_time";
    }
    return "?";
}

std::string_view to_string(ActionKind kind) noexcept {
    return kind == ActionKind::AddPill ? "add_pill" : "remove_pill";
}

ActionKind parse_action_kind(std::string_view text) {
    if (text == "add_pill") return ActionKind::AddPill;
    if (text == "remove_pill") return ActionKind::RemovePill;
    throw Error(ErrorCode::ParseError, "unknown action kind '" + std::string(text) + "'");
}

Weekday parse_weekday(std::string_view text) {
    for (std::size_t i = 0; i < kDaysPerWeek; ++i) {
        if (detail::iequals(text, kDayNames[i]) ||
            (text.size() == 3 && detail::iequals(text, kDayNames[i].substr(0, 3)))) {
            return static_cast<Weekday>(i);
        }
    }
    throw Error(ErrorCode::ParseError, "unknown weekday '" + std::string(text) + "'");
}

Slot parse_slot(std::string_view text) { return parse_enum<Slot>(text, kSlotNames, "slot"); }
Color parse_color(std::string_view text) { return parse_enum<Color>(text, kColorNames, "color"); }
Shape parse_shape(std::string_view text) { return parse_enum<Shape>(text, kShapeNames, "shape"); }

Schedule effective_schedule(std::span<const Prescription> prescriptions,
                            std::span<const LifeEvent> events) {
    Schedule schedule;
    std::set<std::string> prescribed;
    for (const auto& p : prescriptions) {
        prescribed.insert(p.medication);
        for (const auto& [at, count] : p.doses) {
            schedule.add(CellKey{at, p.medication}, count);
        }
    }
    for (const auto& event : events) {
        if (!prescribed.contains(event.medication)) {
            throw Error(ErrorCode::UnknownMedication,
                        "event '" + event.id + "' references unprescribed medication '" +
                            event.medication + "'");
        }
        const CellKey from{SlotId{event.day, event.from_slot}, event.medication};
        if (schedule.count(from) < 1) {
            throw Error(ErrorCode::EventWithoutBaseDose,
                        "event '" + event.id + "' moves a dose from " +
                            std::string(to_string(event.day)) + " " +
                            std::string(to_string(event.from_slot)) + " where none is required");
        }
        schedule.add(from, -1);
        schedule.add(CellKey{SlotId{event.day, event.to_slot}, event.medication}, 1);
    }
    return schedule;
}

std::vector<Discrepancy> validate_grid(const SortingGridState& grid, const Schedule& schedule) {
    std::set<std::string> meds = grid.medications();
    meds.merge(schedule.medications());

    std::vector<Discrepancy> out;
    for (const auto& med : meds) {
        for (Weekday day : kAllDays) {
            std::vector<Slot> surplus;
            std::vector<Slot> deficit;
            for (Slot slot : kAllSlots) {
                const CellKey key{SlotId{day, slot}, med};
                const int diff = grid.count(key) - schedule.count(key);
                for (int i = 0; i < diff; ++i) surplus.push_back(slot);
                for (int i = 0; i < -diff; ++i) deficit.push_back(slot);
            }
            const std::size_t paired = std::min(surplus.size(), deficit.size());
            for (std::size_t i = 0; i < paired; ++i) {
                out.push_back({DiscrepancyKind::WrongTime, med, day, surplus[i], deficit[i]});
            }
            for (std::size_t i = paired; i < surplus.size(); ++i) {
                out.push_back({DiscrepancyKind::ExtraPill, med, day, surplus[i], std::nullopt});
            }
            for (std::size_t i = paired; i < deficit.size(); ++i) {
                out.push_back({DiscrepancyKind::MissingPill, med, day, std::nullopt, deficit[i]});
            }
        }
    }

    auto key = [](const Discrepancy& d) {
        return std::tuple<Weekday, Slot, const std::string&, DiscrepancyKind, Slot>(
            d.day, d.anchor_slot(), d.medication, d.kind, d.needed_slot.value_or(Slot::Morning));
    };
    std::sort(out.begin(), out.end(),
              [&](const Discrepancy& a, const Discrepancy& b) { return key(a) < key(b); });
    return out;
}

SortingGridState apply_action(const SortingGridState& grid, const UserAction& action) {
    SortingGridState next = grid;
    const CellKey key = action.cell();
    if (action.kind == ActionKind::AddPill) {
        next.add(key, 1);
    } else {
        if (grid.count(key) < 1) {
            throw Error(ErrorCode::RemoveFromEmptyCell,
                        "no " + action.medication + " pill on " +
                            std::string(to_string(action.target.day)) + " " +
                            std::string(to_string(action.target.slot)));
        }
        next.add(key, -1);
    }
    return next;
}

const Medication* Scenario::find_medication(std::string_view name) const {
    auto it = std::find_if(medications.begin(), medications.end(),
                           [&](const Medication& m) { return m.name == name; });
    return it == medications.end() ? nullptr : &*it;
}

json to_json(const SlotId& at) {
    return json{{"day", to_string(at.day)}, {"slot", to_string(at.slot)}};
}

json cells_to_json(const std::map<CellKey, int>& cells) {
    json out = json::array();
    for (const auto& [key, count] : cells) {
        out.push_back({{"day", to_string(key.at.day)},
                       {"slot", to_string(key.at.slot)},
                       {"medication", key.medication},
                       {"count", count}});
    }
    return out;
}

SortingGridState grid_from_json(const json& cells) { return counts_from_json<SortingGridState>(cells); }
Schedule schedule_from_json(const json& cells) { return counts_from_json<Schedule>(cells); }

json to_json(const Discrepancy& d) {
    json out{{"kind", to_string(d.kind)}, {"medication", d.medication}, {"day", to_string(d.day)}};
    if (d.at_slot) out["at_slot"] = to_string(*d.at_slot);
    if (d.needed_slot) out["needed_slot"] = to_string(*d.needed_slot);
    return out;
}

std::vector<Prescription> parse_prescriptions(const json& doc) {
    std::vector<Prescription> out;
    try {
        for (const auto& p : doc) {
            require_known_fields(p, {"medication", "doses"}, "prescription");
            Prescription rx{p.at("medication").get<std::string>(), {}};
            bool any_dose = false;
            for (const auto& dose : p.at("doses")) {
                require_known_fields(dose, {"day", "slot", "count"}, "dose");
                const SlotId at{parse_weekday(dose.at("day").get<std::string>()),
                                parse_slot(dose.at("slot").get<std::string>())};
                const int count = dose.at("count").get<int>();
                rx.doses[at] += count;
                if (count < 0 || rx.doses[at] > kMaxDoseCount) {
                    throw Error(ErrorCode::ScenarioInvalid, "dose counts must lie in [0, 10]");
                }
                any_dose = any_dose || count > 0;
            }
            if (!any_dose) {
                throw Error(ErrorCode::ScenarioInvalid,
                            "prescription for '" + rx.medication + "' requires no dose");
            }
            out.push_back(std::move(rx));
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ScenarioInvalid, scenario_context("prescriptions", e));
    }
    return out;
}

std::vector<LifeEvent> parse_life_events(const json& doc) {
    std::vector<LifeEvent> out;
    try {
        for (const auto& e : doc) {
            require_known_fields(e, {"id", "medication", "day", "from_slot", "to_slot", "description"}, "event");
            LifeEvent event{e.at("id").get<std::string>(),
                            e.at("medication").get<std::string>(),
                            parse_weekday(e.at("day").get<std::string>()),
                            parse_slot(e.at("from_slot").get<std::string>()),
                            parse_slot(e.at("to_slot").get<std::string>()),
                            e.value("description", std::string{})};
            if (detail::to_lower(event.description).find("earlier") != std::string::npos &&
                !(event.to_slot < event.from_slot)) {
                throw Error(ErrorCode::ScenarioInvalid,
                            "event '" + event.id + "' is marked earlier but does not move the dose earlier");
            }
            out.push_back(std::move(event));
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ScenarioInvalid, scenario_context("events", e));
    }
    return out;
}

Scenario parse_scenario(const json& doc) {
    Scenario scenario;
    try {
        require_known_fields(doc, {"medications", "prescriptions", "events", "initial_grid", "goals", "episodes"},
                             "scenario");
        for (const auto& m : doc.at("medications")) {
            require_known_fields(m, {"name", "color", "shape"}, "medication");
            Medication med{m.at("name").get<std::string>(), parse_color(m.at("color").get<std::string>()),
                           parse_shape(m.at("shape").get<std::string>())};
            if (med.name.empty()) {
                throw Error(ErrorCode::ScenarioInvalid, "medication name must not be empty");
            }
            if (scenario.find_medication(med.name)) {
                throw Error(ErrorCode::ScenarioInvalid, "duplicate medication '" + med.name + "'");
            }
            scenario.medications.push_back(std::move(med));
        }
        scenario.prescriptions = parse_prescriptions(doc.at("prescriptions"));
        for (const auto& rx : scenario.prescriptions) {
            if (!scenario.find_medication(rx.medication)) {
                throw Error(ErrorCode::UnknownMedication,
                            "prescription for unknown medication '" + rx.medication + "'");
            }
        }
        if (doc.contains("events")) scenario.events = parse_life_events(doc.at("events"));
        if (doc.contains("initial_grid")) {
            scenario.initial_grid = grid_from_json(doc.at("initial_grid"));
        }
        for (const auto& name : scenario.initial_grid.medications()) {
            if (!scenario.find_medication(name)) {
                throw Error(ErrorCode::UnknownMedication, "grid holds unknown medication '" + name + "'");
            }
        }
        if (doc.contains("goals")) scenario.goals = doc.at("goals").get<std::string>();
        if (doc.contains("episodes")) scenario.episodes = doc.at("episodes").get<std::string>();
        (void)scenario.schedule();  // surfaces event errors eagerly
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ScenarioInvalid, scenario_context("scenario", e));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ParseError) {
            throw Error(ErrorCode::ScenarioInvalid, e.what());
        }
        throw;
    }
    return scenario;
}

Scenario parse_scenario_text(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, std::string("scenario JSON: ") + e.what());
    }
    return parse_scenario(doc);
}

Scenario load_scenario_file(const std::filesystem::path& path) {
    return parse_scenario_text(detail::read_file(path));
}

}  // namespace aide
