#pragma once
// Medication-sorting world: a 7-day x 4-slot pill grid, prescriptions,
// life events that shift doses, and the discrepancy check between what is
// on the grid and what the week requires.

#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "aide/error.hpp"
#include "aide/json_fields.hpp"

namespace aide {

enum class Weekday : std::uint8_t { Sunday, Monday, Tuesday, Wednesday, Thursday, Friday, Saturday };
enum class Slot : std::uint8_t { Morning, Afternoon, Evening, Bedtime };

inline constexpr std::size_t kDaysPerWeek = 7;
inline constexpr std::size_t kSlotsPerDay = 4;
inline constexpr int kMaxDoseCount = 10;

inline constexpr std::array<Weekday, kDaysPerWeek> kAllDays{
    Weekday::Sunday, Weekday::Monday, Weekday::Tuesday, Weekday::Wednesday,
    Weekday::Thursday, Weekday::Friday, Weekday::Saturday};
inline constexpr std::array<Slot, kSlotsPerDay> kAllSlots{
    Slot::Morning, Slot::Afternoon, Slot::Evening, Slot::Bedtime};

enum class Color : std::uint8_t { White, Blue, Red, Yellow, Green, Orange, Pink, Purple, Brown };
enum class Shape : std::uint8_t { Round, Oval, Oblong, Capsule, Square, Diamond, Triangle };

std::string_view to_string(Weekday day) noexcept;
std::string_view to_string(Slot slot) noexcept;
std::string_view to_string(Color color) noexcept;
std::string_view to_string(Shape shape) noexcept;

// Day names parse case-insensitively, full ("Tuesday") or abbreviated ("Tue").
Weekday parse_weekday(std::string_view text);
Slot parse_slot(std::string_view text);
Color parse_color(std::string_view text);
Shape parse_shape(std::string_view text);

struct SlotId {
    Weekday day = Weekday::Sunday;
    Slot slot = Slot::Morning;

    auto operator<=>(const SlotId&) const = default;
};

struct Medication {
    std::string name;
    Color color = Color::White;
    Shape shape = Shape::Round;

    bool operator==(const Medication&) const = default;
};

// Orders by (day, slot, medication); every deterministic listing in the
// engine follows this order.
struct CellKey {
    SlotId at;
    std::string medication;

    auto operator<=>(const CellKey&) const = default;
};

// Sparse non-negative counts per (slot, medication). Zero cells are not
// stored, so two maps compare equal iff every cell count matches.
template <class Tag>
class CellCounts {
public:
    using Map = std::map<CellKey, int>;

    int count(const CellKey& key) const {
        auto it = cells_.find(key);
        return it == cells_.end() ? 0 : it->second;
    }

    void set(const CellKey& key, int value) {
        if (value < 0) {
            throw Error(ErrorCode::InvalidArgument, "cell count must be non-negative");
        }
        if (value == 0) {
            cells_.erase(key);
        } else {
            cells_[key] = value;
        }
    }

    void add(const CellKey& key, int delta) { set(key, count(key) + delta); }

    int total() const {
        int sum = 0;
        for (const auto& [key, value] : cells_) sum += value;
        return sum;
    }

    std::set<std::string> medications() const {
        std::set<std::string> names;
        for (const auto& [key, value] : cells_) names.insert(key.medication);
        return names;
    }

    bool empty() const noexcept { return cells_.empty(); }
    const Map& cells() const noexcept { return cells_; }

    bool operator==(const CellCounts&) const = default;

private:
    Map cells_;
};

using SortingGridState = CellCounts<struct GridTag>;
using Schedule = CellCounts<struct ScheduleTag>;

struct Prescription {
    std::string medication;
    std::map<SlotId, int> doses;
};

struct LifeEvent {
    std::string id;
    std::string medication;
    Weekday day = Weekday::Sunday;
    Slot from_slot = Slot::Morning;
    Slot to_slot = Slot::Morning;
    std::string description;
};

enum class DiscrepancyKind : std::uint8_t { MissingPill, ExtraPill, WrongTime };
std::string_view to_string(DiscrepancyKind kind) noexcept;

// One unit of mismatch. A wrong_time pairs one surplus pill (at_slot) with
// one deficit (needed_slot) of the same medication on the same day.
struct Discrepancy {
    DiscrepancyKind kind = DiscrepancyKind::MissingPill;
    std::string medication;
    Weekday day = Weekday::Sunday;
    std::optional<Slot> at_slot;
    std::optional<Slot> needed_slot;

    // Slot used for ordering: where the surplus sits, else the deficit.
    Slot anchor_slot() const { return at_slot ? *at_slot : *needed_slot; }

    bool operator==(const Discrepancy&) const = default;
};

enum class ActionKind : std::uint8_t { AddPill, RemovePill };
std::string_view to_string(ActionKind kind) noexcept;
ActionKind parse_action_kind(std::string_view text);

struct UserAction {
    ActionKind kind = ActionKind::AddPill;
    std::string medication;
    SlotId target;
    double timestamp = 0.0;

    CellKey cell() const { return CellKey{target, medication}; }
};

Schedule effective_schedule(std::span<const Prescription> prescriptions,
                            std::span<const LifeEvent> events);

std::vector<Discrepancy> validate_grid(const SortingGridState& grid, const Schedule& schedule);

SortingGridState apply_action(const SortingGridState& grid, const UserAction& action);

struct Scenario {
    std::vector<Medication> medications;
    std::vector<Prescription> prescriptions;
    std::vector<LifeEvent> events;
    SortingGridState initial_grid;
    // Optional references to companion files, resolved against the scenario's directory.
    std::optional<std::string> goals;
    std::optional<std::string> episodes;

    const Medication* find_medication(std::string_view name) const;
    Schedule schedule() const { return effective_schedule(prescriptions, events); }
};

// Strict loader: unknown fields, unknown medications and broken invariants
// are reported as ScenarioInvalid (ParseError for malformed JSON text).
Scenario parse_scenario(const nlohmann::json& doc);
std::vector<Prescription> parse_prescriptions(const nlohmann::json& doc);
std::vector<LifeEvent> parse_life_events(const nlohmann::json& doc);
Scenario parse_scenario_text(std::string_view text);
Scenario load_scenario_file(const std::filesystem::path& path);

nlohmann::json cells_to_json(const std::map<CellKey, int>& cells);
SortingGridState grid_from_json(const nlohmann::json& cells);
Schedule schedule_from_json(const nlohmann::json& cells);
nlohmann::json to_json(const Discrepancy& d);
nlohmann::json to_json(const SlotId& at);

}  // namespace aide
