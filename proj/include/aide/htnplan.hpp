#pragma once
// Total-order HTN planner for the sorting task. The root task
// sort_medications is decomposed SHOP-style, left to right, against a
// forward-simulated grid; every primitive carries the chain of tasks and
// methods that put it in the plan.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "aide/meddomain.hpp"

namespace aide {

enum class TaskName : std::uint8_t { SortMedications, FixDiscrepancy };
enum class MethodName : std::uint8_t { WrongTime, MissingPill, ExtraPill, AllSorted };

std::string_view to_string(TaskName task) noexcept;
std::string_view to_string(MethodName method) noexcept;
TaskName parse_task_name(std::string_view text);
MethodName parse_method_name(std::string_view text);

// One link of a justification chain. The root's recursive decomposition
// is not a named method, so `method` is empty for sort_medications links.
struct TaskLink {
    TaskName task = TaskName::SortMedications;
    std::optional<MethodName> method;
    std::optional<Discrepancy> discrepancy;

    bool operator==(const TaskLink&) const = default;
};

// A user action template: what to do, not when.
struct PlannedAction {
    ActionKind kind = ActionKind::AddPill;
    std::string medication;
    SlotId target;

    CellKey cell() const { return CellKey{target, medication}; }
    UserAction at(double timestamp) const { return UserAction{kind, medication, target, timestamp}; }

    bool operator==(const PlannedAction&) const = default;
};

struct JustifiedAction {
    PlannedAction action;
    std::vector<TaskLink> justification;

    MethodName leaf_method() const { return *justification.back().method; }

    bool operator==(const JustifiedAction&) const = default;
};

struct Plan {
    std::vector<JustifiedAction> steps;
    std::string source_state_hash;

    bool empty() const noexcept { return steps.empty(); }
    std::size_t size() const noexcept { return steps.size(); }
};

Plan build_plan(const SortingGridState& grid, const Schedule& schedule);
std::size_t plan_length(const SortingGridState& grid, const Schedule& schedule);
std::optional<JustifiedAction> next_step(const Plan& plan);

// 64-bit FNV-1a over a canonical rendering of (grid, schedule), as hex.
std::string state_digest(const SortingGridState& grid, const Schedule& schedule);

nlohmann::json to_json(const PlannedAction& action);
nlohmann::json to_json(const TaskLink& link);
nlohmann::json to_json(const JustifiedAction& step);
PlannedAction planned_action_from_json(const nlohmann::json& j);
JustifiedAction justified_action_from_json(const nlohmann::json& j);

// One {"action":..., "justification":[...]} object per line.
std::string dump_plan_jsonl(const Plan& plan);

}  // namespace aide
