#include "aide/htnplan.hpp"

#include <cstdio>
#include <deque>
#include <functional>
#include <sstream>
#include <variant>

namespace aide {

using nlohmann::json;

namespace {

struct CompoundTask {
    TaskName name = TaskName::SortMedications;
    std::optional<Discrepancy> arg;

    bool operator==(const CompoundTask&) const = default;
};

struct PrimitiveTask {
    PlannedAction action;
};

using Task = std::variant<CompoundTask, PrimitiveTask>;

struct AgendaItem {
    Task task;
    std::vector<TaskLink> chain;
};

struct PlanningState {
    SortingGridState grid;
    const Schedule& schedule;
};

using Expansion = std::optional<std::vector<Task>>;

struct Method {
    std::optional<MethodName> name;
    std::function<Expansion(const CompoundTask&, const PlanningState&)> expand;
};

PrimitiveTask add_pill(const Discrepancy& d, Slot slot) {
    return {PlannedAction{ActionKind::AddPill, d.medication, SlotId{d.day, slot}}};
}

PrimitiveTask remove_pill(const Discrepancy& d, Slot slot) {
    return {PlannedAction{ActionKind::RemovePill, d.medication, SlotId{d.day, slot}}};
}

bool has_pill(const PlanningState& s, const Discrepancy& d, Slot slot) {
    return s.grid.count(CellKey{SlotId{d.day, slot}, d.medication}) > 0;
}

const std::vector<Method>& methods_for(TaskName task) {
    static const std::vector<Method> sort_methods{
        {MethodName::AllSorted,
         [](const CompoundTask&, const PlanningState& s) -> Expansion {
             if (!validate_grid(s.grid, s.schedule).empty()) return std::nullopt;
             return std::vector<Task>{};
         }},
        {std::nullopt,
         [](const CompoundTask& self, const PlanningState& s) -> Expansion {
             auto pending = validate_grid(s.grid, s.schedule);
             if (pending.empty()) return std::nullopt;
             return std::vector<Task>{CompoundTask{TaskName::FixDiscrepancy, pending.front()}, self};
         }},
    };
    static const std::vector<Method> fix_methods{
        {MethodName::WrongTime,
         [](const CompoundTask& self, const PlanningState& s) -> Expansion {
             const auto& d = *self.arg;
             if (d.kind != DiscrepancyKind::WrongTime || !has_pill(s, d, *d.at_slot)) return std::nullopt;
             return std::vector<Task>{remove_pill(d, *d.at_slot), add_pill(d, *d.needed_slot)};
         }},
        {MethodName::MissingPill,
         [](const CompoundTask& self, const PlanningState&) -> Expansion {
             const auto& d = *self.arg;
             if (d.kind != DiscrepancyKind::MissingPill) return std::nullopt;
             return std::vector<Task>{add_pill(d, *d.needed_slot)};
         }},
        {MethodName::ExtraPill,
         [](const CompoundTask& self, const PlanningState& s) -> Expansion {
             const auto& d = *self.arg;
             if (d.kind != DiscrepancyKind::ExtraPill || !has_pill(s, d, *d.at_slot)) return std::nullopt;
             return std::vector<Task>{remove_pill(d, *d.at_slot)};
         }},
    };
    return task == TaskName::SortMedications ? sort_methods : fix_methods;
}

void apply_primitive(PlanningState& state, const PlannedAction& action) {
    if (action.kind == ActionKind::RemovePill && state.grid.count(action.cell()) < 1) {
        throw Error(ErrorCode::InconsistentScenario, "planner produced a removal from an empty cell");
    }
    state.grid.add(action.cell(), action.kind == ActionKind::AddPill ? 1 : -1);
}

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

template <class Counts>
void append_cells(std::string& out, const Counts& counts) {
    for (const auto& [key, count] : counts.cells()) {
        out += std::to_string(static_cast<int>(key.at.day));
        out += ',';
        out += std::to_string(static_cast<int>(key.at.slot));
        out += ',';
        out += key.medication;
        out += ',';
        out += std::to_string(count);
        out += ';';
    }
}

}  // namespace

std::string_view to_string(TaskName task) noexcept {
    return task == TaskName::SortMedications ? "sort_medications" : "fix_discrepancy";
}

std::string_view to_string(MethodName method) noexcept {
    switch (method) {
        case MethodName::WrongTime: return "wrong_time";
        case MethodName::MissingPill: return "missing_pill";
        case MethodName::ExtraPill: return "extra_pill";
        case MethodName::AllSorted: return "all_sorted";
    }
    return "?";
}

TaskName parse_task_name(std::string_view text) {
    if (text == "sort_medications") return TaskName::SortMedications;
    if (text == "fix_discrepancy") return TaskName::FixDiscrepancy;
    throw Error(ErrorCode::ParseError, "unknown task '" + std::string(text) + "'");
}

MethodName parse_method_name(std::string_view text) {
    for (auto m : {MethodName::WrongTime, MethodName::MissingPill, MethodName::ExtraPill, MethodName::AllSorted}) {
        if (text == to_string(m)) return m;
    }
    throw Error(ErrorCode::ParseError, "unknown method '" + std::string(text) + "'");
}

Plan build_plan(const SortingGridState& grid, const Schedule& schedule) {
    Plan plan;
    plan.source_state_hash = state_digest(grid, schedule);

    PlanningState state{grid, schedule};
    std::deque<AgendaItem> agenda;
    agenda.push_back({CompoundTask{TaskName::SortMedications, std::nullopt}, {}});

    while (!agenda.empty()) {
        AgendaItem item = std::move(agenda.front());
        agenda.pop_front();

        if (auto* primitive = std::get_if<PrimitiveTask>(&item.task)) {
            apply_primitive(state, primitive->action);
            plan.steps.push_back({primitive->action, std::move(item.chain)});
            continue;
        }

        const auto& task = std::get<CompoundTask>(item.task);
        bool expanded = false;
        for (const auto& method : methods_for(task.name)) {
            Expansion subtasks = method.expand(task, state);
            if (!subtasks) continue;

            std::vector<TaskLink> child_chain = item.chain;
            child_chain.push_back({task.name, method.name, task.arg});
            for (auto it = subtasks->rbegin(); it != subtasks->rend(); ++it) {
                // A task re-entering itself continues its own chain rather than nesting.
                const auto* again = std::get_if<CompoundTask>(&*it);
                const bool tail_call = again && *again == task;
                agenda.push_front({std::move(*it), tail_call ? item.chain : child_chain});
            }
            expanded = true;
            break;
        }
        if (!expanded) {
            throw Error(ErrorCode::InconsistentScenario,
                        "no applicable method for " + std::string(to_string(task.name)));
        }
    }
    return plan;
}

std::size_t plan_length(const SortingGridState& grid, const Schedule& schedule) {
    return build_plan(grid, schedule).size();
}

std::optional<JustifiedAction> next_step(const Plan& plan) {
    if (plan.empty()) return std::nullopt;
    return plan.steps.front();
}

std::string state_digest(const SortingGridState& grid, const Schedule& schedule) {
    std::string canonical = "grid:";
    append_cells(canonical, grid);
    canonical += "|schedule:";
    append_cells(canonical, schedule);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(canonical)));
    return buf;
}

json to_json(const PlannedAction& action) {
    return json{{"kind", to_string(action.kind)},
                {"medication", action.medication},
                {"day", to_string(action.target.day)},
                {"slot", to_string(action.target.slot)}};
}

json to_json(const TaskLink& link) {
    json out{{"task", to_string(link.task)}};
    if (link.method) out["method"] = to_string(*link.method);
    if (link.discrepancy) out["discrepancy"] = to_json(*link.discrepancy);
    return out;
}

json to_json(const JustifiedAction& step) {
    json chain = json::array();
    for (const auto& link : step.justification) chain.push_back(to_json(link));
    return json{{"action", to_json(step.action)}, {"justification", std::move(chain)}};
}

PlannedAction planned_action_from_json(const json& j) {
    return PlannedAction{parse_action_kind(j.at("kind").get<std::string>()), j.at("medication").get<std::string>(),
                         SlotId{parse_weekday(j.at("day").get<std::string>()),
                                parse_slot(j.at("slot").get<std::string>())}};
}

JustifiedAction justified_action_from_json(const json& j) {
    JustifiedAction step{planned_action_from_json(j.at("action")), {}};
    for (const auto& link : j.at("justification")) {
        TaskLink parsed{parse_task_name(link.at("task").get<std::string>()), std::nullopt, std::nullopt};
        if (link.contains("method")) parsed.method = parse_method_name(link.at("method").get<std::string>());
        if (link.contains("discrepancy")) {
            const auto& d = link.at("discrepancy");
            Discrepancy disc;
            const auto kind = d.at("kind").get<std::string>();
            disc.kind = kind == "wrong_time"  ? DiscrepancyKind::WrongTime
                        : kind == "extra_pill" ? DiscrepancyKind::ExtraPill
                                               : DiscrepancyKind::MissingPill;
            disc.medication = d.at("medication").get<std::string>();
            disc.day = parse_weekday(d.at("day").get<std::string>());
            if (d.contains("at_slot")) disc.at_slot = parse_slot(d.at("at_slot").get<std::string>());
            if (d.contains("needed_slot")) disc.needed_slot = parse_slot(d.at("needed_slot").get<std::string>());
            parsed.discrepancy = disc;
        }
        step.justification.push_back(std::move(parsed));
    }
    return step;
}

std::string dump_plan_jsonl(const Plan& plan) {
    std::string out;
    for (const auto& step : plan.steps) {
        out += to_json(step).dump();
        out += '\n';
    }
    return out;
}

}  // namespace aide
