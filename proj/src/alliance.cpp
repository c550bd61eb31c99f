#include "aide/alliance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "aide/error.hpp"
#include "aide/htnplan.hpp"
#include "aide/json_fields.hpp"
#include "text_util.hpp"

namespace aide {

using nlohmann::json;

namespace {

struct Interval {
    double lo;
    double hi;
};

double union_length(std::vector<Interval> spans) {
    std::sort(spans.begin(), spans.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
    double total = 0.0;
    double cur_lo = 0.0;
    double cur_hi = -std::numeric_limits<double>::infinity();
    for (const auto& s : spans) {
        if (s.hi <= s.lo) continue;
        if (s.lo > cur_hi) {
            if (cur_hi > cur_lo) total += cur_hi - cur_lo;
            cur_lo = s.lo;
            cur_hi = s.hi;
        } else {
            cur_hi = std::max(cur_hi, s.hi);
        }
    }
    if (cur_hi > cur_lo) total += cur_hi - cur_lo;
    return total;
}

CooperationLabel parse_episode_label(std::string_view text) {
    if (text == "cooperative") return CooperationLabel::Cooperative;
    if (text == "non_cooperative") return CooperationLabel::NonCooperative;
    throw Error(ErrorCode::ParseError, "episode label must be cooperative or non_cooperative");
}

}  // namespace

const CandidateGoal* GoalSet::find(std::string_view id) const {
    auto it = std::find_if(candidates.begin(), candidates.end(), [&](const CandidateGoal& g) { return g.id == id; });
    return it == candidates.end() ? nullptr : &*it;
}

GoalSet parse_goal_set(const json& doc) {
    GoalSet set;
    try {
        require_known_fields(doc, {"robot_goal", "goals"}, "goal set");
        set.robot_goal = doc.at("robot_goal").get<std::string>();
        for (const auto& g : doc.at("goals")) {
            require_known_fields(g, {"id", "permissible", "schedule", "prescriptions", "events"}, "goal");
            CandidateGoal goal{g.at("id").get<std::string>(), {}, g.value("permissible", false)};
            if (g.contains("schedule")) {
                goal.schedule = schedule_from_json(g.at("schedule"));
            } else {
                const auto prescriptions = parse_prescriptions(g.at("prescriptions"));
                const auto events = g.contains("events") ? parse_life_events(g.at("events")) : std::vector<LifeEvent>{};
                goal.schedule = effective_schedule(prescriptions, events);
            }
            if (set.find(goal.id)) throw Error(ErrorCode::ParseError, "duplicate goal id '" + goal.id + "'");
            for (const auto& other : set.candidates) {
                if (other.schedule == goal.schedule) {
                    throw Error(ErrorCode::ParseError, "goals '" + other.id + "' and '" + goal.id +
                                                           "' have identical schedules");
                }
            }
            set.candidates.push_back(std::move(goal));
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("goal set: ") + e.what());
    }
    if (set.candidates.empty()) throw Error(ErrorCode::ParseError, "goal set has no candidates");
    if (!set.find(set.robot_goal)) {
        throw Error(ErrorCode::UnknownRobotGoal, "robot goal '" + set.robot_goal + "' is not a candidate");
    }
    return set;
}

GoalSet load_goal_set_file(const std::filesystem::path& path) {
    try {
        return parse_goal_set(json::parse(detail::read_file(path)));
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, std::string("goal set JSON: ") + e.what());
    }
}

GoalBelief goal_posterior(const std::map<std::string, double>& advancement, double beta) {
    if (advancement.empty()) throw Error(ErrorCode::InvalidArgument, "goal recognition needs candidates");
    double peak = -std::numeric_limits<double>::infinity();
    for (const auto& [id, a] : advancement) peak = std::max(peak, beta * a);

    GoalBelief belief;
    double norm = 0.0;
    for (const auto& [id, a] : advancement) {
        const double w = std::exp(beta * a - peak);
        belief.posterior[id] = w;
        norm += w;
    }
    double best = -1.0;
    for (auto& [id, p] : belief.posterior) {
        p /= norm;
        if (p > best) {
            best = p;
            belief.top = id;
        }
    }
    return belief;
}

GoalBelief recognize_goal(const SortingGridState& initial_grid, std::span<const UserAction> observed,
                          std::span<const CandidateGoal> candidates, double beta) {
    if (candidates.empty()) throw Error(ErrorCode::InvalidArgument, "goal recognition needs candidates");
    if (!(beta > 0.0)) throw Error(ErrorCode::InvalidArgument, "beta must be positive");

    SortingGridState grid = initial_grid;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        try {
            grid = apply_action(grid, observed[i]);
        } catch (const Error& e) {
            throw Error(ErrorCode::InfeasibleObservation,
                        "observed action " + std::to_string(i) + " is not executable: " + e.what());
        }
    }

    const double denom = static_cast<double>(std::max<std::size_t>(1, observed.size()));
    std::map<std::string, double> advancement;
    for (const auto& goal : candidates) {
        const double before = static_cast<double>(plan_length(initial_grid, goal.schedule));
        const double after = static_cast<double>(plan_length(grid, goal.schedule));
        advancement[goal.id] = (before - after) / denom;
    }
    GoalBelief belief = goal_posterior(advancement, beta);
    belief.observations_used = observed.size();
    return belief;
}

std::string_view to_string(AlignmentStatus status) noexcept {
    switch (status) {
        case AlignmentStatus::Aligned: return "aligned";
        case AlignmentStatus::DivergentPermissible: return "divergent_permissible";
        case AlignmentStatus::DivergentImpermissible: return "divergent_impermissible";
        case AlignmentStatus::Undetermined: return "undetermined";
    }
    return "?";
}

AlignmentStatus alignment_status(const GoalBelief& belief, std::string_view robot_goal,
                                 std::span<const CandidateGoal> candidates, double confidence_floor) {
    auto find = [&](std::string_view id) {
        return std::find_if(candidates.begin(), candidates.end(), [&](const CandidateGoal& g) { return g.id == id; });
    };
    if (find(robot_goal) == candidates.end()) {
        throw Error(ErrorCode::UnknownRobotGoal, "robot goal '" + std::string(robot_goal) + "' is not a candidate");
    }
    auto top = belief.posterior.find(belief.top);
    if (top == belief.posterior.end() || top->second < confidence_floor) return AlignmentStatus::Undetermined;
    if (belief.top == robot_goal) return AlignmentStatus::Aligned;
    auto goal = find(belief.top);
    if (goal != candidates.end() && goal->permissible) return AlignmentStatus::DivergentPermissible;
    return AlignmentStatus::DivergentImpermissible;
}

std::string_view to_string(CooperationLabel label) noexcept {
    switch (label) {
        case CooperationLabel::Cooperative: return "cooperative";
        case CooperationLabel::NonCooperative: return "non_cooperative";
        case CooperationLabel::Unknown: return "unknown";
    }
    return "?";
}

std::vector<Episode> parse_episodes(const json& doc) {
    if (!doc.is_array()) throw Error(ErrorCode::ParseError, "episode library must be a JSON array");
    std::vector<Episode> library;
    try {
        for (const auto& e : doc) {
            require_known_fields(e, {"id", "features", "label", "note"}, "episode");
            Episode episode{e.at("id").get<std::string>(), features_from_json(e.at("features")),
                            parse_episode_label(e.at("label").get<std::string>()), e.value("note", std::string{})};
            library.push_back(std::move(episode));
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("episode library: ") + e.what());
    }
    return library;
}

std::vector<Episode> load_episodes_file(const std::filesystem::path& path) {
    try {
        return parse_episodes(json::parse(detail::read_file(path)));
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, std::string("episode JSON: ") + e.what());
    }
}

CooperationFeatures extract_features(const SessionLog& log, const SortingGridState& initial_grid,
                                     const CandidateGoal& robot_goal, const FeatureConfig& config) {
    if (log.entries.empty()) return {};
    const double now = log.entries.back().at;
    const double start = std::max(0.0, now - config.horizon_s);
    const double span = now - start;
    if (!(span > 0.0)) return {};

    std::vector<std::string> refusals;
    for (const auto& phrase : config.refusal_phrases) refusals.push_back(normalize_utterance(phrase));

    CooperationFeatures f;
    f.idle_fraction = 1.0;
    SortingGridState grid = initial_grid;
    std::size_t actions = 0;
    std::size_t reducing = 0;
    double task_gaze = 0.0;
    double all_gaze = 0.0;
    std::vector<Interval> active;

    for (const auto& event : log.events()) {
        const bool in_window = event.at >= start && event.at <= now;
        if (const auto* action = std::get_if<UserAction>(&event.payload)) {
            const std::size_t before = in_window ? plan_length(grid, robot_goal.schedule) : 0;
            grid = apply_action(grid, *action);
            if (!in_window) continue;
            ++actions;
            if (plan_length(grid, robot_goal.schedule) < before) ++reducing;
            active.push_back({event.at, std::min(event.at + config.idle_grace_s, now)});
        } else if (const auto* utterance = std::get_if<Utterance>(&event.payload)) {
            if (!in_window) continue;
            const std::string text = normalize_utterance(utterance->text);
            if (std::any_of(refusals.begin(), refusals.end(),
                            [&](const std::string& r) { return !r.empty() && text.find(r) != std::string::npos; })) {
                ++f.refusal_count;
            }
            active.push_back({event.at, std::min(event.at + config.idle_grace_s, now)});
        } else if (const auto* gaze = std::get_if<GazeFixation>(&event.payload)) {
            const double overlap = std::min(gaze->end(), now) - std::max(gaze->start, start);
            if (overlap <= 0.0) continue;
            all_gaze += overlap;
            if (gaze->target == GazeTarget::Task) task_gaze += overlap;
        }
    }

    f.actions_per_minute = static_cast<double>(actions) * 60.0 / span;
    f.progress_ratio = actions == 0 ? 0.0 : static_cast<double>(reducing) / static_cast<double>(actions);
    f.task_gaze_fraction = all_gaze > 0.0 ? task_gaze / all_gaze : 0.0;
    f.idle_fraction = std::clamp(1.0 - union_length(std::move(active)) / span, 0.0, 1.0);
    return f;
}

CooperationBelief infer_cooperation(const CooperationFeatures& features, std::span<const Episode> library,
                                    double threshold) {
    if (library.empty()) return {};

    constexpr std::size_t kDims = 5;
    std::array<double, kDims> lo;
    std::array<double, kDims> hi;
    lo.fill(std::numeric_limits<double>::infinity());
    hi.fill(-std::numeric_limits<double>::infinity());
    for (const auto& e : library) {
        const auto v = e.features.as_array();
        for (std::size_t i = 0; i < kDims; ++i) {
            lo[i] = std::min(lo[i], v[i]);
            hi[i] = std::max(hi[i], v[i]);
        }
    }
    auto scale = [&](const std::array<double, kDims>& v) {
        std::array<double, kDims> out;
        for (std::size_t i = 0; i < kDims; ++i) {
            const double range = hi[i] - lo[i];
            out[i] = range > 0.0 ? (v[i] - lo[i]) / range : v[i] - lo[i];
        }
        return out;
    };

    const auto query = scale(features.as_array());
    CooperationBelief best;
    best.similarity = -1.0;
    for (const auto& e : library) {
        const auto point = scale(e.features.as_array());
        double sq = 0.0;
        for (std::size_t i = 0; i < kDims; ++i) sq += (query[i] - point[i]) * (query[i] - point[i]);
        const double similarity = 1.0 / (1.0 + std::sqrt(sq / static_cast<double>(kDims)));
        if (similarity > best.similarity) {
            best.similarity = similarity;
            best.label = e.label;
            best.nearest_episode = e.id;
        }
    }
    if (best.similarity < threshold) best.label = CooperationLabel::Unknown;
    return best;
}

json to_json(const GoalBelief& belief) {
    return json{{"posterior", belief.posterior}, {"top", belief.top}, {"observations_used", belief.observations_used}};
}

json to_json(const CooperationFeatures& f) {
    return json{{"actions_per_minute", f.actions_per_minute},
                {"progress_ratio", f.progress_ratio},
                {"task_gaze_fraction", f.task_gaze_fraction},
                {"refusal_count", f.refusal_count},
                {"idle_fraction", f.idle_fraction}};
}

json to_json(const CooperationBelief& belief) {
    json out{{"label", to_string(belief.label)}, {"similarity", belief.similarity}};
    out["nearest_episode"] = belief.nearest_episode ? json(*belief.nearest_episode) : json(nullptr);
    return out;
}

CooperationFeatures features_from_json(const json& j) {
    require_known_fields(j, {"actions_per_minute", "progress_ratio", "task_gaze_fraction", "refusal_count",
                             "idle_fraction"},
                         "features");
    CooperationFeatures f{j.at("actions_per_minute").get<double>(), j.at("progress_ratio").get<double>(),
                          j.at("task_gaze_fraction").get<double>(), j.at("refusal_count").get<int>(),
                          j.at("idle_fraction").get<double>()};
    const bool in_range = f.actions_per_minute >= 0.0 && f.progress_ratio >= 0.0 && f.progress_ratio <= 1.0 &&
                          f.task_gaze_fraction >= 0.0 && f.task_gaze_fraction <= 1.0 && f.refusal_count >= 0 &&
                          f.idle_fraction >= 0.0 && f.idle_fraction <= 1.0 && std::isfinite(f.actions_per_minute);
    if (!in_range) throw Error(ErrorCode::ParseError, "cooperation features out of range");
    return f;
}

}  // namespace aide
