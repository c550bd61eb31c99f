#pragma once
// Social-alliance signals: which candidate goal the user's actions advance,
// whether that goal agrees with the robot's, and whether the user's
// behaviour resembles a cooperative or non-cooperative prior episode.

#include <filesystem>
#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "aide/events.hpp"
#include "aide/meddomain.hpp"

namespace aide {

struct CandidateGoal {
    std::string id;
    Schedule schedule;
    bool permissible = false;
};

struct GoalSet {
    std::vector<CandidateGoal> candidates;
    std::string robot_goal;

    const CandidateGoal* find(std::string_view id) const;
};

// {"robot_goal": id, "goals": [{"id", "permissible", "schedule": [cells]}
//                              | {"id", "permissible", "prescriptions", "events"}]}
GoalSet parse_goal_set(const nlohmann::json& doc);
GoalSet load_goal_set_file(const std::filesystem::path& path);

struct GoalBelief {
    std::map<std::string, double> posterior;
    std::string top;
    std::size_t observations_used = 0;
};

// Softmax of beta * advancement; the top goal is the first maximum in id order.
GoalBelief goal_posterior(const std::map<std::string, double>& advancement, double beta);

GoalBelief recognize_goal(const SortingGridState& initial_grid, std::span<const UserAction> observed,
                          std::span<const CandidateGoal> candidates, double beta);

enum class AlignmentStatus : std::uint8_t { Aligned, DivergentPermissible, DivergentImpermissible, Undetermined };
std::string_view to_string(AlignmentStatus status) noexcept;

AlignmentStatus alignment_status(const GoalBelief& belief, std::string_view robot_goal,
                                 std::span<const CandidateGoal> candidates, double confidence_floor);

struct CooperationFeatures {
    double actions_per_minute = 0.0;
    double progress_ratio = 0.0;
    double task_gaze_fraction = 0.0;
    int refusal_count = 0;
    double idle_fraction = 1.0;

    std::array<double, 5> as_array() const {
        return {actions_per_minute, progress_ratio, task_gaze_fraction, static_cast<double>(refusal_count),
                idle_fraction};
    }
    bool operator==(const CooperationFeatures&) const = default;
};

enum class CooperationLabel : std::uint8_t { Cooperative, NonCooperative, Unknown };
std::string_view to_string(CooperationLabel label) noexcept;

struct Episode {
    std::string id;
    CooperationFeatures features;
    CooperationLabel label = CooperationLabel::Cooperative;
    std::string note;
};

std::vector<Episode> parse_episodes(const nlohmann::json& doc);
std::vector<Episode> load_episodes_file(const std::filesystem::path& path);

struct CooperationBelief {
    CooperationLabel label = CooperationLabel::Unknown;
    double similarity = 0.0;
    std::optional<std::string> nearest_episode;
};

struct FeatureConfig {
    double horizon_s = 60.0;
    // An action or utterance keeps the user "active" for this long.
    double idle_grace_s = 10.0;
    std::vector<std::string> refusal_phrases{"i don't want to", "i dont want to", "no thanks", "leave me alone",
                                             "not doing this", "i won't", "i wont"};
};

// Features over the trailing horizon ending at the log's last entry. User
// actions are replayed from `initial_grid` to measure progress toward the
// robot goal.
CooperationFeatures extract_features(const SessionLog& log, const SortingGridState& initial_grid,
                                     const CandidateGoal& robot_goal, const FeatureConfig& config = {});

CooperationBelief infer_cooperation(const CooperationFeatures& features, std::span<const Episode> library,
                                    double threshold);

nlohmann::json to_json(const GoalBelief& belief);
nlohmann::json to_json(const CooperationFeatures& features);
nlohmann::json to_json(const CooperationBelief& belief);
CooperationFeatures features_from_json(const nlohmann::json& j);

}  // namespace aide
