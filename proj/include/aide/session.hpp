#pragma once
// A single assisted session: ingests events strictly in order, runs the
// sense -> estimate -> select loop at decision points and appends every
// input and decision to its log.

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "aide/alliance.hpp"
#include "aide/config.hpp"
#include "aide/events.hpp"
#include "aide/hintengine.hpp"
#include "aide/htnplan.hpp"
#include "aide/needsense.hpp"

namespace aide {

enum class SessionStatus : std::uint8_t { Active, Completed, Abandoned };
std::string_view to_string(SessionStatus status) noexcept;

struct AllianceSnapshot {
    GoalBelief goal;
    AlignmentStatus alignment = AlignmentStatus::Undetermined;
    CooperationBelief cooperation;
    std::optional<CooperationFeatures> features;

    // Snapshots are logged only when one of these changes.
    bool same_verdict(const AllianceSnapshot& other) const;
};

nlohmann::json to_json(const AllianceSnapshot& snapshot);

struct SessionState {
    SortingGridState grid;
    Plan current_plan;
    // Progress, lexical and emotion readings; gaze is re-evaluated at each decision.
    std::map<IndicatorSource, IndicatorReading> latest_readings;
    std::vector<GazeFixation> gaze;
    std::vector<UserAction> actions;
    std::optional<double> last_event_at;
    std::optional<double> last_action_at;
    std::optional<double> last_assist_at;
    double last_activity_at = 0.0;
    std::size_t encouragement_counter = 0;
    std::size_t decisions = 0;
    std::size_t plan_len_at_last_decision = 0;
    std::size_t plan_len_at_last_tick = 0;
    std::string last_user_utterance;
    std::string last_robot_utterance;
    std::optional<NeedEstimate> last_need;
    AllianceSnapshot alliance;
    SessionStatus status = SessionStatus::Active;
};

enum class DecisionTrigger : std::uint8_t { Tick, UserAction, ExplicitRequest };
std::string_view to_string(DecisionTrigger trigger) noexcept;

struct Decision {
    NeedEstimate need;
    std::optional<SociallyAssistiveAction> assistance;
    bool progress_made = false;
    bool suppressed_by_cooldown = false;
};

class Session {
public:
    explicit Session(std::shared_ptr<const EngineResources> resources);

    // Validates the event against the current state first; a rejected event
    // leaves state and log untouched.
    std::optional<SociallyAssistiveAction> ingest(const SessionEvent& event);

    // What a decision point at `now` would produce, without committing it.
    Decision decide(double now, DecisionTrigger trigger) const;

    const SessionState& state() const noexcept { return state_; }
    const SessionLog& log() const noexcept { return log_; }
    const EngineResources& resources() const noexcept { return *resources_; }

    nlohmann::json state_view() const;

private:
    void check_event(const SessionEvent& event) const;
    std::optional<SociallyAssistiveAction> run_decision(double now, DecisionTrigger trigger);
    void refresh_goal_belief();
    void refresh_cooperation(double now);
    void publish_alliance(double now, const AllianceSnapshot& previous, bool force = false);
    void append(double at, EntryType type, nlohmann::json body);
    void finish(double at, SessionStatus status);

    std::shared_ptr<const EngineResources> resources_;
    SessionState state_;
    SessionLog log_;
};

struct PersonaExpectation {
    std::optional<int> min_assistance_level;
    std::optional<int> max_assistance_level;
    std::optional<std::string> goal;
    std::optional<std::string> alignment;
    std::optional<std::string> cooperation;
    std::optional<std::string> status;
};

struct PersonaScript {
    std::string name;
    std::string description;
    std::vector<SessionEvent> timeline;
    // Ticks every pacing.tick_period_s are interleaved up to `duration_s`.
    bool synthesize_ticks = true;
    std::optional<double> duration_s;
    PersonaExpectation expected;
};

PersonaScript parse_persona(const nlohmann::json& doc);
PersonaScript load_persona_file(const std::filesystem::path& path);

// The timeline as ingested: scripted events with synthesized ticks merged in.
std::vector<SessionEvent> expand_timeline(const PersonaScript& script, const PacingConfig& pacing);

// Events are fed until the session closes. Ingestion errors are rethrown
// with the failing event's index in the message and detail.
SessionLog run_persona(const PersonaScript& script, std::shared_ptr<const EngineResources> resources);
SessionLog replay_events(std::span<const SessionEvent> events, std::shared_ptr<const EngineResources> resources);

}  // namespace aide
