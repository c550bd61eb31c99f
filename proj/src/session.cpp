#include "aide/session.hpp"

#include <cmath>

#include "aide/error.hpp"
#include "aide/json_fields.hpp"
#include "text_util.hpp"

namespace aide {

using nlohmann::json;

std::string_view to_string(SessionStatus status) noexcept {
    switch (status) {
        case SessionStatus::Active: return "active";
        case SessionStatus::Completed: return "completed";
        case SessionStatus::Abandoned: return "abandoned";
    }
    return "?";
}

std::string_view to_string(DecisionTrigger trigger) noexcept {
    switch (trigger) {
        case DecisionTrigger::Tick: return "tick";
        case DecisionTrigger::UserAction: return "user_action";
        case DecisionTrigger::ExplicitRequest: return "explicit_request";
    }
    return "?";
}

bool AllianceSnapshot::same_verdict(const AllianceSnapshot& other) const {
    return goal.top == other.goal.top && alignment == other.alignment &&
           cooperation.label == other.cooperation.label &&
           cooperation.nearest_episode == other.cooperation.nearest_episode;
}

json to_json(const AllianceSnapshot& snapshot) {
    json out{{"goal", to_json(snapshot.goal)},
             {"alignment", to_string(snapshot.alignment)},
             {"cooperation", to_json(snapshot.cooperation)}};
    out["features"] = snapshot.features ? to_json(*snapshot.features) : json(nullptr);
    return out;
}

Session::Session(std::shared_ptr<const EngineResources> resources) : resources_(std::move(resources)) {
    if (!resources_) throw Error(ErrorCode::InvalidArgument, "session needs resources");
    state_.grid = resources_->scenario.initial_grid;
    state_.current_plan = build_plan(state_.grid, resources_->schedule);
    state_.plan_len_at_last_decision = state_.current_plan.size();
    state_.plan_len_at_last_tick = state_.current_plan.size();
    refresh_goal_belief();
    if (state_.current_plan.empty()) finish(0.0, SessionStatus::Completed);
}

void Session::check_event(const SessionEvent& event) const {
    if (state_.status != SessionStatus::Active) {
        throw Error(ErrorCode::SessionClosed, "session is " + std::string(to_string(state_.status)));
    }
    if (!std::isfinite(event.at) || event.at < 0.0) {
        throw Error(ErrorCode::InvalidArgument, "event time must be a non-negative number");
    }
    if (state_.last_event_at && event.at < *state_.last_event_at) {
        throw Error(ErrorCode::OutOfOrderEvent, "event at " + std::to_string(event.at) + " precedes last event at " +
                                                    std::to_string(*state_.last_event_at));
    }
    if (const auto* action = std::get_if<UserAction>(&event.payload)) {
        if (!resources_->scenario.find_medication(action->medication)) {
            throw Error(ErrorCode::UnknownMedication, "unknown medication '" + action->medication + "'");
        }
        (void)apply_action(state_.grid, *action);
    } else if (const auto* gaze = std::get_if<GazeFixation>(&event.payload)) {
        if (!state_.gaze.empty()) {
            const GazeFixation pair[] = {state_.gaze.back(), *gaze};
            check_gaze_stream(pair);
        } else {
            check_gaze_stream(std::span(gaze, 1));
        }
    }
}

std::optional<SociallyAssistiveAction> Session::ingest(const SessionEvent& event) {
    check_event(event);
    const auto& cfg = resources_->config;
    append(event.at, EntryType::Event, event_body(event));
    state_.last_event_at = event.at;

    std::optional<SociallyAssistiveAction> emitted;
    if (const auto* action = std::get_if<UserAction>(&event.payload)) {
        UserAction stamped = *action;
        stamped.timestamp = event.at;
        const std::size_t before = state_.current_plan.size();
        state_.grid = apply_action(state_.grid, stamped);
        state_.current_plan = build_plan(state_.grid, resources_->schedule);
        state_.actions.push_back(stamped);
        state_.last_action_at = event.at;
        state_.last_activity_at = event.at;
        state_.latest_readings[IndicatorSource::Progress] =
            progress_indicator(before, state_.current_plan.size(), event.at, cfg.progress);

        const AllianceSnapshot previous = state_.alliance;
        refresh_goal_belief();
        emitted = run_decision(event.at, DecisionTrigger::UserAction);
        publish_alliance(event.at, previous);
        if (state_.current_plan.empty()) finish(event.at, SessionStatus::Completed);
    } else if (const auto* utterance = std::get_if<Utterance>(&event.payload)) {
        state_.last_activity_at = event.at;
        const auto lexical = lexical_indicator(utterance->text, resources_->lexicon, event.at);
        state_.latest_readings[IndicatorSource::Lexical] = lexical;
        if (resources_->emotion) {
            const Conversation conversation{
                "", {state_.last_user_utterance, state_.last_robot_utterance, utterance->text}};
            const auto prediction = classify(conversation, *resources_->emotion);
            state_.latest_readings[IndicatorSource::Emotion] =
                emotion_indicator(prediction.label, prediction.posterior, event.at);
        }
        state_.last_user_utterance = utterance->text;
        if (lexical.explicit_request) emitted = run_decision(event.at, DecisionTrigger::ExplicitRequest);
    } else if (const auto* gaze = std::get_if<GazeFixation>(&event.payload)) {
        state_.gaze.push_back(*gaze);
    } else {
        const AllianceSnapshot previous = state_.alliance;
        if (event.at - state_.last_activity_at >= cfg.pacing.abandon_after_s) {
            refresh_cooperation(event.at);
            publish_alliance(event.at, previous, true);
            finish(event.at, SessionStatus::Abandoned);
            return std::nullopt;
        }
        state_.latest_readings[IndicatorSource::Progress] =
            progress_indicator(state_.plan_len_at_last_tick, state_.current_plan.size(), event.at, cfg.progress);
        state_.plan_len_at_last_tick = state_.current_plan.size();
        refresh_cooperation(event.at);
        emitted = run_decision(event.at, DecisionTrigger::Tick);
        publish_alliance(event.at, previous);
    }
    return emitted;
}

Decision Session::decide(double now, DecisionTrigger trigger) const {
    const auto& cfg = resources_->config;
    std::vector<IndicatorReading> readings;
    for (const auto& [source, reading] : state_.latest_readings) {
        const bool expires = source == IndicatorSource::Lexical || source == IndicatorSource::Emotion;
        if (expires && now - reading.at > cfg.pacing.utterance_ttl_s) continue;
        readings.push_back(reading);
    }
    readings.push_back(gaze_indicator(state_.gaze, state_.last_action_at, now, cfg.gaze));

    Decision d;
    d.need = fuse(readings, cfg.fusion);
    d.progress_made = state_.current_plan.size() < state_.plan_len_at_last_decision;
    d.assistance = select_assistance(state_.current_plan, d.need, d.progress_made, resources_->catalog,
                                     resources_->scenario.medications, state_.encouragement_counter);
    const bool cooling = state_.last_assist_at && now - *state_.last_assist_at < cfg.pacing.cooldown_s;
    if (d.assistance && d.assistance->level >= 1 && trigger != DecisionTrigger::ExplicitRequest && cooling) {
        d.assistance.reset();
        d.suppressed_by_cooldown = true;
    }
    return d;
}

std::optional<SociallyAssistiveAction> Session::run_decision(double now, DecisionTrigger trigger) {
    Decision d = decide(now, trigger);
    const std::size_t index = state_.decisions++;

    json need = to_json(d.need);
    need["decision"] = index;
    need["trigger"] = to_string(trigger);
    need["progress_made"] = d.progress_made;
    need["suppressed"] = d.suppressed_by_cooldown;
    append(now, EntryType::Need, std::move(need));
    state_.last_need = d.need;
    state_.plan_len_at_last_decision = state_.current_plan.size();

    if (d.assistance) {
        json body = to_json(*d.assistance);
        body["decision"] = index;
        body["explicit"] = trigger == DecisionTrigger::ExplicitRequest;
        append(now, EntryType::Assistance, std::move(body));
        if (d.assistance->level == 0) {
            ++state_.encouragement_counter;
        } else {
            state_.last_assist_at = now;
        }
        state_.last_robot_utterance = d.assistance->utterance;
        // An answered request no longer lifts the floor; its cue score still counts.
        if (trigger == DecisionTrigger::ExplicitRequest) {
            state_.latest_readings[IndicatorSource::Lexical].explicit_request = false;
        }
    }
    return d.assistance;
}

void Session::refresh_goal_belief() {
    const auto& cfg = resources_->config.alliance;
    const auto& goals = resources_->goals;
    state_.alliance.goal =
        recognize_goal(resources_->scenario.initial_grid, state_.actions, goals.candidates, cfg.beta);
    state_.alliance.alignment =
        alignment_status(state_.alliance.goal, goals.robot_goal, goals.candidates, cfg.confidence_floor);
}

void Session::refresh_cooperation(double) {
    const auto& cfg = resources_->config.alliance;
    const auto features =
        extract_features(log_, resources_->scenario.initial_grid, resources_->robot_goal(), cfg.features);
    state_.alliance.features = features;
    state_.alliance.cooperation = infer_cooperation(features, resources_->episodes, cfg.similarity_threshold);
}

void Session::publish_alliance(double now, const AllianceSnapshot& previous, bool force) {
    if (force || !state_.alliance.same_verdict(previous)) append(now, EntryType::Alliance, to_json(state_.alliance));
}

void Session::append(double at, EntryType type, json body) {
    log_.entries.push_back(LogEntry{at, type, std::move(body)});
}

void Session::finish(double at, SessionStatus status) {
    state_.status = status;
    append(at, EntryType::Status,
           json{{"status", to_string(status)}, {"plan_length", state_.current_plan.size()}});
}

json Session::state_view() const {
    json view;
    view["grid"] = cells_to_json(state_.grid.cells());
    view["plan_length"] = state_.current_plan.size();
    const auto step = next_step(state_.current_plan);
    view["next_step"] = step ? to_json(*step) : json(nullptr);
    view["robot_goal"] = resources_->goals.robot_goal;
    view["status"] = to_string(state_.status);
    view["need"] = state_.last_need ? to_json(*state_.last_need) : json(nullptr);
    view["alliance"] = to_json(state_.alliance);
    view["last_event_at"] = state_.last_event_at ? json(*state_.last_event_at) : json(nullptr);
    view["log_size"] = log_.entries.size();
    return view;
}

// ----------------------------------------------------------------- personas

PersonaScript parse_persona(const json& doc) {
    PersonaScript script;
    try {
        require_known_fields(doc, {"name", "description", "synthesize_ticks", "duration_s", "timeline", "expected"},
                             "persona");
        script.name = doc.at("name").get<std::string>();
        script.description = doc.value("description", std::string{});
        script.synthesize_ticks = doc.value("synthesize_ticks", true);
        if (doc.contains("duration_s")) script.duration_s = doc.at("duration_s").get<double>();
        for (const auto& e : doc.at("timeline")) script.timeline.push_back(event_from_json(e));
        if (doc.contains("expected")) {
            const auto& x = doc.at("expected");
            require_known_fields(
                x, {"min_assistance_level", "max_assistance_level", "goal", "alignment", "cooperation", "status"},
                "persona.expected");
            auto opt_int = [&](const char* key, std::optional<int>& out) {
                if (x.contains(key)) out = x.at(key).get<int>();
            };
            auto opt_str = [&](const char* key, std::optional<std::string>& out) {
                if (x.contains(key)) out = x.at(key).get<std::string>();
            };
            opt_int("min_assistance_level", script.expected.min_assistance_level);
            opt_int("max_assistance_level", script.expected.max_assistance_level);
            opt_str("goal", script.expected.goal);
            opt_str("alignment", script.expected.alignment);
            opt_str("cooperation", script.expected.cooperation);
            opt_str("status", script.expected.status);
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("persona: ") + e.what());
    }
    for (std::size_t i = 1; i < script.timeline.size(); ++i) {
        if (script.timeline[i].at < script.timeline[i - 1].at) {
            throw Error(ErrorCode::ParseError, "persona timeline is not time-ordered at event " + std::to_string(i));
        }
    }
    return script;
}

PersonaScript load_persona_file(const std::filesystem::path& path) {
    try {
        return parse_persona(json::parse(detail::read_file(path)));
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, "persona " + path.string() + ": " + e.what());
    }
}

std::vector<SessionEvent> expand_timeline(const PersonaScript& script, const PacingConfig& pacing) {
    if (!script.synthesize_ticks) return script.timeline;
    double end = script.timeline.empty() ? 0.0 : script.timeline.back().at;
    if (script.duration_s) end = std::max(end, *script.duration_s);

    std::vector<SessionEvent> out;
    std::size_t k = 1;
    auto emit_ticks_until = [&](double t) {
        for (; static_cast<double>(k) * pacing.tick_period_s <= t; ++k) {
            out.push_back(SessionEvent{static_cast<double>(k) * pacing.tick_period_s, Tick{}});
        }
    };
    for (const auto& event : script.timeline) {
        emit_ticks_until(event.at);
        out.push_back(event);
    }
    emit_ticks_until(end);
    return out;
}

SessionLog replay_events(std::span<const SessionEvent> events, std::shared_ptr<const EngineResources> resources) {
    Session session(std::move(resources));
    for (std::size_t i = 0; i < events.size(); ++i) {
        if (session.state().status != SessionStatus::Active) break;
        try {
            session.ingest(events[i]);
        } catch (const Error& e) {
            throw Error(e.code(), "event " + std::to_string(i) + ": " + e.what(),
                        json{{"index", i}, {"detail", e.detail()}});
        }
    }
    return session.log();
}

SessionLog run_persona(const PersonaScript& script, std::shared_ptr<const EngineResources> resources) {
    const auto events = expand_timeline(script, resources->config.pacing);
    return replay_events(events, std::move(resources));
}

}  // namespace aide
