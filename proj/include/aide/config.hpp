#pragma once
// Engine configuration and the immutable resources a session runs against.

#include <filesystem>
#include <memory>
#include <optional>
#include <vector>

#include <json.hpp>

#include "aide/alliance.hpp"
#include "aide/emolex.hpp"
#include "aide/hintengine.hpp"
#include "aide/meddomain.hpp"
#include "aide/needsense.hpp"

namespace aide {

struct PacingConfig {
    double tick_period_s = 5.0;
    double cooldown_s = 10.0;
    double abandon_after_s = 120.0;
    // Lexical and emotion readings stop contributing this long after the utterance.
    double utterance_ttl_s = 15.0;
};

struct AllianceConfig {
    double beta = 5.0;
    double confidence_floor = 0.6;
    double similarity_threshold = 0.75;
    FeatureConfig features;
};

struct EmotionConfig {
    std::optional<std::filesystem::path> model_path;
    std::optional<std::filesystem::path> corpus_path;
    double alpha = 1.0;
};

struct EngineConfig {
    FusionConfig fusion;
    GazeConfig gaze;
    ProgressConfig progress;
    PacingConfig pacing;
    AllianceConfig alliance;
    EmotionConfig emotion;
    std::filesystem::path catalog_path;
    std::filesystem::path lexicon_path;
    std::optional<std::filesystem::path> goals_path;
    std::optional<std::filesystem::path> episodes_path;
};

// Relative paths resolve against `base_dir`. Absent keys keep their defaults.
EngineConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);

struct ConfigSource {
    nlohmann::json doc;
    std::filesystem::path base_dir;

    EngineConfig parse() const { return parse_config(doc, base_dir); }
    // RFC 7386 merge patch over the document.
    ConfigSource patched(const nlohmann::json& overrides) const;
};

ConfigSource load_config_source(const std::filesystem::path& path);

// Explicit path if given, else $AIDE_CONFIG, else the shipped default.
std::filesystem::path resolve_config_path(const std::optional<std::filesystem::path>& explicit_path);
std::filesystem::path data_dir();

// An existing path as given, else a shipped file data/<subdir>/<ref>[.json].
std::filesystem::path resolve_data_ref(const std::string& ref, std::string_view subdir);

struct EngineResources {
    EngineConfig config;
    Scenario scenario;
    Schedule schedule;
    AssistanceCatalog catalog;
    Lexicon lexicon;
    std::optional<EmotionModel> emotion;
    GoalSet goals;
    std::vector<Episode> episodes;

    const CandidateGoal& robot_goal() const { return *goals.find(goals.robot_goal); }
};

// Loads catalog, lexicon, emotion model, goal set and episode library.
// Scenario-relative references take precedence over the config's paths.
// Without a goal set, the scenario's own schedule becomes the single,
// permissible robot goal "prescribed".
std::shared_ptr<const EngineResources> load_resources(Scenario scenario, const std::filesystem::path& scenario_dir,
                                                      EngineConfig config,
                                                      std::optional<AssistanceCatalog> catalog_override = {});

}  // namespace aide
