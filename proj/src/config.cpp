#include "aide/config.hpp"

#include <cstdlib>

#include "aide/error.hpp"
#include "aide/json_fields.hpp"
#include "text_util.hpp"

#ifndef AIDE_DATA_DIR
#define AIDE_DATA_DIR "data"
#endif

namespace aide {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

template <class T>
void read_opt(const json& obj, const char* key, T& out) {
    if (obj.contains(key)) out = obj.at(key).get<T>();
}

void read_pair(const json& obj, const char* key, ScoreConfidence& out) {
    if (!obj.contains(key)) return;
    const auto& pair = obj.at(key);
    require_known_fields(pair, {"score", "confidence"}, key);
    read_opt(pair, "score", out.score);
    read_opt(pair, "confidence", out.confidence);
}

fs::path resolve(const fs::path& base_dir, const std::string& p) {
    fs::path path(p);
    return path.is_absolute() ? path : base_dir / path;
}

void read_path(const json& obj, const char* key, const fs::path& base_dir, std::optional<fs::path>& out) {
    if (obj.contains(key) && !obj.at(key).is_null()) out = resolve(base_dir, obj.at(key).get<std::string>());
}

void parse_fusion(const json& j, FusionConfig& f) {
    require_known_fields(j, {"weights", "thresholds", "explicit_help_floor", "confidence_weighted"}, "fusion");
    if (j.contains("weights")) {
        const auto& w = j.at("weights");
        require_known_fields(w, {"progress", "lexical", "gaze", "emotion"}, "fusion.weights");
        for (auto source : kAllSources) {
            const std::string key(to_string(source));
            if (w.contains(key)) f.weights[source] = w.at(key).get<double>();
        }
    }
    if (j.contains("thresholds")) {
        const auto t = j.at("thresholds").get<std::vector<double>>();
        if (t.size() != 3) throw Error(ErrorCode::ParseError, "fusion.thresholds needs three values");
        std::copy(t.begin(), t.end(), f.thresholds.begin());
    }
    read_opt(j, "explicit_help_floor", f.explicit_help_floor);
    read_opt(j, "confidence_weighted", f.confidence_weighted);
    f.validate();
}

void parse_gaze(const json& j, GazeConfig& g) {
    require_known_fields(j,
                         {"window_s", "mutual_min_s", "confirm_window_s", "confirm_onset_s",
                          "confirm_min_alternations", "mutual", "confirmatory", "on_task", "away"},
                         "gaze");
    read_opt(j, "window_s", g.window_s);
    read_opt(j, "mutual_min_s", g.mutual_min_s);
    read_opt(j, "confirm_window_s", g.confirm_window_s);
    read_opt(j, "confirm_onset_s", g.confirm_onset_s);
    read_opt(j, "confirm_min_alternations", g.confirm_min_alternations);
    read_pair(j, "mutual", g.mutual);
    read_pair(j, "confirmatory", g.confirmatory);
    read_pair(j, "on_task", g.on_task);
    read_pair(j, "away", g.away);
    if (!(g.window_s > 0.0) || g.mutual_min_s < 0.0 || !(g.confirm_window_s > 0.0) || g.confirm_onset_s < 0.0) {
        throw Error(ErrorCode::ParseError, "gaze windows must be positive");
    }
}

void parse_progress(const json& j, ProgressConfig& p) {
    require_known_fields(j, {"decrease", "stall", "increase"}, "progress");
    read_pair(j, "decrease", p.decrease);
    read_pair(j, "stall", p.stall);
    read_pair(j, "increase", p.increase);
}

void parse_pacing(const json& j, PacingConfig& p) {
    require_known_fields(j, {"tick_period_s", "cooldown_s", "abandon_after_s", "utterance_ttl_s"}, "pacing");
    read_opt(j, "tick_period_s", p.tick_period_s);
    read_opt(j, "cooldown_s", p.cooldown_s);
    read_opt(j, "abandon_after_s", p.abandon_after_s);
    read_opt(j, "utterance_ttl_s", p.utterance_ttl_s);
    if (!(p.tick_period_s > 0.0) || p.cooldown_s < 0.0 || !(p.abandon_after_s > 0.0) || p.utterance_ttl_s < 0.0) {
        throw Error(ErrorCode::ParseError, "pacing periods must be positive");
    }
}

void parse_alliance(const json& j, AllianceConfig& a) {
    require_known_fields(j,
                         {"beta", "confidence_floor", "similarity_threshold", "horizon_s", "idle_grace_s",
                          "refusal_phrases"},
                         "alliance");
    read_opt(j, "beta", a.beta);
    read_opt(j, "confidence_floor", a.confidence_floor);
    read_opt(j, "similarity_threshold", a.similarity_threshold);
    read_opt(j, "horizon_s", a.features.horizon_s);
    read_opt(j, "idle_grace_s", a.features.idle_grace_s);
    read_opt(j, "refusal_phrases", a.features.refusal_phrases);
    if (!(a.beta > 0.0) || !(a.features.horizon_s > 0.0) || a.features.idle_grace_s < 0.0) {
        throw Error(ErrorCode::ParseError, "alliance constants must be positive");
    }
}

void parse_emotion(const json& j, const fs::path& base_dir, EmotionConfig& e) {
    require_known_fields(j, {"model_path", "corpus_path", "alpha"}, "emotion");
    read_path(j, "model_path", base_dir, e.model_path);
    read_path(j, "corpus_path", base_dir, e.corpus_path);
    read_opt(j, "alpha", e.alpha);
}

}  // namespace

EngineConfig parse_config(const json& doc, const fs::path& base_dir) {
    EngineConfig config;
    try {
        require_known_fields(doc,
                             {"fusion", "gaze", "progress", "pacing", "alliance", "emotion", "catalog_path",
                              "lexicon_path", "goals_path", "episodes_path"},
                             "config");
        if (doc.contains("fusion")) parse_fusion(doc.at("fusion"), config.fusion);
        if (doc.contains("gaze")) parse_gaze(doc.at("gaze"), config.gaze);
        if (doc.contains("progress")) parse_progress(doc.at("progress"), config.progress);
        if (doc.contains("pacing")) parse_pacing(doc.at("pacing"), config.pacing);
        if (doc.contains("alliance")) parse_alliance(doc.at("alliance"), config.alliance);
        if (doc.contains("emotion")) parse_emotion(doc.at("emotion"), base_dir, config.emotion);
        config.catalog_path = resolve(base_dir, doc.at("catalog_path").get<std::string>());
        config.lexicon_path = resolve(base_dir, doc.at("lexicon_path").get<std::string>());
        read_path(doc, "goals_path", base_dir, config.goals_path);
        read_path(doc, "episodes_path", base_dir, config.episodes_path);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("config: ") + e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::InvalidArgument) throw Error(ErrorCode::ParseError, e.what());
        throw;
    }
    return config;
}

ConfigSource ConfigSource::patched(const json& overrides) const {
    ConfigSource out = *this;
    if (!overrides.is_null()) out.doc.merge_patch(overrides);
    return out;
}

ConfigSource load_config_source(const fs::path& path) {
    try {
        return ConfigSource{json::parse(detail::read_file(path)), path.parent_path()};
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, "config " + path.string() + ": " + e.what());
    }
}

fs::path data_dir() { return fs::path(AIDE_DATA_DIR); }

fs::path resolve_data_ref(const std::string& ref, std::string_view subdir) {
    fs::path path(ref);
    if (path.is_absolute() || fs::exists(path)) return path;
    const fs::path shipped = data_dir() / subdir / path;
    if (fs::exists(shipped)) return shipped;
    if (!path.has_extension() && fs::exists(shipped.string() + ".json")) return shipped.string() + ".json";
    return path;
}

fs::path resolve_config_path(const std::optional<fs::path>& explicit_path) {
    if (explicit_path) return *explicit_path;
    if (const char* env = std::getenv("AIDE_CONFIG"); env && *env) return fs::path(env);
    return data_dir() / "config" / "default.json";
}

std::shared_ptr<const EngineResources> load_resources(Scenario scenario, const fs::path& scenario_dir,
                                                      EngineConfig config,
                                                      std::optional<AssistanceCatalog> catalog_override) {
    auto res = std::make_shared<EngineResources>();
    res->schedule = scenario.schedule();
    res->catalog = catalog_override ? std::move(*catalog_override) : load_catalog_file(config.catalog_path);
    res->lexicon = load_lexicon_file(config.lexicon_path);

    if (config.emotion.model_path) {
        res->emotion = load_emotion_model_file(*config.emotion.model_path);
    } else if (config.emotion.corpus_path) {
        const auto corpus = load_corpus_file(*config.emotion.corpus_path);
        res->emotion = train(corpus, config.emotion.alpha);
    }

    std::optional<fs::path> goals_path = config.goals_path;
    if (scenario.goals) goals_path = resolve(scenario_dir, *scenario.goals);
    if (goals_path) {
        res->goals = load_goal_set_file(*goals_path);
        if (!(res->robot_goal().schedule == res->schedule)) {
            throw Error(ErrorCode::ScenarioInvalid,
                        "robot goal '" + res->goals.robot_goal + "' differs from the scenario's effective schedule");
        }
    } else {
        res->goals.robot_goal = "prescribed";
        res->goals.candidates.push_back(CandidateGoal{"prescribed", res->schedule, true});
    }

    std::optional<fs::path> episodes_path = config.episodes_path;
    if (scenario.episodes) episodes_path = resolve(scenario_dir, *scenario.episodes);
    if (episodes_path) res->episodes = load_episodes_file(*episodes_path);

    res->scenario = std::move(scenario);
    res->config = std::move(config);
    return res;
}

}  // namespace aide
