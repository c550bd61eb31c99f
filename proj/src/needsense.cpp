#include "aide/needsense.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "aide/error.hpp"
#include "aide/json_fields.hpp"
#include "text_util.hpp"

namespace aide {

using nlohmann::json;

namespace {

double clamp01(double v) {
    if (std::isnan(v)) return 0.0;
    return std::clamp(v, 0.0, 1.0);
}

IndicatorReading from_pair(IndicatorSource source, ScoreConfidence sc, double at, std::string note) {
    return make_reading(source, sc.score, sc.confidence, at, std::move(note));
}

struct WindowTotals {
    double task = 0.0;
    double away = 0.0;
    std::size_t fixations = 0;
};

}  // namespace

std::string_view to_string(IndicatorSource source) noexcept {
    switch (source) {
        case IndicatorSource::Progress: return "progress";
        case IndicatorSource::Lexical: return "lexical";
        case IndicatorSource::Gaze: return "gaze";
        case IndicatorSource::Emotion: return "emotion";
    }
    return "?";
}

IndicatorSource parse_indicator_source(std::string_view text) {
    for (auto s : kAllSources) {
        if (text == to_string(s)) return s;
    }
    throw Error(ErrorCode::ParseError, "unknown indicator source '" + std::string(text) + "'");
}

IndicatorReading make_reading(IndicatorSource source, double score, double confidence, double at,
                              std::string note, bool explicit_request) {
    return IndicatorReading{source, clamp01(score), clamp01(confidence), at, std::move(note), explicit_request};
}

json to_json(const IndicatorReading& r) {
    json out{{"source", to_string(r.source)},
             {"score", r.score},
             {"confidence", r.confidence},
             {"at", r.at},
             {"note", r.note}};
    if (r.explicit_request) out["explicit"] = true;
    return out;
}

IndicatorReading reading_from_json(const json& j) {
    return make_reading(parse_indicator_source(j.at("source").get<std::string>()), j.at("score").get<double>(),
                        j.at("confidence").get<double>(), j.at("at").get<double>(), j.value("note", std::string{}),
                        j.value("explicit", false));
}

IndicatorReading progress_indicator(std::size_t prev_len, std::size_t cur_len, double at,
                                    const ProgressConfig& config) {
    const std::string note = "plan length " + std::to_string(prev_len) + " -> " + std::to_string(cur_len);
    if (cur_len < prev_len) return from_pair(IndicatorSource::Progress, config.decrease, at, note);
    if (cur_len == prev_len) return from_pair(IndicatorSource::Progress, config.stall, at, note);
    return from_pair(IndicatorSource::Progress, config.increase, at, note);
}

std::string normalize_utterance(std::string_view text) {
    std::string folded;
    folded.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        // U+2018 / U+2019 (E2 80 98 / E2 80 99) -> '
        if (i + 2 < text.size() && static_cast<unsigned char>(text[i]) == 0xE2 &&
            static_cast<unsigned char>(text[i + 1]) == 0x80 &&
            (static_cast<unsigned char>(text[i + 2]) == 0x98 || static_cast<unsigned char>(text[i + 2]) == 0x99)) {
            folded.push_back('\'');
            i += 2;
            continue;
        }
        folded.push_back(text[i]);
    }

    std::string out;
    bool pending_space = false;
    for (unsigned char c : folded) {
        const bool keep = c >= 0x80 || std::isalnum(c) || c == '\'';
        if (!keep) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

IndicatorReading lexical_indicator(std::string_view utterance, const Lexicon& lexicon, double at) {
    if (lexicon.empty()) {
        throw Error(ErrorCode::InvalidArgument, "lexicon must not be empty");
    }
    const std::string text = normalize_utterance(utterance);
    const LexiconEntry* best = nullptr;
    bool any_explicit = false;
    for (const auto& entry : lexicon) {
        const std::string phrase = normalize_utterance(entry.phrase);
        if (phrase.empty() || text.find(phrase) == std::string::npos) continue;
        any_explicit = any_explicit || entry.explicit_request;
        if (!best || entry.score > best->score) best = &entry;
    }
    if (!best) return make_reading(IndicatorSource::Lexical, 0.0, 1.0, at, "no cue");
    std::string note = (any_explicit ? "explicit: " : "cue: ") + normalize_utterance(best->phrase);
    return make_reading(IndicatorSource::Lexical, best->score, 1.0, at, std::move(note), any_explicit);
}

Lexicon parse_lexicon(const json& doc) {
    if (!doc.is_array()) throw Error(ErrorCode::ParseError, "lexicon must be a JSON array");
    Lexicon lexicon;
    try {
        for (const auto& e : doc) {
            require_known_fields(e, {"phrase", "score", "explicit"}, "lexicon entry");
            LexiconEntry entry{e.at("phrase").get<std::string>(), e.at("score").get<double>(),
                               e.value("explicit", false)};
            if (entry.score < 0.0 || entry.score > 1.0) {
                throw Error(ErrorCode::ParseError, "lexicon score must lie in [0, 1]");
            }
            lexicon.push_back(std::move(entry));
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("lexicon: ") + e.what());
    }
    if (lexicon.empty()) throw Error(ErrorCode::ParseError, "lexicon must not be empty");
    return lexicon;
}

Lexicon load_lexicon_file(const std::filesystem::path& path) {
    try {
        return parse_lexicon(json::parse(detail::read_file(path)));
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, std::string("lexicon JSON: ") + e.what());
    }
}

std::string_view to_string(GazeTarget target) noexcept {
    switch (target) {
        case GazeTarget::Task: return "TASK";
        case GazeTarget::Robot: return "ROBOT";
        case GazeTarget::Away: return "AWAY";
    }
    return "?";
}

GazeTarget parse_gaze_target(std::string_view text) {
    if (detail::iequals(text, "TASK")) return GazeTarget::Task;
    if (detail::iequals(text, "ROBOT")) return GazeTarget::Robot;
    if (detail::iequals(text, "AWAY")) return GazeTarget::Away;
    throw Error(ErrorCode::ParseError, "unknown gaze target '" + std::string(text) + "'");
}

std::string_view to_string(GazePattern pattern) noexcept {
    switch (pattern) {
        case GazePattern::Mutual: return "mutual";
        case GazePattern::Confirmatory: return "confirmatory";
        case GazePattern::OnTask: return "on_task";
        case GazePattern::Away: return "away";
        case GazePattern::NoData: return "no_data";
    }
    return "?";
}

void check_gaze_stream(std::span<const GazeFixation> stream) {
    constexpr double kEps = 1e-9;
    for (std::size_t i = 0; i < stream.size(); ++i) {
        if (!(stream[i].duration > 0.0)) {
            throw Error(ErrorCode::UnorderedStream, "gaze fixation duration must be positive");
        }
        if (i > 0 && stream[i].start + kEps < stream[i - 1].end()) {
            throw Error(ErrorCode::UnorderedStream, "gaze fixations overlap or are out of order");
        }
    }
}

GazePattern classify_gaze(std::span<const GazeFixation> stream, std::optional<double> last_action_at,
                          double now, const GazeConfig& config) {
    check_gaze_stream(stream);
    const double window_start = now - config.window_s;
    auto in_window = [&](const GazeFixation& f) { return f.end() > window_start && f.start <= now; };

    WindowTotals totals;
    bool mutual = false;
    for (const auto& f : stream) {
        if (!in_window(f)) continue;
        ++totals.fixations;
        const double overlap = std::min(f.end(), now) - std::max(f.start, window_start);
        if (f.target == GazeTarget::Task) totals.task += overlap;
        if (f.target == GazeTarget::Away) totals.away += overlap;
        // Strictly longer than the threshold: glances of exactly the threshold
        // length belong to a confirmatory cycle.
        if (f.target == GazeTarget::Robot && f.duration > config.mutual_min_s) mutual = true;
    }
    if (totals.fixations == 0) return GazePattern::NoData;
    if (mutual) return GazePattern::Mutual;

    if (last_action_at) {
        const double action = *last_action_at;
        std::vector<GazeTarget> cycle;
        double first_start = 0.0;
        for (const auto& f : stream) {
            if (!in_window(f) || f.target == GazeTarget::Away) continue;
            if (f.start < action || f.start > action + config.confirm_window_s) continue;
            if (cycle.empty()) first_start = f.start;
            cycle.push_back(f.target);
        }
        if (!cycle.empty() && first_start <= action + config.confirm_onset_s) {
            int alternations = 0;
            for (std::size_t i = 1; i < cycle.size(); ++i) {
                if (cycle[i] != cycle[i - 1]) ++alternations;
            }
            if (alternations >= config.confirm_min_alternations) return GazePattern::Confirmatory;
        }
    }

    if (totals.task > 0.0 && totals.task >= totals.away) return GazePattern::OnTask;
    return GazePattern::Away;
}

IndicatorReading gaze_indicator(std::span<const GazeFixation> stream, std::optional<double> last_action_at,
                                double now, const GazeConfig& config) {
    const GazePattern pattern = classify_gaze(stream, last_action_at, now, config);
    const std::string note(to_string(pattern));
    switch (pattern) {
        case GazePattern::Mutual: return from_pair(IndicatorSource::Gaze, config.mutual, now, note);
        case GazePattern::Confirmatory: return from_pair(IndicatorSource::Gaze, config.confirmatory, now, note);
        case GazePattern::OnTask: return from_pair(IndicatorSource::Gaze, config.on_task, now, note);
        case GazePattern::Away: return from_pair(IndicatorSource::Gaze, config.away, now, note);
        case GazePattern::NoData: break;
    }
    return make_reading(IndicatorSource::Gaze, 0.0, 0.0, now, note);
}

double emotion_need_score(EmotionLabel label) noexcept {
    switch (label) {
        case EmotionLabel::Anger: return 0.9;
        case EmotionLabel::Frustration: return 0.9;
        case EmotionLabel::Boredom: return 0.7;
        case EmotionLabel::Challenge: return 0.6;
        case EmotionLabel::Sadness: return 0.4;
        case EmotionLabel::Others: return 0.2;
        case EmotionLabel::Happiness: return 0.0;
    }
    return 0.0;
}

IndicatorReading emotion_indicator(EmotionLabel label, double posterior, double at) {
    if (!(posterior >= 0.0 && posterior <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "posterior must lie in [0, 1]");
    }
    return make_reading(IndicatorSource::Emotion, emotion_need_score(label), posterior, at,
                        std::string(to_string(label)));
}

IndicatorReading emotion_indicator(std::string_view label, double posterior, double at) {
    auto parsed = parse_emotion_label(label);
    if (!parsed) throw Error(ErrorCode::UnknownLabel, "unknown emotion label '" + std::string(label) + "'");
    return emotion_indicator(*parsed, posterior, at);
}

void FusionConfig::validate() const {
    double total = 0.0;
    for (const auto& [source, w] : weights) {
        if (!(w >= 0.0) || !std::isfinite(w)) {
            throw Error(ErrorCode::InvalidArgument, "fusion weights must be non-negative");
        }
        total += w;
    }
    if (!(total > 0.0)) throw Error(ErrorCode::InvalidArgument, "fusion weights must not all be zero");
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        if (!(thresholds[i] > 0.0 && thresholds[i] < 1.0) || (i > 0 && !(thresholds[i] > thresholds[i - 1]))) {
            throw Error(ErrorCode::InvalidArgument, "thresholds must be strictly ascending in (0, 1)");
        }
    }
    if (explicit_help_floor < 0 || explicit_help_floor > 3) {
        throw Error(ErrorCode::InvalidArgument, "explicit_help_floor must lie in [0, 3]");
    }
}

int need_level(double fused_score, const std::array<double, 3>& thresholds) noexcept {
    int level = 0;
    for (double t : thresholds) {
        if (fused_score >= t) ++level;
    }
    return level;
}

NeedEstimate fuse(std::span<const IndicatorReading> readings, const FusionConfig& config) {
    std::map<IndicatorSource, const IndicatorReading*> latest;
    for (const auto& r : readings) {
        auto& slot = latest[r.source];
        if (!slot || r.at >= slot->at) slot = &r;
    }

    double numerator = 0.0;
    double denominator = 0.0;
    bool explicit_request = false;
    for (const auto& [source, r] : latest) {
        auto it = config.weights.find(source);
        const double w = it == config.weights.end() ? 0.0 : it->second;
        const double mass = config.confidence_weighted ? w * r->confidence : w;
        numerator += mass * r->score;
        denominator += mass;
        explicit_request = explicit_request || r->explicit_request;
    }

    NeedEstimate estimate;
    estimate.fused_score = denominator > 0.0 ? clamp01(numerator / denominator) : 0.0;
    estimate.level = need_level(estimate.fused_score, config.thresholds);
    if (explicit_request) estimate.level = std::max(estimate.level, config.explicit_help_floor);
    estimate.contributing.assign(readings.begin(), readings.end());
    return estimate;
}

json to_json(const NeedEstimate& estimate) {
    json contributing = json::array();
    for (const auto& r : estimate.contributing) contributing.push_back(to_json(r));
    return json{{"level", estimate.level},
                {"fused_score", estimate.fused_score},
                {"contributing", std::move(contributing)}};
}

}  // namespace aide
