#pragma once
// Need indicators (task progress, lexical cues, eye gaze, emotion) and their
// confidence-weighted linear fusion into a need level 0-3.

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "aide/emolex.hpp"

namespace aide {

enum class IndicatorSource : std::uint8_t { Progress, Lexical, Gaze, Emotion };
inline constexpr std::array<IndicatorSource, 4> kAllSources{IndicatorSource::Progress, IndicatorSource::Lexical,
                                                            IndicatorSource::Gaze, IndicatorSource::Emotion};

std::string_view to_string(IndicatorSource source) noexcept;
IndicatorSource parse_indicator_source(std::string_view text);

struct IndicatorReading {
    IndicatorSource source = IndicatorSource::Progress;
    double score = 0.0;       // 0 = no need
    double confidence = 0.0;
    double at = 0.0;
    std::string note;
    bool explicit_request = false;
};

// Builds a reading with score and confidence clamped to [0, 1] (NaN -> 0).
IndicatorReading make_reading(IndicatorSource source, double score, double confidence, double at,
                              std::string note = {}, bool explicit_request = false);

nlohmann::json to_json(const IndicatorReading& reading);
IndicatorReading reading_from_json(const nlohmann::json& j);

// ---------------------------------------------------------------- progress

struct ScoreConfidence {
    double score = 0.0;
    double confidence = 0.0;
};

struct ProgressConfig {
    ScoreConfidence decrease{0.0, 0.9};
    ScoreConfidence stall{0.5, 0.5};
    ScoreConfidence increase{0.9, 0.9};
};

IndicatorReading progress_indicator(std::size_t prev_len, std::size_t cur_len, double at,
                                    const ProgressConfig& config = {});

// ----------------------------------------------------------------- lexical

struct LexiconEntry {
    std::string phrase;
    double score = 0.0;
    bool explicit_request = false;
};

using Lexicon = std::vector<LexiconEntry>;

// Lowercase, curly apostrophes folded to ', other punctuation to spaces,
// whitespace collapsed.
std::string normalize_utterance(std::string_view text);

IndicatorReading lexical_indicator(std::string_view utterance, const Lexicon& lexicon, double at);

Lexicon parse_lexicon(const nlohmann::json& doc);
Lexicon load_lexicon_file(const std::filesystem::path& path);

// -------------------------------------------------------------------- gaze

enum class GazeTarget : std::uint8_t { Task, Robot, Away };
std::string_view to_string(GazeTarget target) noexcept;
GazeTarget parse_gaze_target(std::string_view text);

struct GazeFixation {
    GazeTarget target = GazeTarget::Task;
    double start = 0.0;
    double duration = 0.0;

    double end() const noexcept { return start + duration; }
};

struct GazeConfig {
    double window_s = 10.0;
    double mutual_min_s = 1.0;
    double confirm_window_s = 8.0;
    double confirm_onset_s = 3.0;
    int confirm_min_alternations = 2;
    ScoreConfidence mutual{0.8, 0.8};
    ScoreConfidence confirmatory{0.6, 0.8};
    ScoreConfidence on_task{0.0, 0.9};
    ScoreConfidence away{0.3, 0.3};
};

enum class GazePattern : std::uint8_t { Mutual, Confirmatory, OnTask, Away, NoData };
std::string_view to_string(GazePattern pattern) noexcept;

// Exactly one pattern per evaluation, by precedence
// mutual > confirmatory > on_task > away; NoData when the window is empty.
GazePattern classify_gaze(std::span<const GazeFixation> stream, std::optional<double> last_action_at,
                          double now, const GazeConfig& config = {});

IndicatorReading gaze_indicator(std::span<const GazeFixation> stream, std::optional<double> last_action_at,
                                double now, const GazeConfig& config = {});

// Throws UnorderedStream unless fixations are time-ordered and non-overlapping.
void check_gaze_stream(std::span<const GazeFixation> stream);

// ----------------------------------------------------------------- emotion

double emotion_need_score(EmotionLabel label) noexcept;
IndicatorReading emotion_indicator(EmotionLabel label, double posterior, double at);
IndicatorReading emotion_indicator(std::string_view label, double posterior, double at);

// ------------------------------------------------------------------ fusion

struct FusionConfig {
    std::map<IndicatorSource, double> weights{{IndicatorSource::Progress, 0.35},
                                              {IndicatorSource::Lexical, 0.30},
                                              {IndicatorSource::Gaze, 0.20},
                                              {IndicatorSource::Emotion, 0.15}};
    std::array<double, 3> thresholds{0.25, 0.5, 0.75};
    int explicit_help_floor = 2;
    bool confidence_weighted = true;

    void validate() const;
};

struct NeedEstimate {
    int level = 0;
    double fused_score = 0.0;
    std::vector<IndicatorReading> contributing;
};

int need_level(double fused_score, const std::array<double, 3>& thresholds) noexcept;

NeedEstimate fuse(std::span<const IndicatorReading> readings, const FusionConfig& config);

nlohmann::json to_json(const NeedEstimate& estimate);

}  // namespace aide
