#pragma once
// Multinomial naive Bayes over the bag of words of a three-turn conversation.

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace aide {

// Declaration order is the tie-break order for classification.
enum class EmotionLabel : std::uint8_t {
    Happiness,
    Sadness,
    Anger,
    Others,
    Boredom,
    Challenge,
    Frustration,
};

inline constexpr std::array<EmotionLabel, 7> kAllEmotionLabels{
    EmotionLabel::Happiness, EmotionLabel::Sadness,   EmotionLabel::Anger,      EmotionLabel::Others,
    EmotionLabel::Boredom,   EmotionLabel::Challenge, EmotionLabel::Frustration};

std::string_view to_string(EmotionLabel label) noexcept;
// Accepts canonical names plus the corpus spellings happy/sad/angry.
std::optional<EmotionLabel> parse_emotion_label(std::string_view text) noexcept;
bool is_core_label(EmotionLabel label) noexcept;

struct Conversation {
    std::string id;
    std::array<std::string, 3> turns;

    std::string text() const { return turns[0] + ' ' + turns[1] + ' ' + turns[2]; }
};

struct LabeledConversation {
    Conversation conversation;
    EmotionLabel label = EmotionLabel::Others;
};

// Lowercase, split on every non-alphanumeric byte, drop empties.
std::vector<std::string> tokenize(std::string_view text);

class EmotionModel {
public:
    bool trained() const noexcept { return !log_priors_.empty(); }
    double smoothing_alpha() const noexcept { return alpha_; }
    const std::map<EmotionLabel, double>& class_log_priors() const noexcept { return log_priors_; }
    const std::map<EmotionLabel, std::map<std::string, double>>& token_log_likelihoods() const noexcept {
        return log_likelihoods_;
    }
    const std::set<std::string>& vocabulary() const noexcept { return vocabulary_; }

    nlohmann::json to_json() const;
    static EmotionModel from_json(const nlohmann::json& doc);

    friend EmotionModel train(std::span<const LabeledConversation>, double, const std::set<EmotionLabel>&);

private:
    std::map<EmotionLabel, double> log_priors_;
    std::map<EmotionLabel, std::map<std::string, double>> log_likelihoods_;
    std::set<std::string> vocabulary_;
    double alpha_ = 1.0;
};

std::set<EmotionLabel> all_emotion_labels();

EmotionModel train(std::span<const LabeledConversation> corpus, double alpha = 1.0,
                   const std::set<EmotionLabel>& allowed = all_emotion_labels());

struct EmotionPrediction {
    EmotionLabel label = EmotionLabel::Others;
    double posterior = 0.0;
    std::map<EmotionLabel, double> posteriors;
};

EmotionPrediction classify(const Conversation& conversation, const EmotionModel& model);

// Tab-separated: id, turn1, turn2, turn3, label. A leading "id\t..." header is skipped.
std::vector<LabeledConversation> parse_corpus_tsv(std::istream& in);
std::vector<LabeledConversation> load_corpus_file(const std::filesystem::path& path);

EmotionModel load_emotion_model_file(const std::filesystem::path& path);

}  // namespace aide
