#include "aide/emolex.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>

#include "aide/error.hpp"
#include "aide/json_fields.hpp"
#include "text_util.hpp"

namespace aide {

using nlohmann::json;

std::string_view to_string(EmotionLabel label) noexcept {
    switch (label) {
        case EmotionLabel::Happiness: return "happiness";
        case EmotionLabel::Sadness: return "sadness";
        case EmotionLabel::Anger: return "anger";
        case EmotionLabel::Others: return "others";
        case EmotionLabel::Boredom: return "boredom";
        case EmotionLabel::Challenge: return "challenge";
        case EmotionLabel::Frustration: return "frustration";
    }
    return "?";
}

std::optional<EmotionLabel> parse_emotion_label(std::string_view text) noexcept {
    const std::string lower = detail::to_lower(text);
    for (auto label : kAllEmotionLabels) {
        if (lower == to_string(label)) return label;
    }
    if (lower == "happy") return EmotionLabel::Happiness;
    if (lower == "sad") return EmotionLabel::Sadness;
    if (lower == "angry") return EmotionLabel::Anger;
    return std::nullopt;
}

bool is_core_label(EmotionLabel label) noexcept {
    return label == EmotionLabel::Happiness || label == EmotionLabel::Sadness || label == EmotionLabel::Anger ||
           label == EmotionLabel::Others;
}

std::set<EmotionLabel> all_emotion_labels() { return {kAllEmotionLabels.begin(), kAllEmotionLabels.end()}; }

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : text) {
        if (c < 0x80 && std::isalnum(c)) {
            current.push_back(static_cast<char>(std::tolower(c)));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

EmotionModel train(std::span<const LabeledConversation> corpus, double alpha,
                   const std::set<EmotionLabel>& allowed) {
    if (corpus.empty()) {
        throw Error(ErrorCode::EmptyCorpus, "cannot train on an empty corpus");
    }
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw Error(ErrorCode::InvalidArgument, "smoothing alpha must be positive");
    }

    std::map<EmotionLabel, std::size_t> documents;
    std::map<EmotionLabel, std::map<std::string, std::size_t>> counts;
    std::map<EmotionLabel, std::size_t> totals;
    EmotionModel model;
    model.alpha_ = alpha;

    for (const auto& example : corpus) {
        if (!allowed.contains(example.label)) {
            throw Error(ErrorCode::UnknownLabelInCorpus,
                        "label '" + std::string(to_string(example.label)) + "' not in the declared label set");
        }
        ++documents[example.label];
        auto& class_counts = counts[example.label];
        for (auto& token : tokenize(example.conversation.text())) {
            ++totals[example.label];
            model.vocabulary_.insert(token);
            ++class_counts[std::move(token)];
        }
    }

    const double n_docs = static_cast<double>(corpus.size());
    const double vocab = static_cast<double>(model.vocabulary_.size());
    for (const auto& [label, n] : documents) {
        model.log_priors_[label] = std::log(static_cast<double>(n) / n_docs);
        const double denom = static_cast<double>(totals[label]) + alpha * vocab;
        auto& table = model.log_likelihoods_[label];
        const auto& class_counts = counts[label];
        for (const auto& token : model.vocabulary_) {
            auto it = class_counts.find(token);
            const double c = it == class_counts.end() ? 0.0 : static_cast<double>(it->second);
            table[token] = std::log((c + alpha) / denom);
        }
    }
    return model;
}

EmotionPrediction classify(const Conversation& conversation, const EmotionModel& model) {
    if (!model.trained()) {
        throw Error(ErrorCode::UntrainedModel, "emotion model has not been trained");
    }
    std::map<EmotionLabel, double> scores = model.class_log_priors();
    for (const auto& token : tokenize(conversation.text())) {
        if (!model.vocabulary().contains(token)) continue;
        for (auto& [label, score] : scores) {
            score += model.token_log_likelihoods().at(label).at(token);
        }
    }

    // std::map iterates in enum order, so strict '>' keeps the earliest label on ties.
    EmotionPrediction out;
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& [label, score] : scores) {
        if (score > best) {
            best = score;
            out.label = label;
        }
    }
    double norm = 0.0;
    for (const auto& [label, score] : scores) norm += std::exp(score - best);
    for (const auto& [label, score] : scores) out.posteriors[label] = std::exp(score - best) / norm;
    out.posterior = out.posteriors.at(out.label);
    return out;
}

json EmotionModel::to_json() const {
    json priors = json::object();
    json likelihoods = json::object();
    for (const auto& [label, value] : log_priors_) priors[std::string(aide::to_string(label))] = value;
    for (const auto& [label, table] : log_likelihoods_) {
        json entry = json::object();
        for (const auto& [token, value] : table) entry[token] = value;
        likelihoods[std::string(aide::to_string(label))] = std::move(entry);
    }
    return json{{"smoothing_alpha", alpha_},
                {"class_log_priors", std::move(priors)},
                {"token_log_likelihoods", std::move(likelihoods)},
                {"vocabulary", vocabulary_}};
}

EmotionModel EmotionModel::from_json(const json& doc) {
    EmotionModel model;
    try {
        require_known_fields(doc, {"smoothing_alpha", "class_log_priors", "token_log_likelihoods", "vocabulary"},
                             "emotion model");
        model.alpha_ = doc.at("smoothing_alpha").get<double>();
        model.vocabulary_ = doc.at("vocabulary").get<std::set<std::string>>();
        auto label_of = [](const std::string& name) {
            auto label = parse_emotion_label(name);
            if (!label) throw Error(ErrorCode::UnknownLabel, "unknown emotion label '" + name + "'");
            return *label;
        };
        for (const auto& [name, value] : doc.at("class_log_priors").items()) {
            model.log_priors_[label_of(name)] = value.get<double>();
        }
        for (const auto& [name, table] : doc.at("token_log_likelihoods").items()) {
            auto& out = model.log_likelihoods_[label_of(name)];
            for (const auto& [token, value] : table.items()) out[token] = value.get<double>();
        }
        for (const auto& [label, prior] : model.log_priors_) {
            const auto& table = model.log_likelihoods_[label];
            for (const auto& token : model.vocabulary_) {
                if (!table.contains(token)) {
                    throw Error(ErrorCode::ParseError, "emotion model lacks likelihood for '" + token + "'");
                }
            }
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("emotion model: ") + e.what());
    }
    return model;
}

std::vector<LabeledConversation> parse_corpus_tsv(std::istream& in) {
    std::vector<LabeledConversation> corpus;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            const auto tab = line.find('\t', start);
            fields.push_back(line.substr(start, tab - start));
            if (tab == std::string::npos) break;
            start = tab + 1;
        }
        if (line_no == 1 && fields.size() == 5 && fields[0] == "id") continue;
        if (fields.size() != 5) {
            throw Error(ErrorCode::ParseError,
                        "corpus line " + std::to_string(line_no) + ": expected 5 tab-separated fields");
        }
        auto label = parse_emotion_label(fields[4]);
        if (!label) {
            throw Error(ErrorCode::UnknownLabelInCorpus,
                        "corpus line " + std::to_string(line_no) + ": unknown label '" + fields[4] + "'");
        }
        corpus.push_back({Conversation{fields[0], {fields[1], fields[2], fields[3]}}, *label});
    }
    return corpus;
}

std::vector<LabeledConversation> load_corpus_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ParseError, "cannot open corpus " + path.string());
    return parse_corpus_tsv(in);
}

EmotionModel load_emotion_model_file(const std::filesystem::path& path) {
    try {
        return EmotionModel::from_json(json::parse(detail::read_file(path)));
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, std::string("emotion model JSON: ") + e.what());
    }
}

}  // namespace aide
