#include "aide/hintengine.hpp"

#include <algorithm>

#include "aide/error.hpp"
#include "aide/json_fields.hpp"
#include "text_util.hpp"

namespace aide {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 5> kPlaceholders{"med", "color", "shape", "day", "slot"};

TemplateActionKind parse_template_kind(std::string_view text) {
    if (text == "add_pill") return TemplateActionKind::AddPill;
    if (text == "remove_pill") return TemplateActionKind::RemovePill;
    if (text == "any") return TemplateActionKind::Any;
    throw Error(ErrorCode::ParseError, "unknown action_kind '" + std::string(text) + "'");
}

Justification parse_justification(std::string_view text) {
    for (auto j : {Justification::MissingPill, Justification::WrongTime, Justification::ExtraPill,
                   Justification::None}) {
        if (text == to_string(j)) return j;
    }
    throw Error(ErrorCode::ParseError, "unknown justification '" + std::string(text) + "'");
}

bool kind_matches(TemplateActionKind tmpl, ActionKind kind) {
    return tmpl == TemplateActionKind::Any ||
           (tmpl == TemplateActionKind::AddPill) == (kind == ActionKind::AddPill);
}

// Calls `on_name` for every {name} in `text`, `on_text` for literal runs.
template <class OnText, class OnName>
void scan_placeholders(std::string_view text, OnText on_text, OnName on_name) {
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto open = text.find('{', pos);
        const auto close = open == std::string_view::npos ? open : text.find('}', open);
        if (close == std::string_view::npos) {
            on_text(text.substr(pos));
            return;
        }
        on_text(text.substr(pos, open - pos));
        on_name(text.substr(open + 1, close - open - 1));
        pos = close + 1;
    }
}

}  // namespace

std::string_view to_string(TemplateActionKind kind) noexcept {
    switch (kind) {
        case TemplateActionKind::AddPill: return "add_pill";
        case TemplateActionKind::RemovePill: return "remove_pill";
        case TemplateActionKind::Any: return "any";
    }
    return "?";
}

std::string_view to_string(Justification justification) noexcept {
    switch (justification) {
        case Justification::MissingPill: return "missing_pill";
        case Justification::WrongTime: return "wrong_time";
        case Justification::ExtraPill: return "extra_pill";
        case Justification::None: return "none";
    }
    return "?";
}

Justification justification_of(MethodName leaf) noexcept {
    switch (leaf) {
        case MethodName::WrongTime: return Justification::WrongTime;
        case MethodName::MissingPill: return Justification::MissingPill;
        case MethodName::ExtraPill: return Justification::ExtraPill;
        case MethodName::AllSorted: break;
    }
    return Justification::None;
}

std::vector<CatalogKey> required_catalog_keys() {
    std::vector<CatalogKey> keys;
    const std::pair<ActionKind, Justification> pairs[] = {{ActionKind::AddPill, Justification::MissingPill},
                                                          {ActionKind::AddPill, Justification::WrongTime},
                                                          {ActionKind::RemovePill, Justification::WrongTime},
                                                          {ActionKind::RemovePill, Justification::ExtraPill}};
    for (const auto& [kind, justification] : pairs) {
        for (int level = 1; level <= 3; ++level) keys.push_back({kind, justification, level});
    }
    return keys;
}

const AssistiveActionTemplate* find_template(const AssistanceCatalog& catalog, ActionKind kind,
                                             Justification justification, int level) {
    for (const auto& entry : catalog.entries) {
        if (entry.level != level || !kind_matches(entry.action_kind, kind)) continue;
        if (entry.justification == justification ||
            (level == 1 && entry.justification == Justification::None)) {
            return &entry;
        }
    }
    return nullptr;
}

std::vector<CatalogKey> missing_catalog_keys(const AssistanceCatalog& catalog) {
    std::vector<CatalogKey> missing;
    for (const auto& key : required_catalog_keys()) {
        if (!find_template(catalog, key.kind, key.justification, key.level)) missing.push_back(key);
    }
    return missing;
}

json to_json(const CatalogKey& key) {
    return json{{"action_kind", to_string(key.kind)},
                {"justification", to_string(key.justification)},
                {"level", key.level}};
}

AssistanceCatalog parse_catalog(const json& doc) {
    AssistanceCatalog catalog;
    try {
        require_known_fields(doc, {"entries", "encouragements"}, "catalog");
        for (const auto& e : doc.at("entries")) {
            require_known_fields(e, {"action_kind", "justification", "level", "template", "gesture"},
                                 "catalog entry");
            AssistiveActionTemplate entry;
            entry.action_kind = parse_template_kind(e.at("action_kind").get<std::string>());
            entry.justification = parse_justification(e.at("justification").get<std::string>());
            entry.level = e.at("level").get<int>();
            entry.text = e.at("template").get<std::string>();
            if (e.contains("gesture") && !e.at("gesture").is_null()) {
                entry.gesture = e.at("gesture").get<std::string>();
            }
            if (entry.level < 1 || entry.level > 3) {
                throw Error(ErrorCode::ParseError, "catalog levels must lie in [1, 3]");
            }
            scan_placeholders(entry.text, [](std::string_view) {}, [](std::string_view name) {
                if (std::find(kPlaceholders.begin(), kPlaceholders.end(), name) == kPlaceholders.end()) {
                    throw Error(ErrorCode::ParseError, "unknown placeholder {" + std::string(name) + "}");
                }
            });
            catalog.entries.push_back(std::move(entry));
        }
        catalog.encouragements = doc.at("encouragements").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::ParseError, std::string("catalog: ") + e.what());
    }
    if (catalog.encouragements.empty()) {
        throw Error(ErrorCode::ParseError, "catalog needs at least one encouragement");
    }

    const auto missing = missing_catalog_keys(catalog);
    if (!missing.empty()) {
        json detail = json::array();
        std::string message = "catalog lacks";
        for (const auto& key : missing) {
            detail.push_back(to_json(key));
            message += " (" + std::string(to_string(key.kind)) + ", " + std::string(to_string(key.justification)) +
                       ", " + std::to_string(key.level) + ")";
        }
        throw Error(ErrorCode::CatalogGap, message, std::move(detail));
    }
    return catalog;
}

AssistanceCatalog parse_catalog_text(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, std::string("catalog JSON: ") + e.what());
    }
    return parse_catalog(doc);
}

AssistanceCatalog load_catalog_file(const std::filesystem::path& path) {
    return parse_catalog_text(detail::read_file(path));
}

std::string render(const AssistiveActionTemplate& tmpl, const JustifiedAction& step,
                   std::span<const Medication> medications) {
    const auto& action = step.action;
    auto medication = [&]() -> const Medication& {
        auto it = std::find_if(medications.begin(), medications.end(),
                               [&](const Medication& m) { return m.name == action.medication; });
        if (it == medications.end()) {
            throw Error(ErrorCode::UnresolvedPlaceholder, "no appearance known for '" + action.medication + "'");
        }
        return *it;
    };

    std::string out;
    scan_placeholders(
        tmpl.text, [&](std::string_view literal) { out += literal; },
        [&](std::string_view name) {
            if (name == "med") {
                out += action.medication;
            } else if (name == "color") {
                out += to_string(medication().color);
            } else if (name == "shape") {
                out += to_string(medication().shape);
            } else if (name == "day") {
                out += to_string(action.target.day);
            } else if (name == "slot") {
                out += to_string(action.target.slot);
            } else {
                throw Error(ErrorCode::UnresolvedPlaceholder, "unresolved placeholder {" + std::string(name) + "}");
            }
        });
    return out;
}

std::optional<SociallyAssistiveAction> select_assistance(const Plan& plan, const NeedEstimate& need,
                                                         bool progress_made, const AssistanceCatalog& catalog,
                                                         std::span<const Medication> medications,
                                                         std::size_t encouragement_counter) {
    auto encouragement = [&]() {
        return SociallyAssistiveAction{
            catalog.encouragements[encouragement_counter % catalog.encouragements.size()], 0, std::nullopt,
            std::nullopt};
    };

    if (need.level <= 0) {
        if (progress_made) return encouragement();
        return std::nullopt;
    }
    auto step = next_step(plan);
    if (!step) return encouragement();

    const Justification justification = justification_of(step->leaf_method());
    const auto* tmpl = find_template(catalog, step->action.kind, justification, need.level);
    if (!tmpl) {
        throw Error(ErrorCode::CatalogGap, "catalog has no entry for the next step at level " +
                                               std::to_string(need.level));
    }
    return SociallyAssistiveAction{render(*tmpl, *step, medications), need.level, tmpl->gesture, std::move(step)};
}

json to_json(const SociallyAssistiveAction& action) {
    json out{{"utterance", action.utterance}, {"level", action.level}};
    out["gesture"] = action.gesture ? json(*action.gesture) : json(nullptr);
    out["refers_to"] = action.refers_to ? to_json(*action.refers_to) : json(nullptr);
    return out;
}

SociallyAssistiveAction assistance_from_json(const json& j) {
    SociallyAssistiveAction action;
    action.utterance = j.at("utterance").get<std::string>();
    action.level = j.at("level").get<int>();
    if (j.contains("gesture") && !j.at("gesture").is_null()) action.gesture = j.at("gesture").get<std::string>();
    if (j.contains("refers_to") && !j.at("refers_to").is_null()) {
        action.refers_to = justified_action_from_json(j.at("refers_to"));
    }
    return action;
}

}  // namespace aide
