#pragma once
// The Hint Engine: picks the socially assistive action for the next plan
// step at the estimated level of need.
//
// Levels follow the verbal part of the PASS rubric:
//   1  supportive, non-specific prompt
//   2  non-directive hint that points at the area ("How does Tuesday look?")
//   3  directive hint naming the problem
// Level 0 is encouragement only and never carries directive content.

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "aide/htnplan.hpp"
#include "aide/meddomain.hpp"
#include "aide/needsense.hpp"

namespace aide {

enum class TemplateActionKind : std::uint8_t { AddPill, RemovePill, Any };
enum class Justification : std::uint8_t { MissingPill, WrongTime, ExtraPill, None };

std::string_view to_string(TemplateActionKind kind) noexcept;
std::string_view to_string(Justification justification) noexcept;
Justification justification_of(MethodName leaf) noexcept;

struct AssistiveActionTemplate {
    TemplateActionKind action_kind = TemplateActionKind::Any;
    Justification justification = Justification::None;
    int level = 1;
    std::string text;  // placeholders: {med} {color} {shape} {day} {slot}
    std::optional<std::string> gesture;
};

struct AssistanceCatalog {
    std::vector<AssistiveActionTemplate> entries;
    std::vector<std::string> encouragements;
};

struct CatalogKey {
    ActionKind kind = ActionKind::AddPill;
    Justification justification = Justification::MissingPill;
    int level = 1;

    bool operator==(const CatalogKey&) const = default;
};

struct SociallyAssistiveAction {
    std::string utterance;
    int level = 0;
    std::optional<std::string> gesture;
    std::optional<JustifiedAction> refers_to;

    bool operator==(const SociallyAssistiveAction&) const = default;
};

// The (kind, justification) pairs a plan can produce: add_pill comes from
// missing_pill or wrong_time, remove_pill from extra_pill or wrong_time.
std::vector<CatalogKey> required_catalog_keys();
std::vector<CatalogKey> missing_catalog_keys(const AssistanceCatalog& catalog);

// First entry in catalog order whose level and kind match; the justification
// must match exactly at levels 2-3 and may fall back to `none` at level 1.
const AssistiveActionTemplate* find_template(const AssistanceCatalog& catalog, ActionKind kind,
                                             Justification justification, int level);

AssistanceCatalog parse_catalog(const nlohmann::json& doc);
AssistanceCatalog parse_catalog_text(std::string_view text);
AssistanceCatalog load_catalog_file(const std::filesystem::path& path);

std::string render(const AssistiveActionTemplate& tmpl, const JustifiedAction& step,
                   std::span<const Medication> medications);

std::optional<SociallyAssistiveAction> select_assistance(const Plan& plan, const NeedEstimate& need,
                                                         bool progress_made, const AssistanceCatalog& catalog,
                                                         std::span<const Medication> medications,
                                                         std::size_t encouragement_counter);

nlohmann::json to_json(const SociallyAssistiveAction& action);
SociallyAssistiveAction assistance_from_json(const nlohmann::json& j);
nlohmann::json to_json(const CatalogKey& key);

}  // namespace aide
