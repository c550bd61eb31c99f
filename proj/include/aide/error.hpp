#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

namespace aide {

enum class ErrorCode {
    InvalidArgument,
    ParseError,
    ScenarioInvalid,
    UnknownMedication,
    EventWithoutBaseDose,
    RemoveFromEmptyCell,
    InconsistentScenario,
    UnorderedStream,
    UnknownLabel,
    EmptyCorpus,
    UnknownLabelInCorpus,
    UntrainedModel,
    UnresolvedPlaceholder,
    CatalogGap,
    InfeasibleObservation,
    UnknownRobotGoal,
    OutOfOrderEvent,
    SessionClosed,
    UnknownSession,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure the engine reports carries a machine-readable code; `detail`
// holds structured context (e.g. the missing catalog triples).
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, nlohmann::json detail = nullptr)
        : std::runtime_error(message), code_(code), detail_(std::move(detail)) {}

    ErrorCode code() const noexcept { return code_; }
    const nlohmann::json& detail() const noexcept { return detail_; }

private:
    ErrorCode code_;
    nlohmann::json detail_;
};

}  // namespace aide
