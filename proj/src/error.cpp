#include "aide/error.hpp"

namespace aide {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::ScenarioInvalid: return "ScenarioInvalid";
        case ErrorCode::UnknownMedication: return "UnknownMedication";
        case ErrorCode::EventWithoutBaseDose: return "EventWithoutBaseDose";
        case ErrorCode::RemoveFromEmptyCell: return "RemoveFromEmptyCell";
        case ErrorCode::InconsistentScenario: return "InconsistentScenario";
        case ErrorCode::UnorderedStream: return "UnorderedStream";
        case ErrorCode::UnknownLabel: return "UnknownLabel";
        case ErrorCode::EmptyCorpus: return "EmptyCorpus";
        case ErrorCode::UnknownLabelInCorpus: return "UnknownLabelInCorpus";
        case ErrorCode::UntrainedModel: return "UntrainedModel";
        case ErrorCode::UnresolvedPlaceholder: return "UnresolvedPlaceholder";
        case ErrorCode::CatalogGap: return "CatalogGap";
        case ErrorCode::InfeasibleObservation: return "InfeasibleObservation";
        case ErrorCode::UnknownRobotGoal: return "UnknownRobotGoal";
        case ErrorCode::OutOfOrderEvent: return "OutOfOrderEvent";
        case ErrorCode::SessionClosed: return "SessionClosed";
        case ErrorCode::UnknownSession: return "UnknownSession";
    }
    return "Unknown";
}

}  // namespace aide
