#include "farm/errors.hpp"

namespace farm {

std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::InvalidScenario: return "InvalidScenario";
    case Errc::MissingField: return "MissingField";
    case Errc::EmptyField: return "EmptyField";
    case Errc::BadLabel: return "BadLabel";
    case Errc::Transport: return "Transport";
    case Errc::RateLimited: return "RateLimited";
    case Errc::ContextOverflow: return "ContextOverflow";
    case Errc::BackendRefusal: return "BackendRefusal";
    case Errc::EmptySequence: return "EmptySequence";
    case Errc::StoreUnavailable: return "StoreUnavailable";
    case Errc::EmptyBank: return "EmptyBank";
    case Errc::EmptyGeneration: return "EmptyGeneration";
    case Errc::RetryExhausted: return "RetryExhausted";
    case Errc::MalformedResponse: return "MalformedResponse";
    case Errc::InvalidN: return "InvalidN";
    case Errc::ParseFailure: return "ParseFailure";
    case Errc::EmptyDistribution: return "EmptyDistribution";
    case Errc::NonPositiveCount: return "NonPositiveCount";
    case Errc::JoinFailure: return "JoinFailure";
    case Errc::ParseError: return "ParseError";
    case Errc::DuplicateId: return "DuplicateId";
    case Errc::Config: return "Config";
  }
  return "Unknown";
}

}  // namespace farm
