#include "kite/error.hpp"

#include <utility>

namespace kite {
namespace {

constexpr std::pair<ErrorCode, std::string_view> kNames[] = {
    {ErrorCode::Ok, "Ok"},
    {ErrorCode::MessageOutOfRange, "MessageOutOfRange"},
    {ErrorCode::DlogNotFound, "DlogNotFound"},
    {ErrorCode::UnknownDomainTag, "UnknownDomainTag"},
    {ErrorCode::InvalidEncoding, "InvalidEncoding"},
    {ErrorCode::EmptyTree, "EmptyTree"},
    {ErrorCode::IndexOutOfRange, "IndexOutOfRange"},
    {ErrorCode::WitnessMismatch, "WitnessMismatch"},
    {ErrorCode::NotInitialized, "NotInitialized"},
    {ErrorCode::AlreadyInitialized, "AlreadyInitialized"},
    {ErrorCode::BadSignature, "BadSignature"},
    {ErrorCode::BadRoot, "BadRoot"},
    {ErrorCode::UnknownParty, "UnknownParty"},
    {ErrorCode::AlreadyRegistered, "AlreadyRegistered"},
    {ErrorCode::NotRegistered, "NotRegistered"},
    {ErrorCode::LockedTokens, "LockedTokens"},
    {ErrorCode::NotLocked, "NotLocked"},
    {ErrorCode::InvalidProof, "InvalidProof"},
    {ErrorCode::StaleRoot, "StaleRoot"},
    {ErrorCode::ZeroPower, "ZeroPower"},
    {ErrorCode::BadAnonymitySet, "BadAnonymitySet"},
    {ErrorCode::NoSuchDelegation, "NoSuchDelegation"},
    {ErrorCode::DuplicateElection, "DuplicateElection"},
    {ErrorCode::UnknownElection, "UnknownElection"},
    {ErrorCode::NotCreator, "NotCreator"},
    {ErrorCode::WrongPhase, "WrongPhase"},
    {ErrorCode::ElectionNotStarted, "ElectionNotStarted"},
    {ErrorCode::NotActive, "NotActive"},
    {ErrorCode::AlreadyVoted, "AlreadyVoted"},
    {ErrorCode::BadSnapshotProof, "BadSnapshotProof"},
    {ErrorCode::BadOption, "BadOption"},
    {ErrorCode::InvalidDecryptionProof, "InvalidDecryptionProof"},
    {ErrorCode::TokensLocked, "TokensLocked"},
    {ErrorCode::InsufficientBalance, "InsufficientBalance"},
    {ErrorCode::TokenOutOfBound, "TokenOutOfBound"},
    {ErrorCode::InconsistentEvents, "InconsistentEvents"},
    {ErrorCode::PoolTooSmall, "PoolTooSmall"},
    {ErrorCode::AlreadyDelegated, "AlreadyDelegated"},
    {ErrorCode::NothingToUndelegate, "NothingToUndelegate"},
    {ErrorCode::TargetNotInPool, "TargetNotInPool"},
    {ErrorCode::CorruptLog, "CorruptLog"},
    {ErrorCode::MalformedRequest, "MalformedRequest"},
    {ErrorCode::NotFound, "NotFound"},
    {ErrorCode::Unavailable, "Unavailable"},
    {ErrorCode::PortInUse, "PortInUse"},
};

}  // namespace

std::string_view to_string(ErrorCode code) {
  for (const auto& [c, name] : kNames) {
    if (c == code) return name;
  }
  return "Unknown";
}

ErrorCode error_code_from_string(std::string_view name) {
  for (const auto& [c, n] : kNames) {
    if (n == name) return c;
  }
  throw Error(ErrorCode::MalformedRequest, "unknown error code " + std::string(name));
}

Error::Error(ErrorCode code) : std::runtime_error(std::string(to_string(code))), code_(code) {}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

}  // namespace kite
