#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kite {

// Every typed failure the library can report. Board rejections, client-side
// aborts and decoding failures all share this one enumeration so that the
// node API and the CLI can pass them through verbatim.
enum class ErrorCode {
  Ok = 0,
  // crypto-core
  MessageOutOfRange,
  DlogNotFound,
  UnknownDomainTag,
  InvalidEncoding,
  // merkle
  EmptyTree,
  IndexOutOfRange,
  // nizk
  WitnessMismatch,
  // board
  NotInitialized,
  AlreadyInitialized,
  BadSignature,
  BadRoot,
  UnknownParty,
  AlreadyRegistered,
  NotRegistered,
  LockedTokens,
  NotLocked,
  InvalidProof,
  StaleRoot,
  ZeroPower,
  BadAnonymitySet,
  NoSuchDelegation,
  DuplicateElection,
  UnknownElection,
  NotCreator,
  WrongPhase,
  ElectionNotStarted,
  NotActive,
  AlreadyVoted,
  BadSnapshotProof,
  BadOption,
  InvalidDecryptionProof,
  TokensLocked,
  InsufficientBalance,
  // authority
  TokenOutOfBound,
  InconsistentEvents,
  // client
  PoolTooSmall,
  AlreadyDelegated,
  NothingToUndelegate,
  TargetNotInPool,
  // node / io
  CorruptLog,
  MalformedRequest,
  NotFound,
  Unavailable,
  PortInUse,
};

std::string_view to_string(ErrorCode code);
ErrorCode error_code_from_string(std::string_view name);

class Error : public std::runtime_error {
 public:
  explicit Error(ErrorCode code);
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace kite
