#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "kite/commands.hpp"
#include "kite/error.hpp"

namespace kite {

struct TokenLedger {
  std::vector<std::uint64_t> balances;  // L_T
  std::vector<std::uint8_t> locks;      // lock map

  std::uint64_t total() const;
};

enum class ElectionPhase : std::uint8_t { Created, Started, Tallied };

std::string_view to_string(ElectionPhase phase);

struct ElectionState {
  ElectionId eid = 0;
  std::string desc;
  std::vector<Ciphertext> tallies;  // E^eid
  std::vector<std::uint8_t> voted;  // vote map
  std::optional<Digest> snapshot_root;
  std::vector<Ciphertext> snapshot_powers;  // L_d^eid
  PartyIndex creator = 0;
  ElectionPhase phase = ElectionPhase::Created;
  std::optional<std::vector<std::uint32_t>> result;  // basis points
  bool no_votes = false;
};

struct BoardState {
  bool initialized = false;
  SystemParams params;
  Point pk_enc;
  VerifyKey vk_sig;
  TokenLedger ledger;
  Digest token_root;
  Signature root_sig;
  bool root_stale = false;
  std::vector<Ciphertext> delegate_powers;             // L_d
  std::vector<std::optional<Digest>> delegation_ids;   // L_did
  std::vector<std::uint8_t> active;                    // dactive
  std::map<ElectionId, ElectionState> elections;

  std::size_t party_count() const { return ledger.balances.size(); }
  bool has_party(PartyIndex p) const { return p < party_count(); }
  const ElectionState* find_election(ElectionId eid) const;

  // Canonical encoding of everything except the event log.
  Bytes serialize() const;
};

// hash("state", serialize(state)).
Digest state_hash(const BoardState& state);

enum class EventKind : std::uint8_t {
  Setup,
  Registered,
  Unregistered,
  Delegated,
  Undelegated,
  ElectionCreated,
  ElectionStarted,
  Voted,
  Tallied,
  TransferLocked,
  Transferred,
  RootRefreshed,
  Rejected,
};

std::string_view to_string(EventKind kind);
EventKind event_kind_from_string(std::string_view name);

struct Event {
  std::uint64_t seq = 0;
  EventKind kind = EventKind::Rejected;
  nlohmann::json payload;

  bool operator==(const Event&) const = default;
};

struct Outcome {
  Event event;
  ErrorCode error = ErrorCode::Ok;

  bool ok() const { return error == ErrorCode::Ok; }
};

// Anything commands can be submitted to: the in-process board, or a remote
// node over HTTP.
class BoardPort {
 public:
  virtual ~BoardPort() = default;
  virtual Outcome submit(const Command& cmd) = 0;
  virtual BoardState snapshot() const = 0;
};

// The bulletin-board state machine. Guards are checked before any mutation,
// so a rejected command leaves the state untouched; every command, accepted
// or not, appends exactly one event.
class Board final : public BoardPort {
 public:
  Outcome apply(const Command& cmd);

  Outcome submit(const Command& cmd) override { return apply(cmd); }
  BoardState snapshot() const override { return state_; }

  const BoardState& state() const { return state_; }
  const std::vector<Event>& events() const { return events_; }
  // Input commands in arrival order, accepted or not.
  const std::vector<Command>& history() const { return history_; }
  Digest hash() const { return state_hash(state_); }

  static Board replay(std::span<const Command> commands);

  // Fault injection for differential tests.
  BoardState& mutable_state_for_testing() { return state_; }

  Outcome c_setup(const SetupCmd& cmd) { return apply(cmd); }
  Outcome c_register(PartyIndex p) { return apply(RegisterCmd{p}); }
  Outcome c_unregister(PartyIndex p) { return apply(UnregisterCmd{p}); }
  Outcome c_delegate(const DelegateCmd& cmd) { return apply(cmd); }
  Outcome c_undelegate(const UndelegateCmd& cmd) { return apply(cmd); }
  Outcome c_election_setup(PartyIndex p, ElectionId eid, std::string desc) {
    return apply(ElectionSetupCmd{p, eid, std::move(desc)});
  }
  Outcome c_election_start(PartyIndex p, ElectionId eid) { return apply(ElectionStartCmd{p, eid}); }
  Outcome c_vote_public(const VotePublicCmd& cmd) { return apply(cmd); }
  Outcome c_vote_private(const VotePrivateCmd& cmd) { return apply(cmd); }
  Outcome c_tally(const TallyCmd& cmd) { return apply(cmd); }
  Outcome token_transfer(PartyIndex from, PartyIndex to, std::uint64_t amount) {
    return apply(TransferCmd{from, to, amount});
  }
  Outcome c_refresh_root(const RefreshRootCmd& cmd) { return apply(cmd); }

 private:
  struct Success {
    EventKind kind;
    nlohmann::json payload;
  };

  Success run(const SetupCmd& cmd);
  Success run(const RegisterCmd& cmd);
  Success run(const UnregisterCmd& cmd);
  Success run(const DelegateCmd& cmd);
  Success run(const UndelegateCmd& cmd);
  Success run(const ElectionSetupCmd& cmd);
  Success run(const ElectionStartCmd& cmd);
  Success run(const VotePublicCmd& cmd);
  Success run(const VotePrivateCmd& cmd);
  Success run(const TallyCmd& cmd);
  Success run(const TransferCmd& cmd);
  Success run(const RefreshRootCmd& cmd);

  void require_initialized() const;
  void require_party(PartyIndex p) const;
  ElectionState& election_for_vote(ElectionId eid, PartyIndex p);

  BoardState state_;
  std::vector<Event> events_;
  std::vector<Command> history_;
};

// Invariant: no party is unlocked and active at once, and a stored
// delegation identifier implies locked and inactive.
bool lock_invariant_holds(const BoardState& state);

}  // namespace kite
