#pragma once
// Honest voter and delegate logic. One Voter per party; it keeps the only
// copy of its delegation secret (target position and encryption
// randomness), which never leaves the client.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "kite/board.hpp"

namespace kite {

enum class Role : std::uint8_t { Voter, Delegate };
std::string_view to_string(Role role);

struct StoredDelegation {
  std::vector<PartyIndex> anon_set;
  std::vector<Ciphertext> ct_vec;
  std::vector<Scalar> r_vec;
  std::uint32_t target_pos = 0;

  bool operator==(const StoredDelegation&) const = default;
  void encode(ByteWriter& w) const;
  static StoredDelegation decode(ByteReader& r);
};

// Persisted as JSON: {"party", "tokens", "role", "delegation"} where
// delegation is null or the hex of StoredDelegation's canonical bytes
// (anonSet as u32 list, ctVec, rVec, u32 targetPos).
struct VoterState {
  PartyIndex party = 0;
  std::uint64_t tokens = 0;
  Role role = Role::Voter;
  std::optional<StoredDelegation> delegation;

  bool operator==(const VoterState&) const = default;
};

void to_json(nlohmann::json& j, const VoterState& s);
void from_json(const nlohmann::json& j, VoterState& s);

// Throws Error(UnknownParty).
VoterState voter_setup(std::span<const std::uint64_t> tokens, PartyIndex party);

struct ClientConfig {
  // Accepted anonymity-set sizes; empty accepts any size.
  std::vector<std::size_t> set_sizes{5, 10, 20};
};

struct DelegationBundle {
  DelegateCmd cmd;
  StoredDelegation secret;
};

// Currently active parties other than `self`, in index order.
std::vector<PartyIndex> active_delegates(const BoardState& view, PartyIndex self);

class Voter {
 public:
  explicit Voter(VoterState state, ClientConfig config = {});

  const VoterState& state() const { return state_; }
  PartyIndex party() const { return state_.party; }

  // Samples set_size - 1 members of pool without replacement and inserts the
  // target at a uniform position. Errors: ZeroPower, AlreadyDelegated,
  // TargetNotInPool, PoolTooSmall, BadAnonymitySet (unsupported size),
  // StaleRoot.
  DelegationBundle build_delegation(const BoardState& view, PartyIndex target, std::size_t set_size,
                                    std::span<const PartyIndex> pool, RandomSource& rng) const;
  void confirm_delegation(const DelegationBundle& bundle);

  // Throws Error(NothingToUndelegate).
  UndelegateCmd build_undelegation() const;
  void confirm_undelegation() { state_.delegation.reset(); }

  // Throws Error(BadOption) before anything is built.
  VotePublicCmd build_public_vote(const BoardState& view, ElectionId eid, std::uint32_t option) const;
  VotePrivateCmd build_private_vote(const BoardState& view, ElectionId eid, std::uint32_t option,
                                    RandomSource& rng) const;

  // Board-invoking wrappers. Local state changes only on acceptance.
  Outcome register_delegate(BoardPort& board);
  Outcome unregister_delegate(BoardPort& board);
  Outcome delegate(BoardPort& board, PartyIndex target, std::size_t set_size, RandomSource& rng);
  Outcome undelegate(BoardPort& board);
  Outcome vote_public(BoardPort& board, ElectionId eid, std::uint32_t option);
  Outcome vote_private(BoardPort& board, ElectionId eid, std::uint32_t option, RandomSource& rng);
  Outcome create_election(BoardPort& board, ElectionId eid, std::string desc);
  // Returns the snapshot power list when the start is accepted.
  std::pair<Outcome, std::vector<Ciphertext>> start_election(BoardPort& board, ElectionId eid);

  // Pulls the token balance from the board (it changes only via transfers,
  // which require the party to be unlocked).
  void sync(const BoardState& view);

  void save(const std::filesystem::path& file) const;
  static Voter load(const std::filesystem::path& file, ClientConfig config = {});

 private:
  const ElectionState& started_election(const BoardState& view, ElectionId eid) const;

  VoterState state_;
  ClientConfig config_;
};

}  // namespace kite
