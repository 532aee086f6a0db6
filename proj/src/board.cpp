#include "kite/board.hpp"

#include <numeric>
#include <set>

#include "kite/json_codec.hpp"
#include "kite/percent.hpp"

namespace kite {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void encode_bits(ByteWriter& w, const std::vector<std::uint8_t>& bits) {
  w.u32(static_cast<std::uint32_t>(bits.size()));
  for (auto b : bits) w.u8(b);
}

void encode_u64s(ByteWriter& w, const std::vector<std::uint64_t>& v) {
  w.u32(static_cast<std::uint32_t>(v.size()));
  for (auto x : v) w.u64(x);
}

}  // namespace

std::string_view command_name(const Command& cmd) {
  return std::visit(Overloaded{
                        [](const SetupCmd&) { return std::string_view("setup"); },
                        [](const RegisterCmd&) { return std::string_view("register"); },
                        [](const UnregisterCmd&) { return std::string_view("unregister"); },
                        [](const DelegateCmd&) { return std::string_view("delegate"); },
                        [](const UndelegateCmd&) { return std::string_view("undelegate"); },
                        [](const ElectionSetupCmd&) { return std::string_view("election_setup"); },
                        [](const ElectionStartCmd&) { return std::string_view("election_start"); },
                        [](const VotePublicCmd&) { return std::string_view("vote_public"); },
                        [](const VotePrivateCmd&) { return std::string_view("vote_private"); },
                        [](const TallyCmd&) { return std::string_view("tally"); },
                        [](const TransferCmd&) { return std::string_view("transfer"); },
                        [](const RefreshRootCmd&) { return std::string_view("refresh_root"); },
                    },
                    cmd);
}

Digest delegation_id(const std::vector<PartyIndex>& anon_set, const std::vector<Ciphertext>& ct_vec) {
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(anon_set.size()));
  for (auto p : anon_set) w.u32(p);
  w.items(ct_vec);
  return hash(DomainTag::DelegationId, w.bytes());
}

std::uint64_t TokenLedger::total() const {
  return std::accumulate(balances.begin(), balances.end(), std::uint64_t{0});
}

std::string_view to_string(ElectionPhase phase) {
  switch (phase) {
    case ElectionPhase::Created: return "Created";
    case ElectionPhase::Started: return "Started";
    case ElectionPhase::Tallied: return "Tallied";
  }
  return "";
}

const ElectionState* BoardState::find_election(ElectionId eid) const {
  auto it = elections.find(eid);
  return it == elections.end() ? nullptr : &it->second;
}

Bytes BoardState::serialize() const {
  ByteWriter w;
  w.u8(initialized ? 1 : 0);
  if (!initialized) return std::move(w).bytes();
  params.encode(w);
  pk_enc.encode(w);
  vk_sig.encode(w);
  encode_u64s(w, ledger.balances);
  encode_bits(w, ledger.locks);
  token_root.encode(w);
  root_sig.encode(w);
  w.u8(root_stale ? 1 : 0);
  w.items(delegate_powers);
  w.u32(static_cast<std::uint32_t>(delegation_ids.size()));
  for (const auto& id : delegation_ids) {
    w.u8(id ? 1 : 0);
    if (id) id->encode(w);
  }
  encode_bits(w, active);
  w.u32(static_cast<std::uint32_t>(elections.size()));
  for (const auto& [eid, e] : elections) {
    w.u64(eid);
    w.str(e.desc);
    w.items(e.tallies);
    encode_bits(w, e.voted);
    w.u8(e.snapshot_root ? 1 : 0);
    if (e.snapshot_root) e.snapshot_root->encode(w);
    w.items(e.snapshot_powers);
    w.u32(e.creator);
    w.u8(static_cast<std::uint8_t>(e.phase));
    w.u8(e.result ? 1 : 0);
    if (e.result) {
      w.u32(static_cast<std::uint32_t>(e.result->size()));
      for (auto bp : *e.result) w.u32(bp);
    }
    w.u8(e.no_votes ? 1 : 0);
  }
  return std::move(w).bytes();
}

Digest state_hash(const BoardState& state) { return hash(DomainTag::State, state.serialize()); }

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::Setup: return "Setup";
    case EventKind::Registered: return "Registered";
    case EventKind::Unregistered: return "Unregistered";
    case EventKind::Delegated: return "Delegated";
    case EventKind::Undelegated: return "Undelegated";
    case EventKind::ElectionCreated: return "ElectionCreated";
    case EventKind::ElectionStarted: return "ElectionStarted";
    case EventKind::Voted: return "Voted";
    case EventKind::Tallied: return "Tallied";
    case EventKind::TransferLocked: return "TransferLocked";
    case EventKind::Transferred: return "Transferred";
    case EventKind::RootRefreshed: return "RootRefreshed";
    case EventKind::Rejected: return "Rejected";
  }
  return "";
}

EventKind event_kind_from_string(std::string_view name) {
  for (int k = 0; k <= static_cast<int>(EventKind::Rejected); ++k) {
    if (to_string(static_cast<EventKind>(k)) == name) return static_cast<EventKind>(k);
  }
  throw Error(ErrorCode::MalformedRequest, "unknown event kind " + std::string(name));
}

bool lock_invariant_holds(const BoardState& s) {
  for (std::size_t p = 0; p < s.party_count(); ++p) {
    if (!s.ledger.locks[p] && s.active[p]) return false;
    if (s.delegation_ids[p] && (!s.ledger.locks[p] || s.active[p])) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

Outcome Board::apply(const Command& cmd) {
  history_.push_back(cmd);
  Outcome out;
  out.event.seq = events_.size();
  try {
    Success s = std::visit([this](const auto& c) { return run(c); }, cmd);
    out.event.kind = s.kind;
    out.event.payload = std::move(s.payload);
  } catch (const Error& err) {
    out.error = err.code();
    const bool transfer_locked =
        std::holds_alternative<TransferCmd>(cmd) && err.code() == ErrorCode::TokensLocked;
    out.event.kind = transfer_locked ? EventKind::TransferLocked : EventKind::Rejected;
    out.event.payload = {{"command", command_name(cmd)}, {"reason", to_string(err.code())}};
    if (transfer_locked) {
      const auto& t = std::get<TransferCmd>(cmd);
      out.event.payload["from"] = t.from;
      out.event.payload["to"] = t.to;
      out.event.payload["amount"] = t.amount;
    }
  }
  events_.push_back(out.event);
  return out;
}

Board Board::replay(std::span<const Command> commands) {
  Board b;
  for (const auto& c : commands) b.apply(c);
  return b;
}

void Board::require_initialized() const {
  if (!state_.initialized) throw Error(ErrorCode::NotInitialized);
}

void Board::require_party(PartyIndex p) const {
  require_initialized();
  if (!state_.has_party(p)) throw Error(ErrorCode::UnknownParty, std::to_string(p));
}

Board::Success Board::run(const SetupCmd& cmd) {
  if (state_.initialized) throw Error(ErrorCode::AlreadyInitialized);
  if (cmd.tokens.empty()) throw Error(ErrorCode::MalformedRequest, "empty token list");
  SystemParams params;
  params.num_options = cmd.num_options;
  params.max_total = std::accumulate(cmd.tokens.begin(), cmd.tokens.end(), std::uint64_t{0});
  if (params.max_total < 1 || params.num_options < 2) throw Error(ErrorCode::MalformedRequest, "params");
  if (!(token_tree(cmd.tokens).root() == cmd.token_root)) throw Error(ErrorCode::BadRoot);
  if (!sig_verify(cmd.vk_sig, cmd.token_root.bytes, cmd.root_sig)) throw Error(ErrorCode::BadSignature);

  const std::size_t n = cmd.tokens.size();
  BoardState s;
  s.initialized = true;
  s.params = params;
  s.pk_enc = cmd.pk_enc;
  s.vk_sig = cmd.vk_sig;
  s.ledger.balances = cmd.tokens;
  s.ledger.locks.assign(n, 0);
  s.token_root = cmd.token_root;
  s.root_sig = cmd.root_sig;
  s.delegate_powers.assign(n, zero_ciphertext());
  s.delegation_ids.assign(n, std::nullopt);
  s.active.assign(n, 0);
  state_ = std::move(s);

  return {EventKind::Setup,
          {{"tokens", state_.ledger.balances},
           {"tokenRoot", state_.token_root},
           {"pkEnc", state_.pk_enc},
           {"vkSig", state_.vk_sig},
           {"maxTotal", state_.params.max_total},
           {"numOptions", state_.params.num_options},
           {"elections", json::array()},
           {"delegatePowers", state_.delegate_powers},
           {"delegationIds", json::array()},
           {"locks", state_.ledger.locks},
           {"active", state_.active}}};
}

Board::Success Board::run(const RegisterCmd& cmd) {
  require_party(cmd.party);
  const PartyIndex p = cmd.party;
  if (state_.active[p]) throw Error(ErrorCode::AlreadyRegistered);
  if (state_.ledger.locks[p]) throw Error(ErrorCode::LockedTokens);
  state_.ledger.locks[p] = 1;
  state_.active[p] = 1;
  state_.delegate_powers[p] =
      encrypt(state_.pk_enc, static_cast<std::int64_t>(state_.ledger.balances[p]), Scalar::zero(),
              state_.params.max_total);
  return {EventKind::Registered, {{"party", p}, {"lock", 1}, {"active", 1}, {"power", state_.delegate_powers[p]}}};
}

Board::Success Board::run(const UnregisterCmd& cmd) {
  require_party(cmd.party);
  const PartyIndex p = cmd.party;
  if (!(state_.active[p] && state_.ledger.locks[p])) throw Error(ErrorCode::NotRegistered);
  state_.ledger.locks[p] = 0;
  state_.active[p] = 0;
  const Ciphertext e = encrypt(state_.pk_enc, -static_cast<std::int64_t>(state_.ledger.balances[p]),
                               Scalar::zero(), state_.params.max_total);
  state_.delegate_powers[p] = ct_add(state_.delegate_powers[p], e);
  return {EventKind::Unregistered,
          {{"party", p}, {"lock", 0}, {"active", 0}, {"power", state_.delegate_powers[p]}}};
}

namespace {

void check_anon_set(const BoardState& s, const std::vector<PartyIndex>& anon_set,
                    const std::vector<Ciphertext>& ct_vec) {
  if (anon_set.empty() || anon_set.size() != ct_vec.size()) throw Error(ErrorCode::BadAnonymitySet, "size");
  std::set<PartyIndex> seen;
  for (auto q : anon_set) {
    if (!s.has_party(q)) throw Error(ErrorCode::BadAnonymitySet, "unknown member");
    if (!seen.insert(q).second) throw Error(ErrorCode::BadAnonymitySet, "duplicate member");
  }
}

json powers_at(const BoardState& s, const std::vector<PartyIndex>& anon_set) {
  json out = json::array();
  for (auto q : anon_set) out.push_back(s.delegate_powers[q]);
  return out;
}

}  // namespace

Board::Success Board::run(const DelegateCmd& cmd) {
  require_party(cmd.party);
  const PartyIndex p = cmd.party;
  if (state_.ledger.locks[p]) throw Error(ErrorCode::LockedTokens);
  if (state_.root_stale) throw Error(ErrorCode::StaleRoot);
  check_anon_set(state_, cmd.anon_set, cmd.ct_vec);
  if (cmd.tokens == 0) throw Error(ErrorCode::ZeroPower);

  nizk::DelegationStatement st{state_.pk_enc, cmd.anon_set, cmd.ct_vec, cmd.tokens,
                               state_.token_root, cmd.token_proof, p};
  if (!nizk::verify_delegation(st, cmd.proof)) throw Error(ErrorCode::InvalidProof);

  state_.ledger.locks[p] = 1;
  for (std::size_t k = 0; k < cmd.anon_set.size(); ++k) {
    auto& slot = state_.delegate_powers[cmd.anon_set[k]];
    slot = ct_add(slot, cmd.ct_vec[k]);
  }
  const Digest did = delegation_id(cmd.anon_set, cmd.ct_vec);
  state_.delegation_ids[p] = did;
  return {EventKind::Delegated,
          {{"party", p},
           {"lock", 1},
           {"anonSet", cmd.anon_set},
           {"powers", powers_at(state_, cmd.anon_set)},
           {"delegationId", did}}};
}

Board::Success Board::run(const UndelegateCmd& cmd) {
  require_party(cmd.party);
  const PartyIndex p = cmd.party;
  if (!state_.ledger.locks[p]) throw Error(ErrorCode::NotLocked);
  const auto& stored = state_.delegation_ids[p];
  if (!stored || !(*stored == delegation_id(cmd.anon_set, cmd.ct_vec))) throw Error(ErrorCode::NoSuchDelegation);
  check_anon_set(state_, cmd.anon_set, cmd.ct_vec);

  state_.ledger.locks[p] = 0;
  for (std::size_t k = 0; k < cmd.anon_set.size(); ++k) {
    auto& slot = state_.delegate_powers[cmd.anon_set[k]];
    slot = ct_sub(slot, cmd.ct_vec[k]);
  }
  state_.delegation_ids[p].reset();
  return {EventKind::Undelegated,
          {{"party", p},
           {"lock", 0},
           {"anonSet", cmd.anon_set},
           {"powers", powers_at(state_, cmd.anon_set)},
           {"delegationId", nullptr}}};
}

Board::Success Board::run(const ElectionSetupCmd& cmd) {
  require_party(cmd.party);
  if (state_.elections.contains(cmd.eid)) throw Error(ErrorCode::DuplicateElection);
  ElectionState e;
  e.eid = cmd.eid;
  e.desc = cmd.desc;
  e.tallies.assign(state_.params.num_options, zero_ciphertext());
  e.voted.assign(state_.party_count(), 0);
  e.creator = cmd.party;
  json tallies = e.tallies;
  state_.elections.emplace(cmd.eid, std::move(e));
  return {EventKind::ElectionCreated,
          {{"eid", cmd.eid}, {"desc", cmd.desc}, {"creator", cmd.party}, {"tallies", tallies}}};
}

Board::Success Board::run(const ElectionStartCmd& cmd) {
  require_party(cmd.party);
  auto it = state_.elections.find(cmd.eid);
  if (it == state_.elections.end()) throw Error(ErrorCode::UnknownElection);
  auto& e = it->second;
  if (e.creator != cmd.party) throw Error(ErrorCode::NotCreator);
  if (e.phase != ElectionPhase::Created) throw Error(ErrorCode::WrongPhase);
  e.snapshot_powers = state_.delegate_powers;
  e.snapshot_root = power_tree(e.snapshot_powers).root();
  e.phase = ElectionPhase::Started;
  return {EventKind::ElectionStarted, {{"eid", cmd.eid}, {"party", cmd.party}, {"snapshotRoot", *e.snapshot_root}}};
}

ElectionState& Board::election_for_vote(ElectionId eid, PartyIndex p) {
  require_party(p);
  auto it = state_.elections.find(eid);
  if (it == state_.elections.end()) throw Error(ErrorCode::UnknownElection);
  auto& e = it->second;
  if (e.phase == ElectionPhase::Created || !e.snapshot_root) throw Error(ErrorCode::ElectionNotStarted);
  if (e.phase != ElectionPhase::Started) throw Error(ErrorCode::WrongPhase);
  if (!state_.active[p]) throw Error(ErrorCode::NotActive);
  if (e.voted[p]) throw Error(ErrorCode::AlreadyVoted);
  return e;
}

Board::Success Board::run(const VotePublicCmd& cmd) {
  auto& e = election_for_vote(cmd.eid, cmd.party);
  if (cmd.option >= state_.params.num_options) throw Error(ErrorCode::BadOption);
  if (!mt_verify(power_leaf(cmd.party, cmd.power), cmd.party, cmd.snapshot_proof, *e.snapshot_root)) {
    throw Error(ErrorCode::BadSnapshotProof);
  }
  e.voted[cmd.party] = 1;
  e.tallies[cmd.option] = ct_add(e.tallies[cmd.option], cmd.power);
  return {EventKind::Voted,
          {{"eid", cmd.eid},
           {"party", cmd.party},
           {"mode", "public"},
           {"option", cmd.option},
           {"tally", e.tallies[cmd.option]}}};
}

Board::Success Board::run(const VotePrivateCmd& cmd) {
  auto& e = election_for_vote(cmd.eid, cmd.party);
  if (cmd.vote_vec.size() != state_.params.num_options) throw Error(ErrorCode::BadOption, "vote vector length");
  if (!mt_verify(power_leaf(cmd.party, cmd.power), cmd.party, cmd.snapshot_proof, *e.snapshot_root)) {
    throw Error(ErrorCode::BadSnapshotProof);
  }
  nizk::VoteStatement st{state_.pk_enc, cmd.power, cmd.vote_vec, cmd.party, *e.snapshot_root, cmd.snapshot_proof,
                         cmd.eid};
  if (!nizk::verify_vote(st, cmd.proof)) throw Error(ErrorCode::InvalidProof);
  e.voted[cmd.party] = 1;
  for (std::size_t j = 0; j < e.tallies.size(); ++j) e.tallies[j] = ct_add(e.tallies[j], cmd.vote_vec[j]);
  return {EventKind::Voted, {{"eid", cmd.eid}, {"party", cmd.party}, {"mode", "private"}, {"tallies", e.tallies}}};
}

Board::Success Board::run(const TallyCmd& cmd) {
  require_initialized();
  auto it = state_.elections.find(cmd.eid);
  if (it == state_.elections.end()) throw Error(ErrorCode::UnknownElection);
  auto& e = it->second;
  if (e.phase != ElectionPhase::Started) throw Error(ErrorCode::WrongPhase);
  const std::size_t n = state_.params.num_options;
  if (cmd.counts.size() != n || cmd.percentages.size() != n) throw Error(ErrorCode::InvalidDecryptionProof, "shape");
  for (auto c : cmd.counts) {
    if (c < 0) throw Error(ErrorCode::InvalidDecryptionProof, "negative count");
  }
  nizk::DecryptionStatement st{state_.pk_enc, e.tallies, cmd.counts};
  if (!nizk::verify_decryption(st, cmd.proof)) throw Error(ErrorCode::InvalidDecryptionProof);
  const Percentages pct = basis_points(cmd.counts);
  if (pct.basis_points != cmd.percentages) throw Error(ErrorCode::InvalidDecryptionProof, "percentages");
  e.result = pct.basis_points;
  e.no_votes = pct.no_votes;
  e.phase = ElectionPhase::Tallied;
  return {EventKind::Tallied, {{"eid", cmd.eid}, {"percentages", pct.basis_points}, {"noVotes", pct.no_votes}}};
}

Board::Success Board::run(const TransferCmd& cmd) {
  require_party(cmd.from);
  require_party(cmd.to);
  if (cmd.from == cmd.to || cmd.amount == 0) throw Error(ErrorCode::MalformedRequest, "transfer");
  if (state_.ledger.locks[cmd.from] || state_.ledger.locks[cmd.to]) throw Error(ErrorCode::TokensLocked);
  if (state_.ledger.balances[cmd.from] < cmd.amount) throw Error(ErrorCode::InsufficientBalance);
  state_.ledger.balances[cmd.from] -= cmd.amount;
  state_.ledger.balances[cmd.to] += cmd.amount;
  state_.root_stale = true;
  return {EventKind::Transferred, {{"from", cmd.from}, {"to", cmd.to}, {"amount", cmd.amount}}};
}

Board::Success Board::run(const RefreshRootCmd& cmd) {
  require_initialized();
  if (cmd.tokens != state_.ledger.balances) throw Error(ErrorCode::InconsistentEvents, "token list differs from ledger");
  if (!(token_tree(cmd.tokens).root() == cmd.token_root)) throw Error(ErrorCode::BadRoot);
  if (!sig_verify(state_.vk_sig, cmd.token_root.bytes, cmd.root_sig)) throw Error(ErrorCode::BadSignature);
  state_.token_root = cmd.token_root;
  state_.root_sig = cmd.root_sig;
  state_.root_stale = false;
  return {EventKind::RootRefreshed, {{"tokenRoot", cmd.token_root}}};
}

}  // namespace kite
