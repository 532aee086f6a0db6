#include "kite/client.hpp"

#include <algorithm>
#include <fstream>

#include "kite/json_codec.hpp"

namespace kite {

std::string_view to_string(Role role) { return role == Role::Delegate ? "delegate" : "voter"; }

void StoredDelegation::encode(ByteWriter& w) const {
  w.u32(static_cast<std::uint32_t>(anon_set.size()));
  for (auto p : anon_set) w.u32(p);
  w.items(ct_vec);
  w.items(r_vec);
  w.u32(target_pos);
}

StoredDelegation StoredDelegation::decode(ByteReader& r) {
  StoredDelegation d;
  const std::size_t n = r.count(4);
  d.anon_set.reserve(n);
  for (std::size_t i = 0; i < n; ++i) d.anon_set.push_back(r.u32());
  d.ct_vec = r.items<Ciphertext>();
  d.r_vec = r.items<Scalar>();
  d.target_pos = r.u32();
  if (d.ct_vec.size() != n || d.r_vec.size() != n || d.target_pos >= n) {
    throw Error(ErrorCode::InvalidEncoding, "stored delegation shape");
  }
  return d;
}

void to_json(nlohmann::json& j, const VoterState& s) {
  j = {{"party", s.party}, {"tokens", s.tokens}, {"role", to_string(s.role)}, {"delegation", nullptr}};
  if (s.delegation) {
    ByteWriter w;
    s.delegation->encode(w);
    j["delegation"] = to_hex(w.bytes());
  }
}

void from_json(const nlohmann::json& j, VoterState& s) {
  try {
    s.party = j.at("party").get<PartyIndex>();
    s.tokens = j.at("tokens").get<std::uint64_t>();
    const auto role = j.at("role").get<std::string>();
    if (role != "voter" && role != "delegate") throw Error(ErrorCode::InvalidEncoding, "role");
    s.role = role == "delegate" ? Role::Delegate : Role::Voter;
    s.delegation.reset();
    if (!j.at("delegation").is_null()) {
      const Bytes raw = from_hex(j.at("delegation").get<std::string>());
      ByteReader r(raw);
      s.delegation = StoredDelegation::decode(r);
      r.expect_done();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidEncoding, e.what());
  }
}

VoterState voter_setup(std::span<const std::uint64_t> tokens, PartyIndex party) {
  if (party >= tokens.size()) throw Error(ErrorCode::UnknownParty, std::to_string(party));
  VoterState s;
  s.party = party;
  s.tokens = tokens[party];
  return s;
}

std::vector<PartyIndex> active_delegates(const BoardState& view, PartyIndex self) {
  std::vector<PartyIndex> out;
  for (PartyIndex p = 0; p < view.active.size(); ++p) {
    if (view.active[p] && p != self) out.push_back(p);
  }
  return out;
}

Voter::Voter(VoterState state, ClientConfig config) : state_(std::move(state)), config_(std::move(config)) {}

DelegationBundle Voter::build_delegation(const BoardState& view, PartyIndex target, std::size_t set_size,
                                         std::span<const PartyIndex> pool, RandomSource& rng) const {
  if (!view.initialized) throw Error(ErrorCode::NotInitialized);
  const PartyIndex p = state_.party;
  if (!view.has_party(p)) throw Error(ErrorCode::UnknownParty, std::to_string(p));
  if (state_.delegation || view.ledger.locks[p]) throw Error(ErrorCode::AlreadyDelegated);
  const std::uint64_t t = view.ledger.balances[p];
  if (t == 0) throw Error(ErrorCode::ZeroPower);

  std::vector<PartyIndex> others;
  bool found = false;
  for (auto q : pool) {
    if (q == target) {
      found = true;
    } else if (std::find(others.begin(), others.end(), q) == others.end()) {
      others.push_back(q);
    }
  }
  if (!found) throw Error(ErrorCode::TargetNotInPool, std::to_string(target));
  if (set_size > others.size() + 1) throw Error(ErrorCode::PoolTooSmall);
  if (!config_.set_sizes.empty() &&
      std::find(config_.set_sizes.begin(), config_.set_sizes.end(), set_size) == config_.set_sizes.end()) {
    throw Error(ErrorCode::BadAnonymitySet, "unsupported set size " + std::to_string(set_size));
  }
  if (set_size == 0) throw Error(ErrorCode::BadAnonymitySet, "empty set");
  if (view.root_stale) throw Error(ErrorCode::StaleRoot);

  // Partial Fisher-Yates for the decoys, then a uniform slot for the target.
  for (std::size_t i = 0; i + 1 < set_size; ++i) {
    const std::size_t j = i + rng.uniform(others.size() - i);
    std::swap(others[i], others[j]);
  }
  std::vector<PartyIndex> anon(others.begin(), others.begin() + static_cast<std::ptrdiff_t>(set_size - 1));
  const auto pos = static_cast<std::uint32_t>(rng.uniform(set_size));
  anon.insert(anon.begin() + pos, target);

  StoredDelegation secret;
  secret.anon_set = anon;
  secret.target_pos = pos;
  const std::uint64_t bound = view.params.max_total;
  for (std::size_t k = 0; k < set_size; ++k) {
    Scalar r = Scalar::random(rng);
    secret.ct_vec.push_back(encrypt(view.pk_enc, k == pos ? static_cast<std::int64_t>(t) : 0, r, bound));
    secret.r_vec.push_back(r);
  }

  const MerkleTree tree = token_tree(view.ledger.balances);
  DelegationBundle b;
  b.cmd.party = p;
  b.cmd.anon_set = anon;
  b.cmd.ct_vec = secret.ct_vec;
  b.cmd.tokens = t;
  b.cmd.token_proof = tree.prove(p);
  nizk::DelegationStatement st{view.pk_enc, anon, secret.ct_vec, t, view.token_root, b.cmd.token_proof, p};
  b.cmd.proof = nizk::prove_delegation(st, {pos, secret.r_vec}, rng);
  b.secret = std::move(secret);
  return b;
}

void Voter::confirm_delegation(const DelegationBundle& bundle) { state_.delegation = bundle.secret; }

UndelegateCmd Voter::build_undelegation() const {
  if (!state_.delegation) throw Error(ErrorCode::NothingToUndelegate);
  return {state_.party, state_.delegation->anon_set, state_.delegation->ct_vec};
}

const ElectionState& Voter::started_election(const BoardState& view, ElectionId eid) const {
  const ElectionState* e = view.find_election(eid);
  if (!e) throw Error(ErrorCode::UnknownElection);
  if (!e->snapshot_root) throw Error(ErrorCode::ElectionNotStarted);
  if (state_.party >= e->snapshot_powers.size()) throw Error(ErrorCode::UnknownParty);
  return *e;
}

VotePublicCmd Voter::build_public_vote(const BoardState& view, ElectionId eid, std::uint32_t option) const {
  if (option >= view.params.num_options) throw Error(ErrorCode::BadOption, std::to_string(option));
  const ElectionState& e = started_election(view, eid);
  VotePublicCmd cmd;
  cmd.eid = eid;
  cmd.party = state_.party;
  cmd.option = option;
  cmd.power = e.snapshot_powers[state_.party];
  cmd.snapshot_proof = power_tree(e.snapshot_powers).prove(state_.party);
  return cmd;
}

VotePrivateCmd Voter::build_private_vote(const BoardState& view, ElectionId eid, std::uint32_t option,
                                         RandomSource& rng) const {
  const std::uint32_t n = view.params.num_options;
  if (option >= n) throw Error(ErrorCode::BadOption, std::to_string(option));
  const ElectionState& e = started_election(view, eid);
  VotePrivateCmd cmd;
  cmd.eid = eid;
  cmd.party = state_.party;
  cmd.power = e.snapshot_powers[state_.party];
  cmd.snapshot_proof = power_tree(e.snapshot_powers).prove(state_.party);

  nizk::VoteWitness wit;
  wit.choice = option;
  for (std::uint32_t j = 0; j < n; ++j) {
    Scalar r;
    do {
      r = Scalar::random(rng);
    } while (r.is_zero());
    cmd.vote_vec.push_back(j == option ? rerandomize(view.pk_enc, cmd.power, r)
                                       : encrypt(view.pk_enc, 0, r, view.params.max_total));
    wit.r_vec.push_back(r);
  }
  nizk::VoteStatement st{view.pk_enc, cmd.power, cmd.vote_vec, state_.party, *e.snapshot_root,
                         cmd.snapshot_proof, eid};
  cmd.proof = nizk::prove_vote(st, wit, rng);
  return cmd;
}

Outcome Voter::register_delegate(BoardPort& board) {
  Outcome o = board.submit(RegisterCmd{state_.party});
  if (o.ok()) state_.role = Role::Delegate;
  return o;
}

Outcome Voter::unregister_delegate(BoardPort& board) {
  Outcome o = board.submit(UnregisterCmd{state_.party});
  if (o.ok()) state_.role = Role::Voter;
  return o;
}

Outcome Voter::delegate(BoardPort& board, PartyIndex target, std::size_t set_size, RandomSource& rng) {
  const BoardState view = board.snapshot();
  sync(view);
  const auto pool = active_delegates(view, state_.party);
  if (std::find(pool.begin(), pool.end(), target) == pool.end()) {
    throw Error(ErrorCode::TargetNotInPool, std::to_string(target));
  }
  const DelegationBundle b = build_delegation(view, target, set_size, pool, rng);
  Outcome o = board.submit(b.cmd);
  if (o.ok()) confirm_delegation(b);
  return o;
}

Outcome Voter::undelegate(BoardPort& board) {
  Outcome o = board.submit(build_undelegation());
  if (o.ok()) confirm_undelegation();
  return o;
}

Outcome Voter::vote_public(BoardPort& board, ElectionId eid, std::uint32_t option) {
  return board.submit(build_public_vote(board.snapshot(), eid, option));
}

Outcome Voter::vote_private(BoardPort& board, ElectionId eid, std::uint32_t option, RandomSource& rng) {
  return board.submit(build_private_vote(board.snapshot(), eid, option, rng));
}

Outcome Voter::create_election(BoardPort& board, ElectionId eid, std::string desc) {
  return board.submit(ElectionSetupCmd{state_.party, eid, std::move(desc)});
}

std::pair<Outcome, std::vector<Ciphertext>> Voter::start_election(BoardPort& board, ElectionId eid) {
  Outcome o = board.submit(ElectionStartCmd{state_.party, eid});
  std::vector<Ciphertext> powers;
  if (o.ok()) {
    const BoardState view = board.snapshot();
    if (const ElectionState* e = view.find_election(eid)) powers = e->snapshot_powers;
  }
  return {std::move(o), std::move(powers)};
}

void Voter::sync(const BoardState& view) {
  if (view.has_party(state_.party)) state_.tokens = view.ledger.balances[state_.party];
}

void Voter::save(const std::filesystem::path& file) const {
  const std::filesystem::path tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error(ErrorCode::Unavailable, "cannot write " + tmp.string());
    out << nlohmann::json(state_).dump(2) << '\n';
    if (!out.flush()) throw Error(ErrorCode::Unavailable, "cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, file);
}

Voter Voter::load(const std::filesystem::path& file, ClientConfig config) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::NotFound, file.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidEncoding, e.what());
  }
  return Voter(j.get<VoterState>(), std::move(config));
}

}  // namespace kite
