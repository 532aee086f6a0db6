#include "kite/json_codec.hpp"

#include <limits>
#include <type_traits>

namespace kite {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Bytes hex_field(const json& j) {
  if (!j.is_string()) throw Error(ErrorCode::MalformedRequest, "expected hex string");
  return from_hex(j.get<std::string>());
}

template <typename T>
struct is_unsigned_vector : std::false_type {};
template <typename U>
struct is_unsigned_vector<std::vector<U>>
    : std::bool_constant<std::is_integral_v<U> && std::is_unsigned_v<U> && !std::is_same_v<U, bool>> {};

template <typename T>
T field(const json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) throw Error(ErrorCode::MalformedRequest, std::string("missing field ") + name);
  // nlohmann wraps negative or oversized numbers into unsigned targets.
  auto check_unsigned = [name](const json& v, std::uint64_t max) {
    if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0) || v.get<std::uint64_t>() > max) {
      throw Error(ErrorCode::MalformedRequest, std::string("field ") + name + ": expected unsigned integer");
    }
  };
  if constexpr (std::is_integral_v<T> && std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
    check_unsigned(j.at(name), std::numeric_limits<T>::max());
  } else if constexpr (is_unsigned_vector<T>::value) {
    if (j.at(name).is_array()) {
      for (const auto& v : j.at(name)) check_unsigned(v, std::numeric_limits<typename T::value_type>::max());
    }
  }
  try {
    return j.at(name).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedRequest, std::string("field ") + name + ": " + e.what());
  }
}

}  // namespace

void to_json(json& j, const Point& p) { j = to_hex(p.to_bytes()); }
void from_json(const json& j, Point& p) { p = Point::from_bytes(hex_field(j)); }
void to_json(json& j, const Scalar& s) { j = to_hex(s.to_bytes()); }
void from_json(const json& j, Scalar& s) { s = Scalar::from_bytes(hex_field(j)); }

void to_json(json& j, const Ciphertext& ct) {
  ByteWriter w;
  ct.encode(w);
  j = to_hex(w.bytes());
}

void from_json(const json& j, Ciphertext& ct) {
  const Bytes b = hex_field(j);
  ByteReader r(b);
  ct = Ciphertext::decode(r);
  r.expect_done();
}

void to_json(json& j, const Digest& d) { j = to_hex(d.bytes); }
void from_json(const json& j, Digest& d) { d = Digest::from_bytes(hex_field(j)); }
void to_json(json& j, const VerifyKey& vk) { j = to_hex(vk.bytes); }

void from_json(const json& j, VerifyKey& vk) {
  const Bytes b = hex_field(j);
  if (b.size() != vk.bytes.size()) throw Error(ErrorCode::InvalidEncoding, "verify key length");
  std::copy(b.begin(), b.end(), vk.bytes.begin());
}

void to_json(json& j, const Signature& s) { j = to_hex(s.bytes); }

void from_json(const json& j, Signature& s) {
  const Bytes b = hex_field(j);
  if (b.size() != s.bytes.size()) throw Error(ErrorCode::InvalidEncoding, "signature length");
  std::copy(b.begin(), b.end(), s.bytes.begin());
}

void to_json(json& j, const MerkleProof& p) { j = to_hex(p.serialize()); }
void from_json(const json& j, MerkleProof& p) { p = MerkleProof::deserialize(hex_field(j)); }

void to_json(json& j, const Event& e) {
  j = {{"seq", e.seq}, {"kind", to_string(e.kind)}, {"payload", e.payload}};
}

void from_json(const json& j, Event& e) {
  e.seq = field<std::uint64_t>(j, "seq");
  e.kind = event_kind_from_string(field<std::string>(j, "kind"));
  e.payload = field<json>(j, "payload");
}

void to_json(json& j, const ElectionState& e) {
  j = {{"eid", e.eid},
       {"desc", e.desc},
       {"tallies", e.tallies},
       {"voted", e.voted},
       {"snapshotRoot", e.snapshot_root ? json(*e.snapshot_root) : json(nullptr)},
       {"snapshotPowers", e.snapshot_powers},
       {"creator", e.creator},
       {"phase", to_string(e.phase)},
       {"result", e.result ? json(*e.result) : json(nullptr)},
       {"noVotes", e.no_votes}};
}

void from_json(const json& j, ElectionState& e) {
  e = ElectionState{};
  e.eid = field<ElectionId>(j, "eid");
  e.desc = field<std::string>(j, "desc");
  e.tallies = field<std::vector<Ciphertext>>(j, "tallies");
  e.voted = field<std::vector<std::uint8_t>>(j, "voted");
  const auto root = field<json>(j, "snapshotRoot");
  if (!root.is_null()) e.snapshot_root = root.get<Digest>();
  e.snapshot_powers = field<std::vector<Ciphertext>>(j, "snapshotPowers");
  e.creator = field<PartyIndex>(j, "creator");
  const auto phase = field<std::string>(j, "phase");
  if (phase == "Created") {
    e.phase = ElectionPhase::Created;
  } else if (phase == "Started") {
    e.phase = ElectionPhase::Started;
  } else if (phase == "Tallied") {
    e.phase = ElectionPhase::Tallied;
  } else {
    throw Error(ErrorCode::MalformedRequest, "phase " + phase);
  }
  const auto result = field<json>(j, "result");
  if (!result.is_null()) e.result = field<std::vector<std::uint32_t>>(j, "result");
  e.no_votes = field<bool>(j, "noVotes");
}

void to_json(json& j, const BoardState& s) {
  j = {{"initialized", s.initialized}};
  if (!s.initialized) return;
  json ids = json::array();
  for (const auto& id : s.delegation_ids) ids.push_back(id ? json(*id) : json(nullptr));
  json elections = json::array();
  for (const auto& [eid, e] : s.elections) elections.push_back(e);
  j["maxTotal"] = s.params.max_total;
  j["numOptions"] = s.params.num_options;
  j["pkEnc"] = s.pk_enc;
  j["vkSig"] = s.vk_sig;
  j["balances"] = s.ledger.balances;
  j["locks"] = s.ledger.locks;
  j["tokenRoot"] = s.token_root;
  j["rootSig"] = s.root_sig;
  j["rootStale"] = s.root_stale;
  j["delegatePowers"] = s.delegate_powers;
  j["delegationIds"] = ids;
  j["active"] = s.active;
  j["elections"] = elections;
}

void from_json(const json& j, BoardState& s) {
  s = BoardState{};
  s.initialized = field<bool>(j, "initialized");
  if (!s.initialized) return;
  s.params.max_total = field<std::uint64_t>(j, "maxTotal");
  s.params.num_options = field<std::uint32_t>(j, "numOptions");
  s.pk_enc = field<Point>(j, "pkEnc");
  s.vk_sig = field<VerifyKey>(j, "vkSig");
  s.ledger.balances = field<std::vector<std::uint64_t>>(j, "balances");
  s.ledger.locks = field<std::vector<std::uint8_t>>(j, "locks");
  s.token_root = field<Digest>(j, "tokenRoot");
  s.root_sig = field<Signature>(j, "rootSig");
  s.root_stale = field<bool>(j, "rootStale");
  s.delegate_powers = field<std::vector<Ciphertext>>(j, "delegatePowers");
  for (const auto& id : field<json>(j, "delegationIds")) {
    s.delegation_ids.push_back(id.is_null() ? std::nullopt : std::optional<Digest>(id.get<Digest>()));
  }
  s.active = field<std::vector<std::uint8_t>>(j, "active");
  for (const auto& ej : field<json>(j, "elections")) {
    auto e = ej.get<ElectionState>();
    s.elections.emplace(e.eid, std::move(e));
  }
}

json command_to_json(const Command& cmd) {
  json j = std::visit(
      Overloaded{
          [](const SetupCmd& c) -> json {
            return {{"pkEnc", c.pk_enc},       {"vkSig", c.vk_sig},     {"tokens", c.tokens},
                    {"tokenRoot", c.token_root}, {"rootSig", c.root_sig}, {"numOptions", c.num_options}};
          },
          [](const RegisterCmd& c) -> json { return {{"party", c.party}}; },
          [](const UnregisterCmd& c) -> json { return {{"party", c.party}}; },
          [](const DelegateCmd& c) -> json {
            return {{"party", c.party},   {"anonSet", c.anon_set},         {"ctVec", c.ct_vec},
                    {"tokens", c.tokens}, {"tokenProof", c.token_proof}, {"proof", c.proof}};
          },
          [](const UndelegateCmd& c) -> json {
            return {{"party", c.party}, {"anonSet", c.anon_set}, {"ctVec", c.ct_vec}};
          },
          [](const ElectionSetupCmd& c) -> json { return {{"party", c.party}, {"eid", c.eid}, {"desc", c.desc}}; },
          [](const ElectionStartCmd& c) -> json { return {{"party", c.party}, {"eid", c.eid}}; },
          [](const VotePublicCmd& c) -> json {
            return {{"eid", c.eid},       {"party", c.party},
                    {"mode", "public"},   {"option", c.option},
                    {"snapshotProof", c.snapshot_proof}, {"power", c.power}};
          },
          [](const VotePrivateCmd& c) -> json {
            return {{"eid", c.eid},         {"party", c.party},
                    {"mode", "private"},    {"voteVec", c.vote_vec},
                    {"proof", c.proof},     {"snapshotProof", c.snapshot_proof},
                    {"power", c.power}};
          },
          [](const TallyCmd& c) -> json {
            return {{"eid", c.eid}, {"percentages", c.percentages}, {"counts", c.counts}, {"proof", c.proof}};
          },
          [](const TransferCmd& c) -> json { return {{"from", c.from}, {"to", c.to}, {"amount", c.amount}}; },
          [](const RefreshRootCmd& c) -> json {
            return {{"tokens", c.tokens}, {"tokenRoot", c.token_root}, {"rootSig", c.root_sig}};
          },
      },
      cmd);
  j["type"] = command_name(cmd);
  return j;
}

Command command_from_json(const json& j) {
  const auto type = field<std::string>(j, "type");
  if (type == "setup") {
    SetupCmd c;
    c.pk_enc = field<Point>(j, "pkEnc");
    c.vk_sig = field<VerifyKey>(j, "vkSig");
    c.tokens = field<std::vector<std::uint64_t>>(j, "tokens");
    c.token_root = field<Digest>(j, "tokenRoot");
    c.root_sig = field<Signature>(j, "rootSig");
    c.num_options = field<std::uint32_t>(j, "numOptions");
    return c;
  }
  if (type == "register") return RegisterCmd{field<PartyIndex>(j, "party")};
  if (type == "unregister") return UnregisterCmd{field<PartyIndex>(j, "party")};
  if (type == "delegate") {
    DelegateCmd c;
    c.party = field<PartyIndex>(j, "party");
    c.anon_set = field<std::vector<PartyIndex>>(j, "anonSet");
    c.ct_vec = field<std::vector<Ciphertext>>(j, "ctVec");
    c.tokens = field<std::uint64_t>(j, "tokens");
    c.token_proof = field<MerkleProof>(j, "tokenProof");
    c.proof = field<nizk::Proof>(j, "proof");
    return c;
  }
  if (type == "undelegate") {
    UndelegateCmd c;
    c.party = field<PartyIndex>(j, "party");
    c.anon_set = field<std::vector<PartyIndex>>(j, "anonSet");
    c.ct_vec = field<std::vector<Ciphertext>>(j, "ctVec");
    return c;
  }
  if (type == "election_setup") {
    return ElectionSetupCmd{field<PartyIndex>(j, "party"), field<ElectionId>(j, "eid"), field<std::string>(j, "desc")};
  }
  if (type == "election_start") return ElectionStartCmd{field<PartyIndex>(j, "party"), field<ElectionId>(j, "eid")};
  if (type == "vote_public") {
    VotePublicCmd c;
    c.eid = field<ElectionId>(j, "eid");
    c.party = field<PartyIndex>(j, "party");
    c.option = field<std::uint32_t>(j, "option");
    c.snapshot_proof = field<MerkleProof>(j, "snapshotProof");
    c.power = field<Ciphertext>(j, "power");
    return c;
  }
  if (type == "vote_private") {
    VotePrivateCmd c;
    c.eid = field<ElectionId>(j, "eid");
    c.party = field<PartyIndex>(j, "party");
    c.vote_vec = field<std::vector<Ciphertext>>(j, "voteVec");
    c.proof = field<nizk::Proof>(j, "proof");
    c.snapshot_proof = field<MerkleProof>(j, "snapshotProof");
    c.power = field<Ciphertext>(j, "power");
    return c;
  }
  if (type == "tally") {
    TallyCmd c;
    c.eid = field<ElectionId>(j, "eid");
    c.percentages = field<std::vector<std::uint32_t>>(j, "percentages");
    c.counts = field<std::vector<std::int64_t>>(j, "counts");
    c.proof = field<nizk::Proof>(j, "proof");
    return c;
  }
  if (type == "transfer") {
    return TransferCmd{field<PartyIndex>(j, "from"), field<PartyIndex>(j, "to"), field<std::uint64_t>(j, "amount")};
  }
  if (type == "refresh_root") {
    RefreshRootCmd c;
    c.tokens = field<std::vector<std::uint64_t>>(j, "tokens");
    c.token_root = field<Digest>(j, "tokenRoot");
    c.root_sig = field<Signature>(j, "rootSig");
    return c;
  }
  throw Error(ErrorCode::MalformedRequest, "unknown command type " + type);
}

}  // namespace kite

namespace kite::nizk {

void to_json(nlohmann::json& j, const Proof& p) { j = to_hex(p.serialize()); }

void from_json(const nlohmann::json& j, Proof& p) {
  if (!j.is_string()) throw Error(ErrorCode::MalformedRequest, "proof must be a hex string");
  p = Proof::deserialize(from_hex(j.get<std::string>()));
}

}  // namespace kite::nizk
