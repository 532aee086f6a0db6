#pragma once

// JSON mirrors of the canonical encodings. Binary fields (group elements,
// scalars, digests, signatures, Merkle proofs, NIZK proofs) are lowercase
// hex of their canonical bytes; integers are JSON numbers.

#include <json.hpp>

#include "kite/board.hpp"

namespace kite {

using nlohmann::json;

void to_json(json& j, const Point& p);
void from_json(const json& j, Point& p);
void to_json(json& j, const Scalar& s);
void from_json(const json& j, Scalar& s);
void to_json(json& j, const Ciphertext& ct);
void from_json(const json& j, Ciphertext& ct);
void to_json(json& j, const Digest& d);
void from_json(const json& j, Digest& d);
void to_json(json& j, const VerifyKey& vk);
void from_json(const json& j, VerifyKey& vk);
void to_json(json& j, const Signature& s);
void from_json(const json& j, Signature& s);
void to_json(json& j, const MerkleProof& p);
void from_json(const json& j, MerkleProof& p);
void to_json(json& j, const Event& e);
void from_json(const json& j, Event& e);
void to_json(json& j, const ElectionState& e);
void from_json(const json& j, ElectionState& e);
void to_json(json& j, const BoardState& s);
void from_json(const json& j, BoardState& s);

// {"type": "<command name>", ...fields}
json command_to_json(const Command& cmd);
// Throws Error(MalformedRequest) on missing or ill-typed fields and
// Error(InvalidEncoding) on bad binary fields.
Command command_from_json(const json& j);

}  // namespace kite

namespace kite::nizk {

void to_json(nlohmann::json& j, const Proof& p);
void from_json(const nlohmann::json& j, Proof& p);

}  // namespace kite::nizk
