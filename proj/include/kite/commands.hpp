#pragma once

// Inputs to the bulletin board. Every mutation of board state is one of
// these commands; replaying the accepted command sequence from genesis
// reproduces the state exactly.

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "kite/elgamal.hpp"
#include "kite/merkle.hpp"
#include "kite/nizk.hpp"
#include "kite/params.hpp"
#include "kite/signature.hpp"

namespace kite {

struct SetupCmd {
  Point pk_enc;
  VerifyKey vk_sig;
  std::vector<std::uint64_t> tokens;  // L_T
  Digest token_root;                  // R_T
  Signature root_sig;
  std::uint32_t num_options = 3;
};

struct RegisterCmd {
  PartyIndex party = 0;
};

struct UnregisterCmd {
  PartyIndex party = 0;
};

struct DelegateCmd {
  PartyIndex party = 0;
  std::vector<PartyIndex> anon_set;
  std::vector<Ciphertext> ct_vec;
  std::uint64_t tokens = 0;
  MerkleProof token_proof;
  nizk::Proof proof;
};

struct UndelegateCmd {
  PartyIndex party = 0;
  std::vector<PartyIndex> anon_set;
  std::vector<Ciphertext> ct_vec;
};

struct ElectionSetupCmd {
  PartyIndex party = 0;
  ElectionId eid = 0;
  std::string desc;
};

struct ElectionStartCmd {
  PartyIndex party = 0;
  ElectionId eid = 0;
};

struct VotePublicCmd {
  ElectionId eid = 0;
  PartyIndex party = 0;
  std::uint32_t option = 0;
  MerkleProof snapshot_proof;
  Ciphertext power;
};

struct VotePrivateCmd {
  ElectionId eid = 0;
  PartyIndex party = 0;
  std::vector<Ciphertext> vote_vec;
  nizk::Proof proof;
  MerkleProof snapshot_proof;
  Ciphertext power;
};

// Counts travel inside the submission so the board can check the decryption
// proof; they are never echoed into events or API responses.
struct TallyCmd {
  ElectionId eid = 0;
  std::vector<std::uint32_t> percentages;
  std::vector<std::int64_t> counts;
  nizk::Proof proof;
};

struct TransferCmd {
  PartyIndex from = 0;
  PartyIndex to = 0;
  std::uint64_t amount = 0;
};

struct RefreshRootCmd {
  std::vector<std::uint64_t> tokens;
  Digest token_root;
  Signature root_sig;
};

using Command = std::variant<SetupCmd, RegisterCmd, UnregisterCmd, DelegateCmd, UndelegateCmd, ElectionSetupCmd,
                             ElectionStartCmd, VotePublicCmd, VotePrivateCmd, TallyCmd, TransferCmd, RefreshRootCmd>;

std::string_view command_name(const Command& cmd);

// Delegation identifier: hash("did", anonSet || ctVec).
Digest delegation_id(const std::vector<PartyIndex>& anon_set, const std::vector<Ciphertext>& ct_vec);

}  // namespace kite
