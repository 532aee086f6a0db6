#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kite/board.hpp"
#include "kite/percent.hpp"

namespace kite {

struct TransferRecord {
  std::uint64_t seq = 0;  // board event sequence number
  PartyIndex from = 0;
  PartyIndex to = 0;
  std::uint64_t amount = 0;
};

// Collects Transferred events from a board event log.
std::vector<TransferRecord> transfers_since(std::span<const Event> events, std::uint64_t after_seq);

struct TallyResult {
  ElectionId eid = 0;
  std::vector<std::int64_t> counts;  // authority-private
  std::vector<std::uint32_t> percentages;
  bool no_votes = false;
};

// The trusted authority. Holds both secret keys; everything it hands out
// (setup bundle, refreshed roots, tally submissions) is public.
class Authority {
 public:
  static constexpr std::uint64_t kDefaultTokenBound = 1'000'000'000;

  // Throws Error(TokenOutOfBound) if any entry exceeds token_bound.
  static Authority setup(std::vector<std::uint64_t> tokens, std::uint32_t num_options, RandomSource& rng,
                         std::uint64_t token_bound = kDefaultTokenBound);

  // Recreates an authority from persisted key material.
  Authority(EncKeyPair enc, SigKeyPair sig, std::vector<std::uint64_t> tokens, std::uint32_t num_options);

  // Input for c_setup.
  const SetupCmd& bundle() const { return bundle_; }

  // Applies transfers (in sequence order, each newer than the last applied)
  // and signs the new root. Throws Error(InconsistentEvents).
  RefreshRootCmd refresh_root(std::span<const TransferRecord> transfers);

  // Decrypts the tallies, quantizes and proves. Throws Error(DlogNotFound).
  TallyResult decrypt_tally(ElectionId eid, const std::vector<Ciphertext>& tallies) const;
  TallyCmd tally_decrypt(ElectionId eid, const std::vector<Ciphertext>& tallies, RandomSource& rng) const;

  const EncKeyPair& enc_keys() const { return enc_; }
  const SigKeyPair& sig_keys() const { return sig_; }
  const std::vector<std::uint64_t>& token_list() const { return tokens_; }
  const Digest& current_root() const { return root_; }
  std::uint64_t max_total() const;
  std::uint64_t last_applied_seq() const { return last_seq_; }

 private:
  EncKeyPair enc_;
  SigKeyPair sig_;
  std::vector<std::uint64_t> tokens_;
  std::uint32_t num_options_;
  Digest root_;
  SetupCmd bundle_;
  std::uint64_t last_seq_ = 0;
  bool any_applied_ = false;
};

}  // namespace kite
