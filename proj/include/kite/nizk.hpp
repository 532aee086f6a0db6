#pragma once

// Non-interactive proofs for the three protocol relations, built from
// Chaum-Pedersen equality-of-discrete-log sigma protocols, composed with
// CDS disjunctions and compiled with a Fiat-Shamir challenge over the
// canonical statement and commitment bytes.
//
//   delegation: every ct[k] encrypts 0 or t, and sum_k ct[k] encrypts t;
//               the voter's (index, t) leaf is in the token tree.
//   vote:       every E[j] encrypts 0 or the same plaintext as the power
//               ciphertext P, and sum_j E[j] - P encrypts 0; P is in the
//               snapshot tree.
//   decryption: for every i, log_g(pk) = log_{c1_i}(c2_i / g^{D_i}).
//
// Merkle sub-statements are public and checked in the clear.

#include <cstdint>
#include <span>
#include <vector>

#include "kite/elgamal.hpp"
#include "kite/hash.hpp"
#include "kite/merkle.hpp"
#include "kite/params.hpp"

namespace kite::nizk {

enum class Relation : std::uint8_t { Delegation = 1, Vote = 2, Decryption = 3 };

// Wire format: relation byte, u32 point count, points, u32 scalar count,
// scalars (32-byte big-endian each).
struct Proof {
  Relation relation = Relation::Delegation;
  std::vector<Point> points;
  std::vector<Scalar> scalars;

  bool operator==(const Proof&) const = default;

  Bytes serialize() const;
  // Throws Error(InvalidEncoding) on any malformed or non-canonical input.
  static Proof deserialize(std::span<const std::uint8_t> bytes);

  void encode(ByteWriter& w) const { w.blob(serialize()); }
  static Proof decode(ByteReader& r) { return deserialize(r.blob()); }
};

// ---- sigma layer -----------------------------------------------------------

// Claim: there is x with h1 = x*g1 and h2 = x*g2 (written additively).
struct DleqStatement {
  Point g1, h1, g2, h2;
};

// Accepting iff z*g1 = a1 + e*h1 and z*g2 = a2 + e*h2.
struct DleqTranscript {
  Point a1, a2;
  Scalar e, z;
};

bool check_transcript(const DleqStatement& st, const DleqTranscript& tr);

// Accepting transcript for an arbitrary challenge, produced without a
// witness. This is the zero-knowledge simulator and the fake branch of every
// disjunction.
DleqTranscript simulate_or_branch(const DleqStatement& st, const Scalar& challenge, RandomSource& rng);

// Scalar from hash("fs/<relation>", blob(statement) || commitments), widened
// to 512 bits before reduction mod q.
Scalar fs_challenge(Relation relation, std::span<const std::uint8_t> statement,
                    std::span<const std::uint8_t> commitments);

// ---- relations -------------------------------------------------------------

struct DelegationStatement {
  Point pk;
  std::vector<PartyIndex> anon_set;
  std::vector<Ciphertext> ct_vec;
  std::uint64_t tokens = 0;
  Digest token_root;
  MerkleProof token_proof;
  PartyIndex voter = 0;

  Bytes serialize() const;
};

struct DelegationWitness {
  std::size_t target_pos = 0;
  std::vector<Scalar> r_vec;
};

struct VoteStatement {
  Point pk;
  Ciphertext power;
  std::vector<Ciphertext> vote_vec;
  PartyIndex delegate = 0;
  Digest snapshot_root;
  MerkleProof snapshot_proof;
  // Binds the proof to one election so it cannot be replayed into another
  // election that shares the same snapshot.
  ElectionId eid = 0;

  Bytes serialize() const;
};

struct VoteWitness {
  std::uint32_t choice = 0;
  std::vector<Scalar> r_vec;
};

struct DecryptionStatement {
  Point pk;
  std::vector<Ciphertext> tallies;
  std::vector<std::int64_t> counts;

  Bytes serialize() const;
};

// Provers check the witness against the statement first and throw
// Error(WitnessMismatch) if it does not satisfy the relation.
Proof prove_delegation(const DelegationStatement& st, const DelegationWitness& wit, RandomSource& rng);
bool verify_delegation(const DelegationStatement& st, const Proof& proof);

Proof prove_vote(const VoteStatement& st, const VoteWitness& wit, RandomSource& rng);
bool verify_vote(const VoteStatement& st, const Proof& proof);

Proof prove_decryption(const DecryptionStatement& st, const Scalar& sk, RandomSource& rng);
bool verify_decryption(const DecryptionStatement& st, const Proof& proof);

namespace detail {

// The proving algorithms without the witness self-check. Only the
// adversarial test harness calls these, to build best-effort forgeries for
// statements that are false.
Proof prove_delegation_unchecked(const DelegationStatement& st, const DelegationWitness& wit, RandomSource& rng);
Proof prove_vote_unchecked(const VoteStatement& st, const VoteWitness& wit, RandomSource& rng);
Proof prove_decryption_unchecked(const DecryptionStatement& st, const Scalar& sk, RandomSource& rng);

}  // namespace detail

}  // namespace kite::nizk
