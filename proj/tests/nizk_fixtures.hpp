#pragma once

// Honest and forged statement builders shared by the unit and acceptance
// binaries.

#include <cstdint>
#include <vector>

#include "kite/elgamal.hpp"
#include "kite/merkle.hpp"
#include "kite/nizk.hpp"

namespace kite::testing {

struct DelegationCase {
  EncKeyPair keys;
  std::vector<std::uint64_t> tokens;
  nizk::DelegationStatement st;
  nizk::DelegationWitness wit;
};

// Voter 0 holds `t` tokens and sends them to position `target_pos` of a set
// of `set_size` delegates (parties 1..set_size).
inline DelegationCase make_delegation(std::size_t set_size, std::uint64_t t, std::size_t target_pos,
                                      RandomSource& rng) {
  DelegationCase c;
  c.keys = enc_keygen(rng);
  c.tokens.assign(set_size + 1, 1);
  c.tokens[0] = t;
  const MerkleTree tree = token_tree(c.tokens);
  std::uint64_t total = 0;
  for (auto v : c.tokens) total += v;
  c.st.pk = c.keys.pk;
  c.st.tokens = t;
  c.st.voter = 0;
  c.st.token_root = tree.root();
  c.st.token_proof = tree.prove(0);
  c.wit.target_pos = target_pos;
  for (std::size_t k = 0; k < set_size; ++k) {
    c.st.anon_set.push_back(static_cast<PartyIndex>(k + 1));
    const Scalar r = Scalar::random(rng);
    c.wit.r_vec.push_back(r);
    c.st.ct_vec.push_back(encrypt(c.keys.pk, k == target_pos ? static_cast<std::int64_t>(t) : 0, r, total));
  }
  return c;
}

// Replaces the ciphertext vector with encryptions of `plain` (any values),
// keeping a matching witness so the unchecked prover runs its honest code
// path against a false statement.
inline void set_plaintexts(DelegationCase& c, const std::vector<std::int64_t>& plain, RandomSource& rng) {
  c.st.ct_vec.clear();
  c.wit.r_vec.clear();
  for (auto m : plain) {
    const Scalar r = Scalar::random(rng);
    c.wit.r_vec.push_back(r);
    c.st.ct_vec.push_back({Point::base_mul(r), Point::base_mul(m) + c.keys.pk * r});
  }
}

struct VoteCase {
  EncKeyPair keys;
  std::vector<Ciphertext> powers;
  nizk::VoteStatement st;
  nizk::VoteWitness wit;
  std::int64_t power_plain = 0;
};

// Delegate 0 of a 4-party snapshot with an encrypted power of `power`.
inline VoteCase make_vote(std::size_t options, std::int64_t power, std::uint32_t choice, RandomSource& rng) {
  VoteCase c;
  c.keys = enc_keygen(rng);
  c.power_plain = power;
  for (std::int64_t p : {power, std::int64_t{2}, std::int64_t{0}, std::int64_t{7}}) {
    c.powers.push_back(encrypt(c.keys.pk, p, Scalar::random(rng), 1000));
  }
  const MerkleTree tree = power_tree(c.powers);
  c.st.pk = c.keys.pk;
  c.st.power = c.powers[0];
  c.st.delegate = 0;
  c.st.snapshot_root = tree.root();
  c.st.snapshot_proof = tree.prove(0);
  c.wit.choice = choice;
  for (std::size_t j = 0; j < options; ++j) {
    const Scalar r = Scalar::random(rng);
    c.wit.r_vec.push_back(r);
    const Ciphertext z{Point::base_mul(r), c.keys.pk * r};
    c.st.vote_vec.push_back(j == choice ? ct_add(c.st.power, z) : z);
  }
  return c;
}

struct DecryptionCase {
  EncKeyPair keys;
  nizk::DecryptionStatement st;
};

inline DecryptionCase make_decryption(const std::vector<std::int64_t>& counts, RandomSource& rng) {
  DecryptionCase c;
  c.keys = enc_keygen(rng);
  c.st.pk = c.keys.pk;
  c.st.counts = counts;
  for (auto m : counts) c.st.tallies.push_back(encrypt(c.keys.pk, m, Scalar::random(rng), 100000));
  return c;
}

}  // namespace kite::testing
