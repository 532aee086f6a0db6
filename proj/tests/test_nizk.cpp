#include <gtest/gtest.h>

#include "kite/error.hpp"
#include "kite/nizk.hpp"
#include "nizk_fixtures.hpp"
#include "test_util.hpp"

namespace kite {
namespace {

using namespace kite::nizk;
using kite::testing::make_decryption;
using kite::testing::make_delegation;
using kite::testing::make_vote;
using kite::testing::set_plaintexts;

// ---- sigma layer -----------------------------------------------------------

TEST(Sigma, SimulatedBranchVerifiesAndHasTranscriptShape) {
  SeededRandom rng(1);
  const auto keys = enc_keygen(rng);
  const Ciphertext ct = encrypt(keys.pk, 4, Scalar::random(rng), 100);
  // False claim "ct encrypts 0"; the simulator still produces an accepting
  // transcript for any chosen challenge.
  const DleqStatement st{Point::generator(), ct.c1, keys.pk, ct.c2};
  const Scalar e = Scalar::random(rng);
  const DleqTranscript t = simulate_or_branch(st, e, rng);
  EXPECT_TRUE(check_transcript(st, t));
  EXPECT_EQ(t.e, e);
  EXPECT_FALSE(t.a1.is_identity());
  EXPECT_FALSE(t.a2.is_identity());
  DleqTranscript bad = t;
  bad.z = bad.z + Scalar::one();
  EXPECT_FALSE(check_transcript(st, bad));
}

TEST(Sigma, ChallengeIsDeterministicAndTagSeparated) {
  const Bytes stmt{1, 2, 3};
  const Bytes com{4, 5};
  EXPECT_EQ(fs_challenge(Relation::Vote, stmt, com), fs_challenge(Relation::Vote, stmt, com));
  EXPECT_NE(fs_challenge(Relation::Vote, stmt, com), fs_challenge(Relation::Delegation, stmt, com));
  EXPECT_NE(fs_challenge(Relation::Vote, stmt, com), fs_challenge(Relation::Decryption, stmt, com));
  // Statement and commitment bytes are not interchangeable at the boundary.
  const Bytes stmt2{1, 2};
  const Bytes com2{3, 4, 5};
  EXPECT_NE(fs_challenge(Relation::Vote, stmt, com), fs_challenge(Relation::Vote, stmt2, com2));
}

// ---- delegation ------------------------------------------------------------

TEST(DelegationProof, SetOfFiveThreeTokensTargetTwo) {
  SeededRandom rng(2);
  auto c = make_delegation(5, 3, 2, rng);
  const Proof p = prove_delegation(c.st, c.wit, rng);
  EXPECT_TRUE(verify_delegation(c.st, p));
  // Only the target slot decrypts to t.
  for (std::size_t k = 0; k < 5; ++k) {
    EXPECT_EQ(decrypt(c.keys.sk, c.st.ct_vec[k], 20), k == 2 ? 3 : 0);
  }
  EXPECT_EQ(Proof::deserialize(p.serialize()), p);
  EXPECT_TRUE(verify_delegation(c.st, Proof::deserialize(p.serialize())));
}

TEST(DelegationProof, CompleteForEveryPositionAndSize) {
  SeededRandom rng(3);
  for (std::size_t n : {1u, 2u, 5u, 10u}) {
    for (std::size_t pos = 0; pos < n; ++pos) {
      auto c = make_delegation(n, 1 + pos, pos, rng);
      EXPECT_TRUE(verify_delegation(c.st, prove_delegation(c.st, c.wit, rng))) << n << " " << pos;
    }
  }
}

TEST(DelegationProof, ProverRejectsBadWitness) {
  SeededRandom rng(4);
  auto c = make_delegation(5, 3, 2, rng);
  auto wrong_pos = c.wit;
  wrong_pos.target_pos = 1;
  EXPECT_THROW_CODE(prove_delegation(c.st, wrong_pos, rng), ErrorCode::WitnessMismatch);
  auto short_r = c.wit;
  short_r.r_vec.pop_back();
  EXPECT_THROW_CODE(prove_delegation(c.st, short_r, rng), ErrorCode::WitnessMismatch);
  auto wrong_r = c.wit;
  wrong_r.r_vec[0] = wrong_r.r_vec[0] + Scalar::one();
  EXPECT_THROW_CODE(prove_delegation(c.st, wrong_r, rng), ErrorCode::WitnessMismatch);
  auto out_of_range = c.wit;
  out_of_range.target_pos = 5;
  EXPECT_THROW_CODE(prove_delegation(c.st, out_of_range, rng), ErrorCode::WitnessMismatch);
}

TEST(DelegationProof, StatementMutationsFail) {
  SeededRandom rng(5);
  auto c = make_delegation(5, 3, 2, rng);
  const Proof p = prove_delegation(c.st, c.wit, rng);
  ASSERT_TRUE(verify_delegation(c.st, p));

  auto reordered = c.st;
  std::swap(reordered.anon_set[0], reordered.anon_set[1]);
  EXPECT_FALSE(verify_delegation(reordered, p));

  auto replaced = c.st;
  replaced.anon_set[4] = 9;
  EXPECT_FALSE(verify_delegation(replaced, p));

  auto dup = c.st;
  dup.anon_set[1] = dup.anon_set[0];
  EXPECT_FALSE(verify_delegation(dup, p));

  auto swapped_ct = c.st;
  std::swap(swapped_ct.ct_vec[0], swapped_ct.ct_vec[2]);
  EXPECT_FALSE(verify_delegation(swapped_ct, p));

  auto more_tokens = c.st;
  more_tokens.tokens = 4;
  EXPECT_FALSE(verify_delegation(more_tokens, p));

  auto other_voter = c.st;
  other_voter.voter = 1;
  EXPECT_FALSE(verify_delegation(other_voter, p));

  auto other_root = c.st;
  other_root.token_root = hash("leaf", Bytes{1});
  EXPECT_FALSE(verify_delegation(other_root, p));

  auto other_pk = c.st;
  other_pk.pk = enc_keygen(rng).pk;
  EXPECT_FALSE(verify_delegation(other_pk, p));

  auto fewer = c.st;
  fewer.ct_vec.pop_back();
  fewer.anon_set.pop_back();
  EXPECT_FALSE(verify_delegation(fewer, p));
}

TEST(DelegationProof, ProofTamperingFails) {
  SeededRandom rng(6);
  auto c = make_delegation(5, 3, 2, rng);
  const Proof p = prove_delegation(c.st, c.wit, rng);
  for (std::size_t i = 0; i < p.scalars.size(); ++i) {
    Proof q = p;
    q.scalars[i] = q.scalars[i] + Scalar::one();
    EXPECT_FALSE(verify_delegation(c.st, q)) << i;
  }
  for (std::size_t i = 0; i < p.points.size(); ++i) {
    Proof q = p;
    q.points[i] = q.points[i] + Point::generator();
    EXPECT_FALSE(verify_delegation(c.st, q)) << i;
  }
  Proof wrong_rel = p;
  wrong_rel.relation = Relation::Vote;
  EXPECT_FALSE(verify_delegation(c.st, wrong_rel));
}

TEST(DelegationProof, ByteFlipsNeverVerify) {
  SeededRandom rng(7);
  auto c = make_delegation(5, 3, 2, rng);
  const Bytes wire = prove_delegation(c.st, c.wit, rng).serialize();
  int rejected = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    Bytes b = wire;
    const std::size_t pos = rng.uniform(b.size());
    b[pos] ^= static_cast<std::uint8_t>(1 + rng.uniform(255));
    try {
      if (!verify_delegation(c.st, Proof::deserialize(b))) ++rejected;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InvalidEncoding);
      ++rejected;
    }
  }
  EXPECT_EQ(rejected, 1000);
}

TEST(DelegationProof, ForgedVectorsFail) {
  SeededRandom rng(8);
  const std::vector<std::vector<std::int64_t>> forged = {
      {0, 3, 0, 3, 0},   // two targets
      {0, 0, 0, 0, 0},   // no target
      {0, 0, 4, 0, 0},   // wrong total
      {1, 1, 1, 0, 0},   // right total, bad entries
      {0, 0, 6, -3, 0},  // right total, negative entry
      {0, 0, 2, 0, 0},   // under-delegation
  };
  for (const auto& plain : forged) {
    for (std::size_t pos = 0; pos < plain.size(); ++pos) {
      auto c = make_delegation(5, 3, 2, rng);
      set_plaintexts(c, plain, rng);
      c.wit.target_pos = pos;
      EXPECT_THROW_CODE(prove_delegation(c.st, c.wit, rng), ErrorCode::WitnessMismatch);
      EXPECT_FALSE(verify_delegation(c.st, detail::prove_delegation_unchecked(c.st, c.wit, rng)));
    }
  }
}

TEST(DelegationProof, ZeroTokensRejected) {
  SeededRandom rng(9);
  auto c = make_delegation(3, 1, 0, rng);
  c.st.tokens = 0;
  set_plaintexts(c, {0, 0, 0}, rng);
  EXPECT_FALSE(verify_delegation(c.st, detail::prove_delegation_unchecked(c.st, c.wit, rng)));
}

// ---- vote --------------------------------------------------------------------

TEST(VoteProof, ThreeOptionsChoiceYes) {
  SeededRandom rng(10);
  auto c = make_vote(3, 8, 0, rng);
  const Proof p = prove_vote(c.st, c.wit, rng);
  EXPECT_TRUE(verify_vote(c.st, p));
  EXPECT_EQ(decrypt(c.keys.sk, c.st.vote_vec[0], 100), 8);
  EXPECT_EQ(decrypt(c.keys.sk, c.st.vote_vec[1], 100), 0);
  EXPECT_EQ(decrypt(c.keys.sk, c.st.vote_vec[2], 100), 0);
}

TEST(VoteProof, CompleteForEveryChoice) {
  SeededRandom rng(11);
  for (std::size_t options : {1u, 2u, 3u, 5u}) {
    for (std::uint32_t j = 0; j < options; ++j) {
      auto c = make_vote(options, 5, j, rng);
      EXPECT_TRUE(verify_vote(c.st, prove_vote(c.st, c.wit, rng))) << options << " " << j;
    }
  }
  // A zero-power delegate can still prove a well-formed vote.
  auto z = make_vote(3, 0, 1, rng);
  EXPECT_TRUE(verify_vote(z.st, prove_vote(z.st, z.wit, rng)));
}

TEST(VoteProof, ProverRejectsBadWitness) {
  SeededRandom rng(12);
  auto c = make_vote(3, 8, 0, rng);
  auto w = c.wit;
  w.choice = 1;
  EXPECT_THROW_CODE(prove_vote(c.st, w, rng), ErrorCode::WitnessMismatch);
  w = c.wit;
  w.choice = 3;
  EXPECT_THROW_CODE(prove_vote(c.st, w, rng), ErrorCode::WitnessMismatch);
}

TEST(VoteProof, StatementMutationsFail) {
  SeededRandom rng(13);
  auto c = make_vote(3, 8, 0, rng);
  const Proof p = prove_vote(c.st, c.wit, rng);
  ASSERT_TRUE(verify_vote(c.st, p));

  auto other_power = c.st;
  other_power.power = c.powers[1];
  EXPECT_FALSE(verify_vote(other_power, p));

  auto other_delegate = c.st;
  other_delegate.delegate = 1;
  EXPECT_FALSE(verify_vote(other_delegate, p));

  auto other_root = c.st;
  other_root.snapshot_root = hash("node", Bytes{7});
  EXPECT_FALSE(verify_vote(other_root, p));

  auto permuted = c.st;
  std::swap(permuted.vote_vec[0], permuted.vote_vec[1]);
  EXPECT_FALSE(verify_vote(permuted, p));

  auto other_pk = c.st;
  other_pk.pk = enc_keygen(rng).pk;
  EXPECT_FALSE(verify_vote(other_pk, p));

  auto other_election = c.st;
  other_election.eid = c.st.eid + 1;
  EXPECT_FALSE(verify_vote(other_election, p));
}

TEST(VoteProof, ByteFlipsNeverVerify) {
  SeededRandom rng(14);
  auto c = make_vote(3, 8, 2, rng);
  const Bytes wire = prove_vote(c.st, c.wit, rng).serialize();
  int rejected = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    Bytes b = wire;
    b[rng.uniform(b.size())] ^= static_cast<std::uint8_t>(1 + rng.uniform(255));
    try {
      if (!verify_vote(c.st, Proof::deserialize(b))) ++rejected;
    } catch (const Error&) {
      ++rejected;
    }
  }
  EXPECT_EQ(rejected, 1000);
}

TEST(VoteProof, ForgedVectorsFail) {
  SeededRandom rng(15);
  // Multiples of the power ciphertext placed in each slot.
  const std::vector<std::vector<std::int64_t>> forged = {
      {1, 1, 0},  // double vote
      {0, 0, 0},  // nothing
      {2, 0, 0},  // doubled weight
      {2, -1, 0},  // right sum, bad entries
      {-1, 1, 1},
  };
  for (const auto& mult : forged) {
    for (std::uint32_t choice = 0; choice < 3; ++choice) {
      auto c = make_vote(3, 8, choice, rng);
      c.st.vote_vec.clear();
      c.wit.r_vec.clear();
      for (auto k : mult) {
        const Scalar r = Scalar::random(rng);
        c.wit.r_vec.push_back(r);
        const Ciphertext scaled{c.st.power.c1 * Scalar::from_i64(k), c.st.power.c2 * Scalar::from_i64(k)};
        c.st.vote_vec.push_back(ct_add(scaled, {Point::base_mul(r), c.keys.pk * r}));
      }
      EXPECT_THROW_CODE(prove_vote(c.st, c.wit, rng), ErrorCode::WitnessMismatch);
      EXPECT_FALSE(verify_vote(c.st, detail::prove_vote_unchecked(c.st, c.wit, rng)));
    }
  }
}

// ---- decryption --------------------------------------------------------------

TEST(DecryptionProof, CompleteAndSound) {
  SeededRandom rng(16);
  auto c = make_decryption({8, 2, 0}, rng);
  const Proof p = prove_decryption(c.st, c.keys.sk, rng);
  EXPECT_TRUE(verify_decryption(c.st, p));

  for (std::size_t i = 0; i < 3; ++i) {
    for (std::int64_t delta : {-1, 1}) {
      auto off = c.st;
      off.counts[i] += delta;
      EXPECT_FALSE(verify_decryption(off, p));
      EXPECT_THROW_CODE(prove_decryption(off, c.keys.sk, rng), ErrorCode::WitnessMismatch);
      EXPECT_FALSE(verify_decryption(off, detail::prove_decryption_unchecked(off, c.keys.sk, rng)));
    }
  }
  auto swapped = c.st;
  std::swap(swapped.counts[0], swapped.counts[1]);
  EXPECT_FALSE(verify_decryption(swapped, p));
}

TEST(DecryptionProof, CrossKeyFails) {
  SeededRandom rng(17);
  auto c = make_decryption({8, 2, 0}, rng);
  const auto other = enc_keygen(rng);
  EXPECT_THROW_CODE(prove_decryption(c.st, other.sk, rng), ErrorCode::WitnessMismatch);
  EXPECT_FALSE(verify_decryption(c.st, detail::prove_decryption_unchecked(c.st, other.sk, rng)));
  // Claiming the other key as pk breaks the ciphertext relation instead.
  auto st = c.st;
  st.pk = other.pk;
  EXPECT_FALSE(verify_decryption(st, detail::prove_decryption_unchecked(st, other.sk, rng)));
}

TEST(DecryptionProof, ByteFlipsNeverVerify) {
  SeededRandom rng(18);
  auto c = make_decryption({8, 2, 0}, rng);
  const Bytes wire = prove_decryption(c.st, c.keys.sk, rng).serialize();
  int rejected = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    Bytes b = wire;
    b[rng.uniform(b.size())] ^= static_cast<std::uint8_t>(1 + rng.uniform(255));
    try {
      if (!verify_decryption(c.st, Proof::deserialize(b))) ++rejected;
    } catch (const Error&) {
      ++rejected;
    }
  }
  EXPECT_EQ(rejected, 1000);
}

TEST(ProofCodec, RejectsMalformed) {
  EXPECT_THROW_CODE(Proof::deserialize(Bytes{}), ErrorCode::InvalidEncoding);
  EXPECT_THROW_CODE(Proof::deserialize(Bytes{9, 0, 0, 0, 0, 0, 0, 0, 0}), ErrorCode::InvalidEncoding);
  EXPECT_THROW_CODE(Proof::deserialize(Bytes{1, 0, 0, 0, 0, 0, 0, 0, 0, 0}), ErrorCode::InvalidEncoding);
  Proof p;
  p.relation = Relation::Decryption;
  EXPECT_EQ(Proof::deserialize(p.serialize()), p);
}

}  // namespace
}  // namespace kite
