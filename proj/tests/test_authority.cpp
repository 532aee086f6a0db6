#include <gtest/gtest.h>

#include <numeric>

#include "board_fixture.hpp"
#include "kite/percent.hpp"
#include "test_util.hpp"

namespace kite {
namespace {

// Largest b in [0, 10000] with b * sum <= 10000 * c, by binary search.
std::uint32_t oracle_bp(std::int64_t c, std::int64_t sum) {
  std::uint32_t lo = 0, hi = 10000;
  while (lo < hi) {
    const std::uint32_t mid = (lo + hi + 1) / 2;
    if (mid * static_cast<__int128>(sum) <= 10000 * static_cast<__int128>(c)) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return lo;
}

TEST(Percent, FixtureValues) {
  const std::vector<std::int64_t> a{8, 2, 0};
  EXPECT_EQ(basis_points(a).basis_points, (std::vector<std::uint32_t>{8000, 2000, 0}));
  const std::vector<std::int64_t> z{0, 0, 0};
  const auto pz = basis_points(z);
  EXPECT_TRUE(pz.no_votes);
  EXPECT_EQ(pz.basis_points, (std::vector<std::uint32_t>{0, 0, 0}));
  const std::vector<std::int64_t> t{1, 1, 1};
  const auto pt = basis_points(t);
  EXPECT_EQ(pt.basis_points, (std::vector<std::uint32_t>{3333, 3333, 3333}));
  EXPECT_FALSE(pt.no_votes);
  EXPECT_EQ(format_percentages(pt.basis_points), "yes 33.33% no 33.33% abstain 33.33%");
  EXPECT_EQ(format_percentages(basis_points(a).basis_points), "yes 80.00% no 20.00% abstain 0.00%");
  const std::vector<std::int64_t> neg{1, -1, 0};
  EXPECT_THROW(basis_points(neg), std::invalid_argument);
}

TEST(Percent, MatchesOracleScaleInvariantAndSumBounded) {
  SeededRandom rng(5);
  for (int trial = 0; trial < 5000; ++trial) {
    std::vector<std::int64_t> d(3);
    for (auto& x : d) x = static_cast<std::int64_t>(rng.uniform(trial % 2 ? 20 : 100000));
    const auto p = basis_points(d);
    const std::int64_t sum = std::accumulate(d.begin(), d.end(), std::int64_t{0});
    std::uint32_t total = 0;
    for (std::size_t i = 0; i < 3; ++i) {
      EXPECT_EQ(p.basis_points[i], sum == 0 ? 0u : oracle_bp(d[i], sum));
      total += p.basis_points[i];
    }
    EXPECT_EQ(p.no_votes, sum == 0);
    EXPECT_TRUE(total == 0 || (total >= 9998 && total <= 10000)) << total;
    const std::int64_t k = 1 + static_cast<std::int64_t>(rng.uniform(1000));
    std::vector<std::int64_t> scaled = d;
    for (auto& x : scaled) x *= k;
    EXPECT_EQ(basis_points(scaled), p);
  }
}

// ---- setup and roots ---------------------------------------------------------

TEST(AuthoritySetup, BundleVerifies) {
  SeededRandom rng(1);
  Authority ta = Authority::setup({3, 5, 2}, 3, rng);
  const SetupCmd& b = ta.bundle();
  EXPECT_TRUE(sig_verify(b.vk_sig, b.token_root.bytes, b.root_sig));
  EXPECT_EQ(b.token_root, token_tree(std::vector<std::uint64_t>{3, 5, 2}).root());
  EXPECT_EQ(b.pk_enc, Point::base_mul(ta.enc_keys().sk));
  EXPECT_EQ(ta.max_total(), 10u);
  Board board;
  EXPECT_TRUE(board.c_setup(b).ok());
}

TEST(AuthoritySetup, TokenBound) {
  SeededRandom rng(1);
  EXPECT_THROW_CODE(Authority::setup({3, 11, 2}, 3, rng, 10), ErrorCode::TokenOutOfBound);
  EXPECT_NO_THROW(Authority::setup({3, 10, 2}, 3, rng, 10));
}

TEST(AuthorityRefresh, NoTransfersResignsSameRoot) {
  SeededRandom rng(2);
  Authority ta = Authority::setup({3, 5, 2}, 3, rng);
  const RefreshRootCmd r = ta.refresh_root({});
  EXPECT_EQ(r.token_root, ta.bundle().token_root);
  EXPECT_TRUE(sig_verify(ta.sig_keys().vk, r.token_root.bytes, r.root_sig));
}

TEST(AuthorityRefresh, MatchesRecompute) {
  testing::World w({3, 5, 2});
  ASSERT_TRUE(w.board.token_transfer(0, 2, 2).ok());
  EXPECT_TRUE(w.board.state().root_stale);
  const RefreshRootCmd r = w.ta.refresh_root(transfers_since(w.board.events(), 0));
  EXPECT_EQ(r.tokens, (std::vector<std::uint64_t>{1, 5, 4}));
  EXPECT_EQ(r.token_root, token_tree(std::vector<std::uint64_t>{1, 5, 4}).root());
  EXPECT_EQ(w.ta.current_root(), r.token_root);
  ASSERT_TRUE(w.board.c_refresh_root(r).ok());
  EXPECT_FALSE(w.board.state().root_stale);
  EXPECT_EQ(w.ta.last_applied_seq(), 1u);
}

TEST(AuthorityRefresh, InconsistentEvents) {
  SeededRandom rng(3);
  Authority ta = Authority::setup({3, 5, 2}, 3, rng);
  const std::vector<TransferRecord> out_of_order{{5, 0, 1, 1}, {4, 1, 0, 1}};
  EXPECT_THROW_CODE(ta.refresh_root(out_of_order), ErrorCode::InconsistentEvents);
  const std::vector<TransferRecord> overdraft{{1, 0, 1, 4}};
  EXPECT_THROW_CODE(ta.refresh_root(overdraft), ErrorCode::InconsistentEvents);
  const std::vector<TransferRecord> unknown{{1, 0, 9, 1}};
  EXPECT_THROW_CODE(ta.refresh_root(unknown), ErrorCode::InconsistentEvents);
  // Failed refreshes leave the authority untouched.
  EXPECT_EQ(ta.token_list(), (std::vector<std::uint64_t>{3, 5, 2}));
  const std::vector<TransferRecord> ok{{3, 0, 1, 1}};
  ta.refresh_root(ok);
  EXPECT_THROW_CODE(ta.refresh_root(ok), ErrorCode::InconsistentEvents);  // replayed record
}

// ---- tally ------------------------------------------------------------------

std::vector<Ciphertext> encrypt_all(const Authority& ta, const std::vector<std::int64_t>& m, RandomSource& rng) {
  std::vector<Ciphertext> out;
  for (auto v : m) out.push_back(encrypt(ta.enc_keys().pk, v, Scalar::random(rng), ta.max_total()));
  return out;
}

TEST(AuthorityTally, Examples) {
  SeededRandom rng(4);
  Authority ta = Authority::setup({3, 5, 2}, 3, rng);
  struct Case {
    std::vector<std::int64_t> counts;
    std::vector<std::uint32_t> pct;
    bool no_votes;
  };
  for (const auto& c : {Case{{8, 2, 0}, {8000, 2000, 0}, false}, Case{{0, 0, 0}, {0, 0, 0}, true},
                        Case{{1, 1, 1}, {3333, 3333, 3333}, false}}) {
    const auto tallies = encrypt_all(ta, c.counts, rng);
    const TallyResult r = ta.decrypt_tally(7, tallies);
    EXPECT_EQ(r.counts, c.counts);
    EXPECT_EQ(r.percentages, c.pct);
    EXPECT_EQ(r.no_votes, c.no_votes);
    const TallyCmd cmd = ta.tally_decrypt(7, tallies, rng);
    EXPECT_EQ(cmd.percentages, c.pct);
    EXPECT_TRUE(nizk::verify_decryption({ta.enc_keys().pk, tallies, cmd.counts}, cmd.proof));
  }
}

TEST(AuthorityTally, OwnProofsAlwaysVerify) {
  SeededRandom rng(5);
  Authority ta = Authority::setup({40, 30, 30}, 3, rng);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::int64_t> counts(3);
    for (auto& c : counts) c = static_cast<std::int64_t>(rng.uniform(34));
    const auto tallies = encrypt_all(ta, counts, rng);
    const TallyCmd cmd = ta.tally_decrypt(1, tallies, rng);
    ASSERT_EQ(cmd.counts, counts);
    ASSERT_TRUE(nizk::verify_decryption({ta.enc_keys().pk, tallies, cmd.counts}, cmd.proof));
  }
}

TEST(AuthorityTally, MalformedTallyIsDlogNotFound) {
  SeededRandom rng(6);
  Authority ta = Authority::setup({3, 5, 2}, 3, rng);
  std::vector<Ciphertext> tallies = encrypt_all(ta, {1, 2, 3}, rng);
  tallies[1] = encrypt(ta.enc_keys().pk, 11, Scalar::random(rng), 100);
  EXPECT_THROW_CODE(ta.decrypt_tally(1, tallies), ErrorCode::DlogNotFound);
}

TEST(AuthorityRestore, FromPersistedKeys) {
  SeededRandom rng(7);
  Authority ta = Authority::setup({3, 5, 2}, 3, rng);
  Authority back(ta.enc_keys(), ta.sig_keys(), ta.token_list(), 3);
  EXPECT_EQ(back.current_root(), ta.current_root());
  EXPECT_EQ(back.bundle().pk_enc, ta.bundle().pk_enc);
  EXPECT_EQ(back.bundle().vk_sig, ta.bundle().vk_sig);
}

}  // namespace
}  // namespace kite
