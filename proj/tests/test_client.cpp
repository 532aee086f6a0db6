#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "board_fixture.hpp"
#include "test_util.hpp"

namespace kite {
namespace {

using testing::World;

std::vector<std::uint64_t> pool_tokens(std::size_t delegates) {
  std::vector<std::uint64_t> tokens{3};
  for (std::size_t i = 0; i < delegates; ++i) tokens.push_back(1 + i % 4);
  return tokens;
}

// Party 0 plus `delegates` registered parties.
World pool_world(std::size_t delegates, std::uint64_t seed = 1) {
  World w(pool_tokens(delegates), seed);
  for (PartyIndex p = 1; p <= delegates; ++p) w.board.c_register(p);
  return w;
}

TEST(VoterSetup, LooksUpTokens) {
  const std::vector<std::uint64_t> tokens{3, 5, 2};
  const VoterState s = voter_setup(tokens, 0);
  EXPECT_EQ(s.tokens, 3u);
  EXPECT_EQ(s.role, Role::Voter);
  EXPECT_FALSE(s.delegation.has_value());
  EXPECT_THROW_CODE(voter_setup(tokens, 3), ErrorCode::UnknownParty);
}

TEST(VoterState, PersistenceRoundTrip) {
  World w({3, 5, 2});
  ASSERT_TRUE(w.voters[1].register_delegate(w.board).ok());
  ASSERT_TRUE(w.voters[2].register_delegate(w.board).ok());
  ASSERT_TRUE(w.voters[0].delegate(w.board, 2, 2, w.rng).ok());
  const auto dir = std::filesystem::temp_directory_path() / "kite-client-test";
  std::filesystem::create_directories(dir);
  for (PartyIndex p = 0; p < 3; ++p) {
    const auto file = dir / ("party-" + std::to_string(p) + ".json");
    w.voters[p].save(file);
    const Voter back = Voter::load(file);
    EXPECT_EQ(back.state(), w.voters[p].state());
  }
  std::filesystem::remove_all(dir);
  const nlohmann::json j = w.voters[0].state();
  EXPECT_EQ(j.at("party"), 0);
  EXPECT_EQ(j.at("tokens"), 3);
  EXPECT_TRUE(j.at("delegation").is_string());
  EXPECT_EQ(j.get<VoterState>(), w.voters[0].state());
  EXPECT_EQ(nlohmann::json(w.voters[1].state()).at("role"), "delegate");
}

TEST(VoterState, LoadRejectsGarbage) {
  const auto file = std::filesystem::temp_directory_path() / "kite-client-garbage.json";
  std::ofstream(file) << "{\"party\": 1}";
  EXPECT_THROW(Voter::load(file), Error);
  std::filesystem::remove(file);
}

TEST(BuildDelegation, FiveOfTwentyVerifiesAtBoard) {
  World w = pool_world(20);
  auto out = w.voters[0].delegate(w.board, 7, 5, w.rng);
  ASSERT_TRUE(out.ok()) << out.event.payload.dump();
  const auto& d = *w.voters[0].state().delegation;
  EXPECT_EQ(d.anon_set.size(), 5u);
  EXPECT_EQ(d.anon_set[d.target_pos], 7u);
  EXPECT_EQ(w.power(7), static_cast<std::int64_t>(pool_tokens(20)[7]) + 3);
}

TEST(BuildDelegation, ErrorsInOrder) {
  World w = pool_world(2);
  Voter strict(voter_setup(w.ta.token_list(), 0), ClientConfig{{5, 10, 20}});
  const std::vector<PartyIndex> pool{1, 2};
  EXPECT_THROW_CODE(strict.build_delegation(w.board.state(), 1, 3, pool, w.rng), ErrorCode::PoolTooSmall);
  EXPECT_THROW_CODE(strict.build_delegation(w.board.state(), 1, 2, pool, w.rng), ErrorCode::BadAnonymitySet);
  EXPECT_THROW_CODE(strict.build_delegation(w.board.state(), 0, 2, pool, w.rng), ErrorCode::TargetNotInPool);
  EXPECT_THROW_CODE(w.voters[0].delegate(w.board, 1, 3, w.rng), ErrorCode::PoolTooSmall);

  ASSERT_TRUE(w.voters[0].delegate(w.board, 1, 2, w.rng).ok());
  EXPECT_THROW_CODE(w.voters[0].build_delegation(w.board.state(), 1, 2, pool, w.rng), ErrorCode::AlreadyDelegated);

  World z({0, 5, 2});
  z.board.c_register(1);
  EXPECT_THROW_CODE(z.voters[0].build_delegation(z.board.state(), 1, 1, std::vector<PartyIndex>{1}, z.rng),
                    ErrorCode::ZeroPower);
}

TEST(BuildDelegation, TargetPositionIsUniform) {
  // Chi-square with 4 degrees of freedom; 18.47 is the 0.999 quantile.
  World w = pool_world(20, 3);
  const auto pool = active_delegates(w.board.state(), 0);
  ASSERT_EQ(pool.size(), 20u);
  std::array<int, 5> hits{};
  std::array<int, 21> member{};
  constexpr int kSamples = 1000;
  for (int i = 0; i < kSamples; ++i) {
    const auto b = w.voters[0].build_delegation(w.board.state(), 4, 5, pool, w.rng);
    ++hits[b.secret.target_pos];
    ASSERT_EQ(b.cmd.anon_set[b.secret.target_pos], 4u);
    for (auto q : b.cmd.anon_set) ++member[q];
  }
  double chi2 = 0;
  for (int h : hits) chi2 += (h - kSamples / 5.0) * (h - kSamples / 5.0) / (kSamples / 5.0);
  EXPECT_LT(chi2, 18.47);
  // Decoys are drawn from everyone but the target, never from outside.
  EXPECT_EQ(member[0], 0);
  EXPECT_EQ(member[4], kSamples);
  for (PartyIndex q = 1; q <= 20; ++q) {
    if (q != 4) EXPECT_GT(member[q], 0) << q;
  }
}

TEST(BuildDelegation, OutboundCommandCarriesNoSecret) {
  World w = pool_world(5);
  const auto b = w.voters[0].build_delegation(w.board.state(), 3, 5, active_delegates(w.board.state(), 0), w.rng);
  // The wire command has no field for targetPos or rVec; the ciphertexts
  // are all fresh (no identity components that would mark zero slots).
  for (const auto& ct : b.cmd.ct_vec) {
    EXPECT_FALSE(ct.c1.is_identity());
    EXPECT_FALSE(ct.c2.is_identity());
  }
  EXPECT_EQ(b.cmd.anon_set.size(), 5u);
}

TEST(Undelegation, RoundTripAndTwice) {
  World w = pool_world(10);
  const auto before = w.board.state().delegate_powers;
  ASSERT_TRUE(w.voters[0].delegate(w.board, 2, 10, w.rng).ok());
  const auto cmd = w.voters[0].build_undelegation();
  EXPECT_EQ(*w.board.state().delegation_ids[0], delegation_id(cmd.anon_set, cmd.ct_vec));
  ASSERT_TRUE(w.voters[0].undelegate(w.board).ok());
  EXPECT_EQ(w.board.state().delegate_powers, before);
  EXPECT_THROW_CODE(w.voters[0].build_undelegation(), ErrorCode::NothingToUndelegate);
  EXPECT_THROW_CODE(w.voters[0].undelegate(w.board), ErrorCode::NothingToUndelegate);
}

TEST(Undelegation, RejectedSubmissionKeepsSecret) {
  World w = pool_world(2);
  ASSERT_TRUE(w.voters[0].delegate(w.board, 1, 2, w.rng).ok());
  // Corrupt the board copy of the identifier so the submission is rejected.
  w.board.mutable_state_for_testing().delegation_ids[0] = hash("did", Bytes{});
  EXPECT_FALSE(w.voters[0].undelegate(w.board).ok());
  EXPECT_TRUE(w.voters[0].state().delegation.has_value());
}

TEST(ClientVote, PublicPrivateAndBadOption) {
  World w({3, 5, 2});
  ASSERT_TRUE(w.voters[1].register_delegate(w.board).ok());
  ASSERT_TRUE(w.voters[2].register_delegate(w.board).ok());
  ASSERT_TRUE(w.voters[1].create_election(w.board, 1, "e").ok());
  auto [bad_start, none] = w.voters[2].start_election(w.board, 1);
  EXPECT_EQ(bad_start.error, ErrorCode::NotCreator);
  EXPECT_TRUE(none.empty());
  auto [started, powers] = w.voters[1].start_election(w.board, 1);
  ASSERT_TRUE(started.ok());
  EXPECT_EQ(powers, w.board.state().elections.at(1).snapshot_powers);

  const std::size_t events = w.board.events().size();
  EXPECT_THROW_CODE(w.voters[1].vote_public(w.board, 1, 5), ErrorCode::BadOption);
  EXPECT_THROW_CODE(w.voters[1].vote_private(w.board, 1, 3, w.rng), ErrorCode::BadOption);
  EXPECT_EQ(w.board.events().size(), events);  // no board call

  ASSERT_TRUE(w.voters[2].vote_private(w.board, 1, 2, w.rng).ok());
  EXPECT_EQ(w.voters[2].vote_private(w.board, 1, 2, w.rng).error, ErrorCode::AlreadyVoted);
  ASSERT_TRUE(w.voters[1].vote_public(w.board, 1, 1).ok());
  EXPECT_EQ(w.tallies(1), (std::vector<std::int64_t>{0, 5, 2}));
}

TEST(ClientVote, PrivateVoteRerandomizesPower) {
  World w({3, 5, 2});
  ASSERT_TRUE(w.board.c_register(1).ok());
  ASSERT_TRUE(w.board.c_election_setup(1, 1, "e").ok());
  ASSERT_TRUE(w.board.c_election_start(1, 1).ok());
  for (int i = 0; i < 50; ++i) {
    const auto cmd = w.voters[1].build_private_vote(w.board.state(), 1, static_cast<std::uint32_t>(i % 3), w.rng);
    for (const auto& ct : cmd.vote_vec) {
      EXPECT_FALSE(ct.c1 == cmd.power.c1);
      EXPECT_FALSE(ct.c2 == cmd.power.c2);
    }
  }
}

TEST(ClientRoundTrip, AllSetSizesRestorePowers) {
  for (std::size_t size : {2u, 5u, 10u, 20u}) {
    World w = pool_world(24, size);
    const auto before = w.board.state().delegate_powers;
    std::vector<std::int64_t> plain_before;
    for (PartyIndex p = 0; p < before.size(); ++p) plain_before.push_back(w.power(p));
    ASSERT_TRUE(w.voters[0].delegate(w.board, 11, size, w.rng).ok());
    EXPECT_EQ(w.power(11), plain_before[11] + 3);
    ASSERT_TRUE(w.voters[0].undelegate(w.board).ok());
    for (PartyIndex p = 0; p < before.size(); ++p) EXPECT_EQ(w.power(p), plain_before[p]);
    EXPECT_EQ(w.board.state().delegate_powers, before);
  }
}

}  // namespace
}  // namespace kite
