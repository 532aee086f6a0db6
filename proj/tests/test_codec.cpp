#include <gtest/gtest.h>

#include "board_fixture.hpp"
#include "kite/json_codec.hpp"
#include "test_util.hpp"

namespace kite {
namespace {

// A history touching every command type, including rejected ones.
Board busy_board() {
  testing::World w({3, 5, 2, 4}, 8);
  w.voters[1].register_delegate(w.board);
  w.voters[2].register_delegate(w.board);
  w.transfer(0, 3, 1);
  w.voters[0].delegate(w.board, 2, 2, w.rng);
  w.voters[1].create_election(w.board, 1, "codec \"quoted\" desc");
  w.voters[1].start_election(w.board, 1);
  w.voters[1].vote_public(w.board, 1, 0);
  w.voters[2].vote_private(w.board, 1, 2, w.rng);
  w.board.c_tally(w.ta.tally_decrypt(1, w.board.state().elections.at(1).tallies, w.rng));
  w.voters[0].undelegate(w.board);
  w.board.c_unregister(2);
  w.board.c_unregister(2);  // rejected
  w.board.token_transfer(1, 0, 1);  // TransferLocked
  return std::move(w.board);
}

TEST(Codec, CommandsRoundTrip) {
  const Board b = busy_board();
  std::set<std::string> types;
  std::vector<Command> decoded;
  for (const auto& cmd : b.history()) {
    const json j = command_to_json(cmd);
    types.insert(j.at("type").get<std::string>());
    const Command back = command_from_json(json::parse(j.dump()));
    EXPECT_EQ(command_to_json(back), j);
    decoded.push_back(back);
  }
  EXPECT_EQ(types.size(), 12u);
  EXPECT_EQ(Board::replay(decoded).hash(), b.hash());
}

TEST(Codec, EventsAndStateRoundTrip) {
  const Board b = busy_board();
  for (const auto& e : b.events()) {
    const json j = e;
    EXPECT_EQ(json::parse(j.dump()).get<Event>(), e);
  }
  const json s = b.state();
  EXPECT_EQ(state_hash(json::parse(s.dump()).get<BoardState>()), b.hash());
  for (const auto& [eid, e] : b.state().elections) {
    const json je = e;
    const ElectionState back = je.get<ElectionState>();
    EXPECT_EQ(back.tallies, e.tallies);
    EXPECT_EQ(back.result, e.result);
    EXPECT_EQ(back.snapshot_root, e.snapshot_root);
    EXPECT_EQ(back.phase, e.phase);
  }
}

TEST(Codec, BinaryFieldsAreLowercaseHex) {
  const json p = Point::generator();
  ASSERT_TRUE(p.is_string());
  EXPECT_EQ(p.get<std::string>().size(), 64u);
  EXPECT_EQ(p.get<std::string>(), "e2f2ae0a6abc4e71a884a961c500515f58e30b6aa582dd8db6a65945e08d2d76");
  const json id = Point::identity();
  EXPECT_EQ(id.get<std::string>(), std::string(64, '0'));
  EXPECT_THROW_CODE(json("E2F2").get<Point>(), ErrorCode::InvalidEncoding);
  EXPECT_THROW_CODE(json(std::string(63, '0')).get<Point>(), ErrorCode::InvalidEncoding);
  EXPECT_THROW_CODE(json(std::string(64, 'g')).get<Digest>(), ErrorCode::InvalidEncoding);
}

TEST(Codec, MalformedCommands) {
  EXPECT_THROW_CODE(command_from_json(json{{"type", "launch"}}), ErrorCode::MalformedRequest);
  EXPECT_THROW_CODE(command_from_json(json{{"type", "register"}}), ErrorCode::MalformedRequest);
  EXPECT_THROW_CODE(command_from_json(json{{"type", "register"}, {"party", -1}}), ErrorCode::MalformedRequest);
  EXPECT_THROW_CODE(command_from_json(json::array()), ErrorCode::MalformedRequest);
  EXPECT_THROW_CODE(
      command_from_json(json{{"type", "vote_public"}, {"eid", 1}, {"party", 1}, {"option", 0},
                             {"snapshotProof", "00"}, {"power", {{"c1", "00"}, {"c2", "00"}}}}),
      ErrorCode::InvalidEncoding);
}

}  // namespace
}  // namespace kite
