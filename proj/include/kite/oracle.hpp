#pragma once
// Executable ideal voting functionality, a generator of valid traces, and a
// differential runner that plays a trace through the real stack (board,
// authority, honest clients) and the ideal model and compares what each
// side makes public.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kite/authority.hpp"
#include "kite/client.hpp"

namespace kite::oracle {

enum class Verb : std::uint8_t { Setup, Register, Unregister, Delegate, Undelegate, ESetup, EStart, Vote, Tally, Transfer };
std::string_view to_string(Verb verb);

struct TraceCommand {
  Verb verb = Verb::Setup;
  PartyIndex actor = 0;
  PartyIndex target = 0;      // delegate target, transfer recipient
  std::uint32_t set_size = 0; // delegate
  ElectionId eid = 0;
  std::uint32_t option = 0;
  bool private_vote = false;
  std::uint64_t amount = 0;   // transfer
  bool operator==(const TraceCommand&) const = default;
};

struct Trace {
  std::uint64_t seed = 0;
  std::uint32_t num_options = 3;
  std::vector<std::uint64_t> tokens;
  std::vector<TraceCommand> commands;
  bool operator==(const Trace&) const = default;
};

// Line-oriented text form:
//   kite-trace 1
//   seed 42
//   options 3
//   tokens 3 5 2
//   setup
//   register 1
//   delegate 0 1 2          actor target setSize
//   esetup 1 7              actor eid
//   vote 1 7 yes private    actor eid option mode
//   tally 7
//   transfer 0 2 1          from to amount
std::string format_trace(const Trace& trace);
// Throws Error(MalformedRequest).
Trace parse_trace(const std::string& text);

// What either side broadcasts, reduced to the fields the two models share.
// Delegation events carry only the delegator; private votes carry no option.
struct PublicEvent {
  std::string verb;
  PartyIndex party = 0;
  PartyIndex other = 0;
  ElectionId eid = 0;
  std::optional<std::uint32_t> option;
  std::uint64_t amount = 0;
  std::vector<std::uint32_t> percentages;
  bool operator==(const PublicEvent&) const = default;
};
std::string describe(const PublicEvent& e);

struct IdealElection {
  PartyIndex creator = 0;
  bool started = false;
  std::vector<std::uint8_t> voted;
  std::vector<std::uint64_t> power;  // t^eid
  std::vector<std::int64_t> counts;  // r^eid
  std::optional<std::vector<std::uint32_t>> percentages;
};

struct IdealState {
  bool setup = false;
  std::uint32_t num_options = 3;
  std::vector<std::uint8_t> reg;
  std::vector<PartyIndex> d;
  std::vector<std::uint64_t> t;
  std::map<ElectionId, IdealElection> elections;
};

// One clause of the functionality. Commands that fail its checks are
// ignored and broadcast nothing. Transfers are an extension: they move
// t between parties.
std::vector<PublicEvent> ideal_step(IdealState& state, const Trace& trace, const TraceCommand& cmd);

struct TraceBounds {
  std::uint32_t max_parties = 16;
  std::uint32_t max_elections = 4;
  std::uint32_t max_commands = 64;
  std::uint64_t max_tokens = 10;
  std::uint32_t max_set_size = 5;
};

// Deterministic in (seed, bounds). Every command satisfies both the real
// board's guards and the functionality's checks when it is emitted.
Trace trace_gen(std::uint64_t seed, const TraceBounds& bounds = {});

// Board events mapped onto PublicEvent; nullopt for plumbing events
// (root refresh). Rejections map to a "rejected" event.
std::optional<PublicEvent> public_view(const Event& e);

struct Verdict {
  bool equal = true;
  std::size_t index = 0;  // command index of the first divergence
  std::string detail;
};

// Called after each real step; used to inject board faults in tests.
using FaultHook = std::function<void(Board& board, std::size_t index, const TraceCommand& cmd)>;

struct RealRun {
  Board board;
  std::optional<Authority> authority;
  std::vector<Voter> voters;
};

struct DiffResult {
  Verdict verdict;
  RealRun real;
  IdealState ideal;
};

DiffResult differential_run(const Trace& trace, const FaultHook& fault = {});

}  // namespace kite::oracle
