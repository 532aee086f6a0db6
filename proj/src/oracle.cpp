#include "kite/oracle.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace kite::oracle {

namespace {

constexpr std::pair<Verb, std::string_view> kVerbs[] = {
    {Verb::Setup, "setup"},   {Verb::Register, "register"}, {Verb::Unregister, "unregister"},
    {Verb::Delegate, "delegate"}, {Verb::Undelegate, "undelegate"}, {Verb::ESetup, "esetup"},
    {Verb::EStart, "estart"}, {Verb::Vote, "vote"},         {Verb::Tally, "tally"},
    {Verb::Transfer, "transfer"},
};

Verb verb_from_string(std::string_view s) {
  for (const auto& [v, name] : kVerbs) {
    if (name == s) return v;
  }
  throw Error(ErrorCode::MalformedRequest, "unknown verb " + std::string(s));
}

PublicEvent ev(std::string verb, PartyIndex party = 0) {
  PublicEvent e;
  e.verb = std::move(verb);
  e.party = party;
  return e;
}

}  // namespace

std::string_view to_string(Verb verb) {
  for (const auto& [v, name] : kVerbs) {
    if (v == verb) return name;
  }
  return "?";
}

std::string format_trace(const Trace& trace) {
  std::ostringstream out;
  out << "kite-trace 1\nseed " << trace.seed << "\noptions " << trace.num_options << "\ntokens";
  for (auto t : trace.tokens) out << ' ' << t;
  out << '\n';
  for (const auto& c : trace.commands) {
    out << to_string(c.verb);
    switch (c.verb) {
      case Verb::Setup: break;
      case Verb::Register:
      case Verb::Unregister:
      case Verb::Undelegate: out << ' ' << c.actor; break;
      case Verb::Delegate: out << ' ' << c.actor << ' ' << c.target << ' ' << c.set_size; break;
      case Verb::ESetup:
      case Verb::EStart: out << ' ' << c.actor << ' ' << c.eid; break;
      case Verb::Vote:
        out << ' ' << c.actor << ' ' << c.eid << ' ' << option_name(c.option, trace.num_options) << ' '
            << (c.private_vote ? "private" : "public");
        break;
      case Verb::Tally: out << ' ' << c.eid; break;
      case Verb::Transfer: out << ' ' << c.actor << ' ' << c.target << ' ' << c.amount; break;
    }
    out << '\n';
  }
  return out.str();
}

Trace parse_trace(const std::string& text) {
  Trace trace;
  std::istringstream in(text);
  std::string line;
  bool header = false;
  auto bad = [](const std::string& l) { return Error(ErrorCode::MalformedRequest, "trace line: " + l); };
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (!header) {
      int version = 0;
      if (word != "kite-trace" || !(ls >> version) || version != 1) throw bad(line);
      header = true;
      continue;
    }
    if (word == "seed") {
      if (!(ls >> trace.seed)) throw bad(line);
      continue;
    }
    if (word == "options") {
      if (!(ls >> trace.num_options)) throw bad(line);
      continue;
    }
    if (word == "tokens") {
      trace.tokens.clear();
      std::uint64_t t;
      while (ls >> t) trace.tokens.push_back(t);
      if (!ls.eof()) throw bad(line);
      continue;
    }
    TraceCommand c;
    c.verb = verb_from_string(word);
    bool ok = true;
    switch (c.verb) {
      case Verb::Setup: break;
      case Verb::Register:
      case Verb::Unregister:
      case Verb::Undelegate: ok = static_cast<bool>(ls >> c.actor); break;
      case Verb::Delegate: ok = static_cast<bool>(ls >> c.actor >> c.target >> c.set_size); break;
      case Verb::ESetup:
      case Verb::EStart: ok = static_cast<bool>(ls >> c.actor >> c.eid); break;
      case Verb::Vote: {
        std::string option, mode;
        ok = static_cast<bool>(ls >> c.actor >> c.eid >> option >> mode) && (mode == "public" || mode == "private");
        if (ok) {
          c.option = parse_option(option, trace.num_options);
          c.private_vote = mode == "private";
        }
        break;
      }
      case Verb::Tally: ok = static_cast<bool>(ls >> c.eid); break;
      case Verb::Transfer: ok = static_cast<bool>(ls >> c.actor >> c.target >> c.amount); break;
    }
    std::string extra;
    if (!ok || (ls >> extra)) throw bad(line);
    trace.commands.push_back(c);
  }
  if (!header) throw Error(ErrorCode::MalformedRequest, "missing trace header");
  return trace;
}

std::string describe(const PublicEvent& e) {
  std::ostringstream out;
  out << e.verb << " party=" << e.party;
  if (e.verb == "transfer") out << " to=" << e.other << " amount=" << e.amount;
  if (e.eid) out << " eid=" << e.eid;
  if (e.option) out << " option=" << *e.option;
  if (!e.percentages.empty()) {
    out << " percentages=";
    for (std::size_t i = 0; i < e.percentages.size(); ++i) out << (i ? "," : "") << e.percentages[i];
  }
  return out.str();
}

std::vector<PublicEvent> ideal_step(IdealState& s, const Trace& trace, const TraceCommand& c) {
  const auto n = static_cast<PartyIndex>(s.t.size());
  const PartyIndex i = c.actor;
  if (c.verb == Verb::Setup) {
    if (s.setup || trace.tokens.empty()) return {};
    s.setup = true;
    s.num_options = trace.num_options;
    s.t = trace.tokens;
    s.reg.assign(s.t.size(), 0);
    s.d.resize(s.t.size());
    for (PartyIndex k = 0; k < s.d.size(); ++k) s.d[k] = k;
    return {ev("setup")};
  }
  if (!s.setup) return {};
  const bool actor_ok = i < n;

  switch (c.verb) {
    case Verb::Setup: return {};
    case Verb::Register:
      if (!actor_ok) return {};
      s.reg[i] = 1;
      return {ev("register", i)};
    case Verb::Unregister:
      if (!actor_ok) return {};
      s.reg[i] = 0;
      return {ev("unregister", i)};
    case Verb::Delegate:
      if (!actor_ok || c.target >= n || s.reg[i] != 0) return {};
      s.d[i] = c.target;
      return {ev("delegate", i)};
    case Verb::Undelegate:
      if (!actor_ok) return {};
      s.d[i] = i;
      return {ev("undelegate", i)};
    case Verb::ESetup: {
      if (!actor_ok || s.elections.contains(c.eid)) return {};
      IdealElection e;
      e.creator = i;
      e.voted.assign(n, 0);
      e.power.assign(n, 0);
      e.counts.assign(s.num_options, 0);
      s.elections.emplace(c.eid, std::move(e));
      auto out = ev("esetup", i);
      out.eid = c.eid;
      return {out};
    }
    case Verb::EStart: {
      auto it = s.elections.find(c.eid);
      if (it == s.elections.end() || it->second.creator != i) return {};
      auto& e = it->second;
      for (PartyIndex k = 0; k < n; ++k) {
        if (s.d[k] != k) {
          e.power[s.d[k]] += s.t[k];
        } else {
          e.power[k] += s.t[k];
        }
      }
      e.started = true;
      auto out = ev("estart", i);
      out.eid = c.eid;
      return {out};
    }
    case Verb::Vote: {
      auto it = s.elections.find(c.eid);
      if (!actor_ok || it == s.elections.end() || s.reg[i] != 1 || c.option >= s.num_options) return {};
      auto& e = it->second;
      e.voted[i] = 1;
      e.counts[c.option] += static_cast<std::int64_t>(e.power[i]);
      auto out = ev("vote", i);
      out.eid = c.eid;
      if (!c.private_vote) out.option = c.option;
      return {out};
    }
    case Verb::Tally: {
      auto it = s.elections.find(c.eid);
      if (it == s.elections.end()) return {};
      auto& e = it->second;
      e.percentages = basis_points(e.counts).basis_points;
      auto out = ev("tally");
      out.eid = c.eid;
      out.percentages = *e.percentages;
      return {out};
    }
    case Verb::Transfer: {
      if (!actor_ok || c.target >= n || c.target == i || c.amount == 0 || s.t[i] < c.amount) return {};
      s.t[i] -= c.amount;
      s.t[c.target] += c.amount;
      auto out = ev("transfer", i);
      out.other = c.target;
      out.amount = c.amount;
      return {out};
    }
  }
  return {};
}

namespace {

// Abstract model of the real board used to emit only commands whose guards
// hold on both sides.
struct GenModel {
  std::vector<std::uint64_t> balance;
  std::vector<std::uint8_t> active;
  std::vector<std::optional<PartyIndex>> delegated_to;
  std::vector<std::uint32_t> inbound;
  struct Election {
    PartyIndex creator = 0;
    bool started = false;
    bool tallied = false;
    std::vector<std::uint8_t> active_at_start;
    std::vector<std::uint8_t> voted;
  };
  std::map<ElectionId, Election> elections;

  bool locked(PartyIndex p) const { return active[p] || delegated_to[p].has_value(); }
};

}  // namespace

Trace trace_gen(std::uint64_t seed, const TraceBounds& bounds) {
  SeededRandom rng(seed);
  Trace trace;
  trace.seed = seed;
  trace.num_options = 3;
  const auto parties = static_cast<PartyIndex>(2 + rng.uniform(std::max<std::uint32_t>(bounds.max_parties, 2) - 1));
  for (PartyIndex p = 0; p < parties; ++p) trace.tokens.push_back(rng.uniform(bounds.max_tokens + 1));
  // At least one party holds tokens, so the total supply is positive.
  if (std::all_of(trace.tokens.begin(), trace.tokens.end(), [](auto t) { return t == 0; })) trace.tokens[0] = 1;

  GenModel m;
  m.balance = trace.tokens;
  m.active.assign(parties, 0);
  m.delegated_to.assign(parties, std::nullopt);
  m.inbound.assign(parties, 0);
  trace.commands.push_back({Verb::Setup});

  ElectionId next_eid = 1 + rng.uniform(1000);
  const std::uint32_t length = std::max<std::uint32_t>(bounds.max_commands, 2);

  while (trace.commands.size() < length) {
    std::vector<TraceCommand> options;
    std::vector<PartyIndex> actives;
    for (PartyIndex p = 0; p < parties; ++p) {
      if (m.active[p]) actives.push_back(p);
    }
    for (PartyIndex p = 0; p < parties; ++p) {
      if (!m.locked(p) && m.inbound[p] == 0) options.push_back({Verb::Register, p});
      if (m.active[p]) options.push_back({Verb::Unregister, p});
      if (!m.locked(p) && m.balance[p] >= 1) {
        for (auto q : actives) {
          if (q == p) continue;
          TraceCommand c{Verb::Delegate, p, q};
          const std::uint32_t pool = static_cast<std::uint32_t>(actives.size());
          c.set_size = 1 + static_cast<std::uint32_t>(rng.uniform(std::min(pool, bounds.max_set_size)));
          options.push_back(c);
        }
      }
      if (m.delegated_to[p]) options.push_back({Verb::Undelegate, p});
      if (m.elections.size() < bounds.max_elections) {
        TraceCommand c{Verb::ESetup, p};
        c.eid = next_eid;
        options.push_back(c);
      }
      if (!m.locked(p) && m.balance[p] >= 1) {
        for (PartyIndex q = 0; q < parties; ++q) {
          if (q == p || m.locked(q)) continue;
          TraceCommand c{Verb::Transfer, p, q};
          c.amount = 1 + rng.uniform(m.balance[p]);
          options.push_back(c);
        }
      }
    }
    for (const auto& [eid, e] : m.elections) {
      if (!e.started) {
        TraceCommand c{Verb::EStart, e.creator};
        c.eid = eid;
        options.push_back(c);
        continue;
      }
      if (e.tallied) continue;
      // Offered only now and then so elections stay open long enough to
      // collect votes.
      if (rng.uniform(4) == 0) {
        TraceCommand t{Verb::Tally};
        t.eid = eid;
        options.push_back(t);
      }
      for (PartyIndex p = 0; p < parties; ++p) {
        if (!e.active_at_start[p] || !m.active[p] || e.voted[p]) continue;
        TraceCommand c{Verb::Vote, p};
        c.eid = eid;
        c.option = static_cast<std::uint32_t>(rng.uniform(trace.num_options));
        c.private_vote = rng.uniform(2) == 1;
        options.push_back(c);
      }
    }
    if (options.empty()) break;
    // Pick a verb first, then an instance, so verbs with many instances
    // (transfers between every unlocked pair) do not crowd the rest out.
    std::map<Verb, std::vector<TraceCommand>> by_verb;
    for (const auto& o : options) by_verb[o.verb].push_back(o);
    auto pick = by_verb.begin();
    std::advance(pick, static_cast<std::ptrdiff_t>(rng.uniform(by_verb.size())));
    const TraceCommand c = pick->second[rng.uniform(pick->second.size())];
    switch (c.verb) {
      case Verb::Register: m.active[c.actor] = 1; break;
      case Verb::Unregister: m.active[c.actor] = 0; break;
      case Verb::Delegate:
        m.delegated_to[c.actor] = c.target;
        ++m.inbound[c.target];
        break;
      case Verb::Undelegate:
        --m.inbound[*m.delegated_to[c.actor]];
        m.delegated_to[c.actor].reset();
        break;
      case Verb::ESetup: {
        GenModel::Election e;
        e.creator = c.actor;
        m.elections.emplace(c.eid, std::move(e));
        next_eid += 1 + rng.uniform(3);
        break;
      }
      case Verb::EStart: {
        auto& e = m.elections.at(c.eid);
        e.started = true;
        e.active_at_start = m.active;
        e.voted.assign(parties, 0);
        break;
      }
      case Verb::Vote: m.elections.at(c.eid).voted[c.actor] = 1; break;
      case Verb::Tally: m.elections.at(c.eid).tallied = true; break;
      case Verb::Transfer:
        m.balance[c.actor] -= c.amount;
        m.balance[c.target] += c.amount;
        break;
      case Verb::Setup: break;
    }
    trace.commands.push_back(c);
  }
  return trace;
}

std::optional<PublicEvent> public_view(const Event& e) {
  const auto& p = e.payload;
  auto party = [&](const char* key) { return p.at(key).get<PartyIndex>(); };
  switch (e.kind) {
    case EventKind::Setup: return ev("setup");
    case EventKind::Registered: return ev("register", party("party"));
    case EventKind::Unregistered: return ev("unregister", party("party"));
    case EventKind::Delegated: return ev("delegate", party("party"));
    case EventKind::Undelegated: return ev("undelegate", party("party"));
    case EventKind::ElectionCreated: {
      auto out = ev("esetup", party("creator"));
      out.eid = p.at("eid").get<ElectionId>();
      return out;
    }
    case EventKind::ElectionStarted: {
      auto out = ev("estart", party("party"));
      out.eid = p.at("eid").get<ElectionId>();
      return out;
    }
    case EventKind::Voted: {
      auto out = ev("vote", party("party"));
      out.eid = p.at("eid").get<ElectionId>();
      if (p.at("mode") == "public") out.option = p.at("option").get<std::uint32_t>();
      return out;
    }
    case EventKind::Tallied: {
      auto out = ev("tally");
      out.eid = p.at("eid").get<ElectionId>();
      out.percentages = p.at("percentages").get<std::vector<std::uint32_t>>();
      return out;
    }
    case EventKind::Transferred: {
      auto out = ev("transfer", party("from"));
      out.other = party("to");
      out.amount = p.at("amount").get<std::uint64_t>();
      return out;
    }
    case EventKind::RootRefreshed: return std::nullopt;
    case EventKind::TransferLocked:
    case EventKind::Rejected: {
      auto out = ev("rejected");
      out.percentages.clear();
      return out;
    }
  }
  return std::nullopt;
}

namespace {

// Drives one trace command through the honest clients and the authority.
// Board rejections come back as events; client-side or authority failures
// throw.
void real_step(RealRun& run, const Trace& trace, const TraceCommand& c, RandomSource& rng) {
  Board& board = run.board;
  switch (c.verb) {
    case Verb::Setup: {
      run.authority = Authority::setup(trace.tokens, trace.num_options, rng);
      board.c_setup(run.authority->bundle());
      ClientConfig any{{}};
      for (PartyIndex p = 0; p < trace.tokens.size(); ++p) {
        run.voters.emplace_back(voter_setup(trace.tokens, p), any);
      }
      return;
    }
    case Verb::Register: run.voters.at(c.actor).register_delegate(board); return;
    case Verb::Unregister: run.voters.at(c.actor).unregister_delegate(board); return;
    case Verb::Delegate: run.voters.at(c.actor).delegate(board, c.target, c.set_size, rng); return;
    case Verb::Undelegate: run.voters.at(c.actor).undelegate(board); return;
    case Verb::ESetup:
      run.voters.at(c.actor).create_election(board, c.eid, "election " + std::to_string(c.eid));
      return;
    case Verb::EStart: run.voters.at(c.actor).start_election(board, c.eid); return;
    case Verb::Vote:
      if (c.private_vote) {
        run.voters.at(c.actor).vote_private(board, c.eid, c.option, rng);
      } else {
        run.voters.at(c.actor).vote_public(board, c.eid, c.option);
      }
      return;
    case Verb::Tally: {
      const ElectionState* e = board.state().find_election(c.eid);
      if (!e) throw Error(ErrorCode::UnknownElection);
      board.c_tally(run.authority->tally_decrypt(c.eid, e->tallies, rng));
      return;
    }
    case Verb::Transfer: {
      const Outcome o = board.token_transfer(c.actor, c.target, c.amount);
      if (o.ok()) {
        const auto transfers = transfers_since(board.events(), run.authority->last_applied_seq());
        board.c_refresh_root(run.authority->refresh_root(transfers));
      }
      return;
    }
  }
}

}  // namespace

DiffResult differential_run(const Trace& trace, const FaultHook& fault) {
  DiffResult res;
  SeededRandom rng(trace.seed ^ 0x9e3779b97f4a7c15ULL);
  auto diverge = [&](std::size_t idx, std::string detail) {
    res.verdict.equal = false;
    res.verdict.index = idx;
    res.verdict.detail = std::move(detail);
  };

  for (std::size_t idx = 0; idx < trace.commands.size(); ++idx) {
    const TraceCommand& c = trace.commands[idx];
    const std::size_t before = res.real.board.events().size();
    std::string failure;
    try {
      real_step(res.real, trace, c, rng);
    } catch (const Error& e) {
      failure = std::string(to_string(e.code())) + ": " + e.what();
    }
    if (fault) fault(res.real.board, idx, c);

    std::vector<PublicEvent> real_events;
    const auto& events = res.real.board.events();
    for (std::size_t k = before; k < events.size(); ++k) {
      if (auto v = public_view(events[k])) {
        if (v->verb == "rejected") failure = "board rejected: " + events[k].payload.dump();
        real_events.push_back(*v);
      }
    }
    const std::vector<PublicEvent> ideal_events = ideal_step(res.ideal, trace, c);
    if (!failure.empty()) {
      diverge(idx, std::string(to_string(c.verb)) + " failed in real stack: " + failure);
      return res;
    }
    if (real_events != ideal_events) {
      std::string detail = std::string(to_string(c.verb)) + ": real [";
      for (const auto& e : real_events) detail += describe(e) + ";";
      detail += "] ideal [";
      for (const auto& e : ideal_events) detail += describe(e) + ";";
      diverge(idx, detail + "]");
      return res;
    }
  }

  // Final results, election by election.
  for (const auto& [eid, ie] : res.ideal.elections) {
    const ElectionState* re = res.real.board.state().find_election(eid);
    if (!re) {
      diverge(trace.commands.size(), "election " + std::to_string(eid) + " missing on board");
      return res;
    }
    if (ie.percentages != re->result) {
      diverge(trace.commands.size(), "final percentages differ for election " + std::to_string(eid));
      return res;
    }
  }
  return res;
}

}  // namespace kite::oracle
