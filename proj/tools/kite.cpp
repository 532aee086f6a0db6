// Command-line front end: runs a node, drives every protocol action against
// one over HTTP, and hosts the simulation, differential and benchmark tools.
// Output is one key=value record per line.

#include <chrono>
#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "kite/client.hpp"
#include "kite/json_codec.hpp"
#include "kite/node.hpp"
#include "kite/oracle.hpp"

namespace fs = std::filesystem;
using namespace kite;
using nlohmann::json;

namespace {

struct Globals {
  std::string node;
  std::string state_dir;
};

std::vector<std::uint64_t> read_token_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::NotFound, "token file " + path);
  std::map<PartyIndex, std::uint64_t> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::int64_t party = 0, tokens = 0;
    if (!(ls >> party)) continue;
    std::string extra;
    if (!(ls >> tokens) || (ls >> extra) || party < 0 || tokens < 0 || party > INT32_MAX) {
      throw Error(ErrorCode::MalformedRequest, path + ":" + std::to_string(line_no) + ": expected 'partyIndex tokens'");
    }
    if (!entries.emplace(static_cast<PartyIndex>(party), static_cast<std::uint64_t>(tokens)).second) {
      throw Error(ErrorCode::MalformedRequest, "party " + std::to_string(party) + " listed twice");
    }
  }
  std::vector<std::uint64_t> tokens;
  for (const auto& [p, t] : entries) {
    if (p != tokens.size()) throw Error(ErrorCode::MalformedRequest, "party indices must be 0..n-1");
    tokens.push_back(t);
  }
  if (tokens.empty()) throw Error(ErrorCode::MalformedRequest, "token file is empty");
  return tokens;
}

void print_scalar_fields(const json& payload) {
  for (const auto& [key, value] : payload.items()) {
    if (value.is_primitive() && !value.is_null()) {
      std::cout << key << '=' << (value.is_string() ? value.get<std::string>() : value.dump()) << '\n';
    }
  }
}

int report(const Outcome& o) {
  std::cout << "event=" << to_string(o.event.kind) << '\n' << "seq=" << o.event.seq << '\n';
  print_scalar_fields(o.event.payload);
  if (!o.ok()) {
    std::cerr << "error=" << to_string(o.error) << '\n';
    return 1;
  }
  return 0;
}

int report_response(const HttpResponse& r) {
  if (r.status != 200 && !r.body.contains("event")) {
    throw Error(error_code_from_string(r.body.value("error", std::string("Unavailable"))),
                r.body.value("message", std::string()));
  }
  const int rc = report(outcome_from_response(r));
  if (r.body.contains("followUp")) {
    for (const auto& e : r.body["followUp"]) std::cout << "followUp=" << e.at("kind").get<std::string>() << '\n';
  }
  return rc;
}

fs::path voter_file(const Globals& g, PartyIndex p) { return fs::path(g.state_dir) / ("party-" + std::to_string(p) + ".json"); }

ClientConfig remote_client_config(RemoteBoard& board) {
  const HttpResponse r = board.call("GET", "/config");
  if (r.status != 200) throw Error(ErrorCode::Unavailable, "cannot read node config");
  return ClientConfig{r.body.at("setSizes").get<std::vector<std::size_t>>()};
}

Voter load_voter(const Globals& g, RemoteBoard& board, PartyIndex p) {
  const ClientConfig config = remote_client_config(board);
  if (fs::exists(voter_file(g, p))) return Voter::load(voter_file(g, p), config);
  const BoardState view = board.snapshot();
  if (!view.initialized) throw Error(ErrorCode::NotInitialized);
  return Voter(voter_setup(view.ledger.balances, p), config);
}

void save_voter(const Globals& g, const Voter& v) {
  fs::create_directories(g.state_dir);
  v.save(voter_file(g, v.party()));
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoul(item));
    } catch (const std::exception&) {
      throw Error(ErrorCode::MalformedRequest, "bad size list " + text);
    }
  }
  return out;
}

volatile std::sig_atomic_t g_stop = 0;

void on_signal(int) { g_stop = 1; }

struct BenchResult {
  double prove_ms = 0;
  double verify_ms = 0;
  std::size_t proof_bytes = 0;
  bool all_verified = true;
};

BenchResult bench(const std::string& relation, std::size_t size, int iterations) {
  using clock = std::chrono::steady_clock;
  SeededRandom rng(size);
  const EncKeyPair keys = enc_keygen(rng);
  BenchResult out;
  double prove_total = 0, verify_total = 0;
  auto ms = [](auto d) { return std::chrono::duration<double, std::milli>(d).count(); };

  for (int it = 0; it < iterations; ++it) {
    if (relation == "delegation") {
      std::vector<std::uint64_t> tokens(std::max<std::size_t>(size, 1), 1);
      tokens[0] = 7;
      const MerkleTree tree = token_tree(tokens);
      nizk::DelegationStatement st;
      st.pk = keys.pk;
      st.tokens = 7;
      st.token_root = tree.root();
      st.token_proof = tree.prove(0);
      st.voter = 0;
      nizk::DelegationWitness w;
      w.target_pos = rng.uniform(size);
      for (std::size_t k = 0; k < size; ++k) {
        st.anon_set.push_back(static_cast<PartyIndex>(k + 1));
        w.r_vec.push_back(Scalar::random(rng));
        st.ct_vec.push_back(encrypt(keys.pk, k == w.target_pos ? 7 : 0, w.r_vec.back(), 1000));
      }
      auto t0 = clock::now();
      const nizk::Proof proof = nizk::prove_delegation(st, w, rng);
      auto t1 = clock::now();
      out.all_verified &= nizk::verify_delegation(st, proof);
      auto t2 = clock::now();
      prove_total += ms(t1 - t0);
      verify_total += ms(t2 - t1);
      out.proof_bytes = proof.serialize().size();
    } else if (relation == "vote") {
      std::vector<Ciphertext> powers(4);
      const Scalar rp = Scalar::random(rng);
      powers[1] = encrypt(keys.pk, 9, rp, 1000);
      const MerkleTree tree = power_tree(powers);
      nizk::VoteStatement st{keys.pk, powers[1], {}, 1, tree.root(), tree.prove(1)};
      nizk::VoteWitness w;
      w.choice = static_cast<std::uint32_t>(rng.uniform(size));
      for (std::size_t j = 0; j < size; ++j) {
        w.r_vec.push_back(Scalar::random(rng));
        st.vote_vec.push_back(j == w.choice ? rerandomize(keys.pk, st.power, w.r_vec.back())
                                            : encrypt(keys.pk, 0, w.r_vec.back(), 1000));
      }
      auto t0 = clock::now();
      const nizk::Proof proof = nizk::prove_vote(st, w, rng);
      auto t1 = clock::now();
      out.all_verified &= nizk::verify_vote(st, proof);
      auto t2 = clock::now();
      prove_total += ms(t1 - t0);
      verify_total += ms(t2 - t1);
      out.proof_bytes = proof.serialize().size();
    } else if (relation == "decryption") {
      nizk::DecryptionStatement st{keys.pk, {}, {}};
      for (std::size_t i = 0; i < size; ++i) {
        const auto d = static_cast<std::int64_t>(rng.uniform(100));
        st.counts.push_back(d);
        st.tallies.push_back(encrypt(keys.pk, d, Scalar::random(rng), 1000));
      }
      auto t0 = clock::now();
      const nizk::Proof proof = nizk::prove_decryption(st, keys.sk, rng);
      auto t1 = clock::now();
      out.all_verified &= nizk::verify_decryption(st, proof);
      auto t2 = clock::now();
      prove_total += ms(t1 - t0);
      verify_total += ms(t2 - t1);
      out.proof_bytes = proof.serialize().size();
    } else {
      throw Error(ErrorCode::MalformedRequest, "relation must be delegation, vote or decryption");
    }
  }
  out.prove_ms = prove_total / iterations;
  out.verify_ms = verify_total / iterations;
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kite: private delegation governance node and client"};
  app.require_subcommand(1);
  Globals g;
  const char* env_node = std::getenv("NODE_URL");
  g.node = env_node ? env_node : "http://127.0.0.1:8080";
  const char* env_state = std::getenv("KITE_STATE_DIR");
  g.state_dir = env_state ? env_state : "kite-client";
  app.add_option("--node", g.node, "node URL (default $NODE_URL)");
  app.add_option("--state-dir", g.state_dir, "client state directory (default $KITE_STATE_DIR or ./kite-client)");

  // serve
  NodeConfig node_cfg;
  std::string sizes_text = "5,10,20";
  bool no_authority = false;
  auto* serve = app.add_subcommand("serve", "run a node");
  serve->add_option("--host", node_cfg.host);
  serve->add_option("--port", node_cfg.port);
  serve->add_option("--data-dir", node_cfg.data_dir);
  serve->add_option("--group", node_cfg.group_id);
  serve->add_option("--sizes", sizes_text, "supported anonymity-set sizes");
  serve->add_option("--options", node_cfg.num_options, "number of vote options");
  serve->add_flag("--no-authority", no_authority, "do not run the authority in-process");

  std::string token_file;
  std::uint32_t setup_options = 3;
  auto* setup = app.add_subcommand("setup", "initialize the board from a token file");
  setup->add_option("--tokens", token_file, "file of 'partyIndex tokens' lines")->required();
  setup->add_option("--options", setup_options);

  PartyIndex party = 0, to = 0;
  std::size_t anonymity = 0;
  ElectionId eid = 0;
  std::string desc, choice;
  bool private_vote = false;
  std::uint64_t amount = 0;

  auto* reg = app.add_subcommand("register", "register as a delegate");
  reg->add_option("--party", party)->required();
  auto* unreg = app.add_subcommand("unregister", "unregister as a delegate");
  unreg->add_option("--party", party)->required();
  auto* del = app.add_subcommand("delegate", "delegate privately to an active delegate");
  del->add_option("--from", party)->required();
  del->add_option("--to", to)->required();
  del->add_option("--anonymity", anonymity, "anonymity-set size")->required();
  auto* undel = app.add_subcommand("undelegate", "withdraw the outstanding delegation");
  undel->add_option("--party", party)->required();

  auto* election = app.add_subcommand("election", "create or start an election");
  election->require_subcommand(1);
  auto* ecreate = election->add_subcommand("create");
  ecreate->add_option("--eid", eid)->required();
  ecreate->add_option("--desc", desc);
  ecreate->add_option("--party", party, "creator (default 0)");
  auto* estart = election->add_subcommand("start");
  estart->add_option("--eid", eid)->required();
  estart->add_option("--party", party, "creator (default 0)");

  auto* vote = app.add_subcommand("vote", "vote with delegated power");
  vote->add_option("--eid", eid)->required();
  vote->add_option("--party", party)->required();
  vote->add_option("--choice", choice, "option name or index")->required();
  vote->add_flag("--private", private_vote);

  auto* tally = app.add_subcommand("tally", "decrypt and publish an election result");
  tally->add_option("--eid", eid)->required();

  auto* transfer = app.add_subcommand("transfer", "move tokens between unlocked parties");
  transfer->add_option("--from", party)->required();
  transfer->add_option("--to", to)->required();
  transfer->add_option("--amount", amount)->required();

  auto* state = app.add_subcommand("state", "print a board summary");

  std::uint64_t seed = 0;
  std::uint32_t commands = 64;
  std::string trace_out;
  auto* simulate = app.add_subcommand("simulate", "generate a trace and run it through both models");
  simulate->add_option("--seed", seed)->required();
  simulate->add_option("--commands", commands);
  simulate->add_option("--trace-out", trace_out, "write the trace to this file");

  std::uint64_t seeds = 100, first_seed = 0;
  auto* diff = app.add_subcommand("diff-test", "differential test over many seeds");
  diff->add_option("--seeds", seeds);
  diff->add_option("--start", first_seed);

  std::string relation = "delegation";
  std::size_t size = 32;
  int iterations = 5;
  auto* bench_cmd = app.add_subcommand("bench", "time proving and verification");
  bench_cmd->add_option("--relation", relation)->check(CLI::IsMember({"delegation", "vote", "decryption"}));
  bench_cmd->add_option("--size", size);
  bench_cmd->add_option("--iterations", iterations)->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve) {
      node_cfg.set_sizes = parse_sizes(sizes_text);
      node_cfg.in_process_authority = !no_authority;
      Node node(node_cfg);
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      const int port = node.start_background();
      std::cout << "listening=" << node_cfg.host << ':' << port << '\n'
                << "events=" << node.events_from(0).size() << '\n'
                << "stateHash=" << to_hex(node.state_hash().bytes) << std::endl;
      while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
      node.stop();
      return 0;
    }
    if (*bench_cmd) {
      if (size == 0) throw Error(ErrorCode::MalformedRequest, "size must be positive");
      const BenchResult r = bench(relation, size, iterations);
      std::cout << "relation=" << relation << "\nsize=" << size << "\niterations=" << iterations
                << "\nprove_ms=" << r.prove_ms << "\nverify_ms=" << r.verify_ms << "\nproof_bytes=" << r.proof_bytes
                << "\nverified=" << (r.all_verified ? "true" : "false") << '\n';
      return r.all_verified ? 0 : 1;
    }
    if (*simulate) {
      oracle::TraceBounds bounds;
      bounds.max_commands = commands;
      const oracle::Trace trace = oracle::trace_gen(seed, bounds);
      if (!trace_out.empty()) std::ofstream(trace_out) << oracle::format_trace(trace);
      const auto res = oracle::differential_run(trace);
      std::cout << "seed=" << seed << "\ncommands=" << trace.commands.size() << "\nparties=" << trace.tokens.size()
                << "\nverdict=" << (res.verdict.equal ? "Equal" : "Divergence") << '\n';
      for (const auto& [id, e] : res.real.board.state().elections) {
        std::cout << "election=" << id << " phase=" << to_string(e.phase);
        if (e.result) std::cout << " result=" << format_percentages(*e.result);
        std::cout << '\n';
      }
      if (!res.verdict.equal) {
        std::cout << "divergenceIndex=" << res.verdict.index << "\ndetail=" << res.verdict.detail << '\n';
        return 1;
      }
      std::cout << "stateHash=" << to_hex(res.real.board.hash().bytes) << '\n';
      return 0;
    }
    if (*diff) {
      std::uint64_t equal = 0;
      for (std::uint64_t s = first_seed; s < first_seed + seeds; ++s) {
        const auto res = oracle::differential_run(oracle::trace_gen(s));
        if (res.verdict.equal) {
          ++equal;
        } else {
          std::cout << "seed=" << s << " divergenceIndex=" << res.verdict.index << " detail=" << res.verdict.detail
                    << '\n';
        }
      }
      std::cout << equal << '/' << seeds << " Equal\n";
      return equal == seeds ? 0 : 1;
    }

    RemoteBoard board(g.node);
    if (*setup) {
      const auto tokens = read_token_file(token_file);
      return report_response(board.call("POST", "/setup", {{"tokens", tokens}, {"numOptions", setup_options}}));
    }
    if (*reg || *unreg) {
      Voter v = load_voter(g, board, party);
      const Outcome o = *reg ? v.register_delegate(board) : v.unregister_delegate(board);
      if (o.ok()) save_voter(g, v);
      return report(o);
    }
    if (*del) {
      Voter v = load_voter(g, board, party);
      SystemRandom rng;
      const Outcome o = v.delegate(board, to, anonymity, rng);
      // The secret is needed to undelegate; keep it before anything else.
      if (o.ok()) save_voter(g, v);
      return report(o);
    }
    if (*undel) {
      Voter v = load_voter(g, board, party);
      const Outcome o = v.undelegate(board);
      if (o.ok()) save_voter(g, v);
      return report(o);
    }
    if (*ecreate) {
      return report(board.submit(ElectionSetupCmd{party, eid, desc}));
    }
    if (*estart) {
      const Outcome o = board.submit(ElectionStartCmd{party, eid});
      return report(o);
    }
    if (*vote) {
      Voter v = load_voter(g, board, party);
      const BoardState view = board.snapshot();
      const std::uint32_t option = parse_option(choice, view.initialized ? view.params.num_options : 3);
      SystemRandom rng;
      return report(private_vote ? v.vote_private(board, eid, option, rng) : v.vote_public(board, eid, option));
    }
    if (*tally) {
      const HttpResponse r = board.call("POST", "/elections/" + std::to_string(eid) + "/tally", json::object());
      const Outcome o = outcome_from_response(r);
      if (o.ok()) {
        const auto pct = o.event.payload.at("percentages").get<std::vector<std::uint32_t>>();
        std::cout << format_percentages(pct) << '\n';
        std::cout << "eid=" << eid << '\n';
        const BoardState view = board.snapshot();
        for (std::uint32_t i = 0; i < pct.size(); ++i) {
          std::cout << option_name(i, view.params.num_options) << '=' << pct[i] << '\n';
        }
        std::cout << "noVotes=" << (o.event.payload.at("noVotes").get<bool>() ? "true" : "false") << '\n';
        return 0;
      }
      return report(o);
    }
    if (*transfer) {
      return report_response(board.call("POST", "/transfer", {{"from", party}, {"to", to}, {"amount", amount}}));
    }
    if (*state) {
      const HttpResponse r = board.call("GET", "/state");
      const BoardState s = r.body.at("state").get<BoardState>();
      std::cout << "initialized=" << (s.initialized ? "true" : "false") << '\n'
                << "stateHash=" << r.body.at("stateHash").get<std::string>() << '\n';
      for (PartyIndex p = 0; p < s.party_count(); ++p) {
        std::cout << "party=" << p << " tokens=" << s.ledger.balances[p] << " locked=" << int(s.ledger.locks[p])
                  << " active=" << int(s.active[p]) << '\n';
      }
      for (const auto& [id, e] : s.elections) {
        std::cout << "election=" << id << " phase=" << to_string(e.phase) << " creator=" << e.creator << '\n';
      }
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error=" << to_string(e.code()) << '\n' << "message=" << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error=Internal\nmessage=" << e.what() << '\n';
    return 2;
  }
  return 0;
}
