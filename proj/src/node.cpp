#include "kite/node.hpp"

#include <fcntl.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "kite/client.hpp"
#include "kite/json_codec.hpp"

namespace kite {

using nlohmann::json;

namespace {

std::vector<std::string> split_path(const std::string& path) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : path) {
    if (c == '/') {
      if (!cur.empty()) parts.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) parts.push_back(std::move(cur));
  return parts;
}

std::uint64_t parse_u64(const std::string& text, const char* what) {
  if (text.empty() || text.size() > 20 || !std::all_of(text.begin(), text.end(), ::isdigit)) {
    throw Error(ErrorCode::MalformedRequest, std::string("bad ") + what + " '" + text + "'");
  }
  try {
    return std::stoull(text);
  } catch (const std::exception&) {
    throw Error(ErrorCode::MalformedRequest, std::string("bad ") + what + " '" + text + "'");
  }
}

HttpResponse error_response(const Error& e) {
  return {http_status(e.code()), {{"error", to_string(e.code())}, {"message", e.what()}}};
}

json parse_body(const std::string& body) {
  if (body.empty()) return json::object();
  try {
    json j = json::parse(body);
    if (!j.is_object()) throw Error(ErrorCode::MalformedRequest, "body must be a JSON object");
    return j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedRequest, e.what());
  }
}

template <typename T>
T unsigned_value(const json& v, const char* key) {
  if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0) || v.get<std::uint64_t>() > std::numeric_limits<T>::max()) {
    throw Error(ErrorCode::MalformedRequest, std::string(key) + ": expected unsigned integer");
  }
  return v.get<T>();
}

template <typename T>
T unsigned_at(const json& body, const char* key) {
  if (!body.contains(key)) throw Error(ErrorCode::MalformedRequest, std::string("missing field ") + key);
  return unsigned_value<T>(body.at(key), key);
}

// Path parameters override the body; a conflicting body value is an error.
void bind_param(json& body, const char* key, std::uint64_t value) {
  if (body.contains(key) && !(body[key].is_number_unsigned() && body[key].get<std::uint64_t>() == value)) {
    throw Error(ErrorCode::MalformedRequest, std::string(key) + " in body does not match path");
  }
  body[key] = value;
}

void write_all(int fd, const std::string& data) {
  std::size_t off = 0;
  while (off < data.size()) {
    const ssize_t n = ::write(fd, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::Unavailable, std::string("log write: ") + std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
}

void write_file_durably(const std::filesystem::path& file, const std::string& data) {
  const std::string tmp = file.string() + ".tmp";
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0600);
  if (fd < 0) throw Error(ErrorCode::Unavailable, "cannot write " + tmp);
  write_all(fd, data);
  ::fsync(fd);
  ::close(fd);
  std::filesystem::rename(tmp, file);
}

}  // namespace

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::Ok: return 200;
    case ErrorCode::MalformedRequest:
    case ErrorCode::InvalidEncoding:
    case ErrorCode::MessageOutOfRange:
    case ErrorCode::UnknownDomainTag:
    case ErrorCode::WitnessMismatch:
    case ErrorCode::InvalidProof:
    case ErrorCode::InvalidDecryptionProof:
    case ErrorCode::BadSnapshotProof:
    case ErrorCode::BadRoot:
    case ErrorCode::BadSignature:
    case ErrorCode::BadAnonymitySet:
    case ErrorCode::BadOption:
    case ErrorCode::ZeroPower:
    case ErrorCode::TokenOutOfBound:
    case ErrorCode::PoolTooSmall:
    case ErrorCode::TargetNotInPool:
      return 400;
    case ErrorCode::NotFound: return 404;
    case ErrorCode::Unavailable:
    case ErrorCode::CorruptLog:
    case ErrorCode::PortInUse:
      return 503;
    default: return 409;
  }
}

void NodeConfig::validate() const {
  if (set_sizes.empty()) throw Error(ErrorCode::MalformedRequest, "no anonymity-set sizes configured");
  if (std::find(set_sizes.begin(), set_sizes.end(), 0) != set_sizes.end()) {
    throw Error(ErrorCode::MalformedRequest, "anonymity-set size 0");
  }
  if (num_options < 2) throw Error(ErrorCode::MalformedRequest, "need at least two options");
  if (group_id != GroupParams{}.group_id) throw Error(ErrorCode::MalformedRequest, "unsupported group " + group_id);
  if (port < 0 || port > 65535) throw Error(ErrorCode::MalformedRequest, "port");
}

struct Node::Server {
  httplib::Server http;
  std::thread thread;
};

Node::Node(NodeConfig config) : config_(std::move(config)) {
  config_.validate();
  std::filesystem::create_directories(config_.data_dir);
  log_path_ = config_.data_dir / "commands.jsonl";
  authority_path_ = config_.data_dir / "authority.json";
  replay_log();
  load_authority();
  log_fd_ = ::open(log_path_.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0600);
  if (log_fd_ < 0) throw Error(ErrorCode::Unavailable, "cannot open " + log_path_.string());
  committed_ = std::make_shared<const BoardState>(board_.state());
  committed_events_ = board_.events();
}

Node::~Node() {
  stop();
  if (log_fd_ >= 0) ::close(log_fd_);
}

void Node::replay_log() {
  std::ifstream in(log_path_, std::ios::binary);
  if (!in) return;
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string data = ss.str();
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < data.size()) {
    const std::size_t nl = data.find('\n', pos);
    if (nl == std::string::npos) {
      // A torn final record was never acknowledged; drop it.
      std::filesystem::resize_file(log_path_, pos);
      break;
    }
    ++line_no;
    const std::string line = data.substr(pos, nl - pos);
    pos = nl + 1;
    try {
      const json rec = json::parse(line);
      const Command cmd = command_from_json(rec.at("command"));
      const Event logged = rec.at("event").get<Event>();
      const Outcome o = board_.apply(cmd);
      if (!(o.event.seq == logged.seq && o.event.kind == logged.kind && o.event.payload == logged.payload)) {
        throw Error(ErrorCode::CorruptLog, "replayed event differs");
      }
    } catch (const std::exception& e) {
      throw Error(ErrorCode::CorruptLog, log_path_.string() + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void Node::load_authority() {
  if (!std::filesystem::exists(authority_path_)) return;
  try {
    std::ifstream in(authority_path_);
    json j;
    in >> j;
    const Scalar sk = j.at("encSecret").get<Scalar>();
    const Bytes sig_sk = from_hex(j.at("sigSecret").get<std::string>());
    if (sig_sk.size() != 64) throw Error(ErrorCode::InvalidEncoding, "signing key length");
    Authority ta(EncKeyPair::from_secret(sk), sig_from_secret(std::span<const std::uint8_t, 64>(sig_sk.data(), 64)),
                 j.at("tokens").get<std::vector<std::uint64_t>>(), j.at("numOptions").get<std::uint32_t>());
    const auto transfers = transfers_since(board_.events(), 0);
    if (!transfers.empty()) ta.refresh_root(transfers);
    authority_ = std::move(ta);
  } catch (const std::exception& e) {
    throw Error(ErrorCode::CorruptLog, authority_path_.string() + ": " + e.what());
  }
}

void Node::save_authority(const Authority& ta, const std::filesystem::path& file) const {
  json j = {{"encSecret", ta.enc_keys().sk},
            {"sigSecret", to_hex(ta.sig_keys().sk)},
            {"tokens", ta.bundle().tokens},
            {"numOptions", ta.bundle().num_options}};
  write_file_durably(file, j.dump(2) + "\n");
}

std::shared_ptr<const BoardState> Node::snapshot() const {
  std::shared_lock lock(read_mu_);
  return committed_;
}

std::vector<Event> Node::events_from(std::uint64_t seq) const {
  std::shared_lock lock(read_mu_);
  if (seq >= committed_events_.size()) return {};
  return {committed_events_.begin() + static_cast<std::ptrdiff_t>(seq), committed_events_.end()};
}

Digest Node::state_hash() const { return kite::state_hash(*snapshot()); }

Outcome Node::commit(const Command& cmd) {
  Outcome o = board_.apply(cmd);
  const json rec = {{"command", command_to_json(cmd)}, {"event", o.event}};
  write_all(log_fd_, rec.dump() + "\n");
  if (::fsync(log_fd_) != 0) throw Error(ErrorCode::Unavailable, "log fsync failed");
  auto next = std::make_shared<const BoardState>(board_.state());
  std::unique_lock lock(read_mu_);
  committed_ = std::move(next);
  committed_events_.push_back(o.event);
  return o;
}

std::optional<RefreshRootCmd> Node::pending_refresh() {
  if (!authority_) return std::nullopt;
  const auto transfers = transfers_since(board_.events(), authority_->last_applied_seq());
  if (transfers.empty()) return std::nullopt;
  return authority_->refresh_root(transfers);
}

Node::Applied Node::submit(const Command& cmd) {
  std::lock_guard lock(apply_mu_);
  Applied a;
  a.outcome = commit(cmd);
  if (a.outcome.ok() && std::holds_alternative<TransferCmd>(cmd) && config_.in_process_authority) {
    if (auto refresh = pending_refresh()) a.follow_up.push_back(commit(*refresh).event);
  }
  return a;
}

HttpResponse Node::respond(const Applied& a) const {
  if (a.outcome.ok()) {
    json body = {{"event", a.outcome.event}};
    if (!a.follow_up.empty()) body["followUp"] = a.follow_up;
    return {200, body};
  }
  return {http_status(a.outcome.error),
          {{"error", to_string(a.outcome.error)}, {"message", to_string(a.outcome.error)}, {"event", a.outcome.event}}};
}

HttpResponse Node::post_setup(const json& body) {
  if (body.contains("pkEnc")) {
    json j = body;
    j["type"] = "setup";
    return respond(submit(command_from_json(j)));
  }
  if (!config_.in_process_authority) throw Error(ErrorCode::MalformedRequest, "no in-process authority");
  if (!body.contains("tokens") || !body["tokens"].is_array()) throw Error(ErrorCode::MalformedRequest, "tokens");
  std::vector<std::uint64_t> tokens;
  std::uint32_t num_options = config_.num_options;
  for (const auto& t : body["tokens"]) tokens.push_back(unsigned_value<std::uint64_t>(t, "tokens"));
  if (body.contains("numOptions")) num_options = unsigned_at<std::uint32_t>(body, "numOptions");
  SystemRandom rng;
  Authority ta = Authority::setup(std::move(tokens), num_options, rng);

  std::lock_guard lock(apply_mu_);
  const bool fresh = !board_.state().initialized;
  const std::filesystem::path staged = authority_path_.string() + ".staged";
  if (fresh) save_authority(ta, staged);
  Applied a;
  a.outcome = commit(ta.bundle());
  if (fresh && a.outcome.ok()) {
    std::filesystem::rename(staged, authority_path_);
    authority_ = std::move(ta);
  } else if (fresh) {
    std::filesystem::remove(staged);
  }
  return respond(a);
}

HttpResponse Node::post_tally(ElectionId eid, const json& body) {
  if (body.contains("proof")) {
    json j = body;
    bind_param(j, "eid", eid);
    j["type"] = "tally";
    return respond(submit(command_from_json(j)));
  }
  std::lock_guard lock(apply_mu_);
  if (!authority_) throw Error(ErrorCode::NotInitialized, "no in-process authority");
  TallyCmd cmd;
  cmd.eid = eid;
  if (const ElectionState* e = board_.state().find_election(eid)) {
    SystemRandom rng;
    cmd = authority_->tally_decrypt(eid, e->tallies, rng);
  }
  Applied a;
  a.outcome = commit(cmd);
  return respond(a);
}

HttpResponse Node::post_refresh(const json& body) {
  if (body.contains("tokenRoot")) {
    json j = body;
    j["type"] = "refresh_root";
    return respond(submit(command_from_json(j)));
  }
  std::lock_guard lock(apply_mu_);
  if (!authority_) throw Error(ErrorCode::NotInitialized, "no in-process authority");
  RefreshRootCmd cmd;
  if (auto pending = pending_refresh()) {
    cmd = *pending;
  } else {
    cmd = authority_->refresh_root({});
  }
  Applied a;
  a.outcome = commit(cmd);
  return respond(a);
}

HttpResponse Node::assist_delegate(const json& body) {
  PartyIndex party = 0, target = 0;
  std::size_t set_size = 0;
  party = unsigned_at<PartyIndex>(body, "party");
  target = unsigned_at<PartyIndex>(body, "target");
  set_size = unsigned_at<std::size_t>(body, "setSize");
  const auto view = snapshot();
  if (!view->initialized) throw Error(ErrorCode::NotInitialized);
  Voter voter(voter_setup(view->ledger.balances, party), ClientConfig{config_.set_sizes});
  SystemRandom rng;
  const auto pool = active_delegates(*view, party);
  const DelegationBundle b = voter.build_delegation(*view, target, set_size, pool, rng);
  json secret = {{"anonSet", b.secret.anon_set},
                 {"ctVec", b.secret.ct_vec},
                 {"rVec", b.secret.r_vec},
                 {"targetPos", b.secret.target_pos}};
  return {200, {{"command", command_to_json(b.cmd)}, {"secret", secret}}};
}

HttpResponse Node::assist_vote(const json& body) {
  PartyIndex party = 0;
  ElectionId eid = 0;
  std::string option, mode;
  try {
    party = unsigned_at<PartyIndex>(body, "party");
    eid = unsigned_at<ElectionId>(body, "eid");
    const auto& opt = body.at("option");
    option = opt.is_string() ? opt.get<std::string>() : std::to_string(unsigned_value<std::uint32_t>(opt, "option"));
    mode = body.value("mode", std::string("public"));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedRequest, e.what());
  }
  if (mode != "public" && mode != "private") throw Error(ErrorCode::MalformedRequest, "mode");
  const auto view = snapshot();
  if (!view->initialized) throw Error(ErrorCode::NotInitialized);
  const std::uint32_t choice = parse_option(option, view->params.num_options);
  Voter voter(voter_setup(view->ledger.balances, party), ClientConfig{config_.set_sizes});
  if (mode == "public") return {200, {{"command", command_to_json(voter.build_public_vote(*view, eid, choice))}}};
  SystemRandom rng;
  return {200, {{"command", command_to_json(voter.build_private_vote(*view, eid, choice, rng))}}};
}

HttpResponse Node::handle(const std::string& method, const std::string& target, const std::string& body_text) {
  try {
    const auto q = target.find('?');
    const std::string path = target.substr(0, q);
    const std::string query = q == std::string::npos ? "" : target.substr(q + 1);
    const auto parts = split_path(path);
    const std::size_t n = parts.size();

    if (method == "GET") {
      if (n == 1 && parts[0] == "state") {
        const auto view = snapshot();
        return {200, {{"state", *view}, {"stateHash", kite::state_hash(*view)}}};
      }
      if (n == 1 && parts[0] == "config") {
        return {200,
                {{"groupId", config_.group_id},
                 {"setSizes", config_.set_sizes},
                 {"numOptions", config_.num_options},
                 {"inProcessAuthority", config_.in_process_authority}}};
      }
      if (n == 1 && parts[0] == "events") {
        std::uint64_t from = 0;
        if (query.rfind("from=", 0) == 0) {
          from = parse_u64(query.substr(5), "from");
        } else if (!query.empty()) {
          throw Error(ErrorCode::MalformedRequest, "unknown query " + query);
        }
        const auto events = events_from(from);
        const std::uint64_t next = events.empty() ? from : events.back().seq + 1;
        return {200, {{"events", events}, {"next", next}}};
      }
      if ((n == 2 || n == 3) && parts[0] == "elections") {
        const ElectionId eid = parse_u64(parts[1], "election id");
        const auto view = snapshot();
        const ElectionState* e = view->find_election(eid);
        if (!e) throw Error(ErrorCode::NotFound, "election " + parts[1]);
        if (n == 2) return {200, *e};
        if (parts[2] == "snapshot") {
          if (!e->snapshot_root) throw Error(ErrorCode::ElectionNotStarted);
          return {200, {{"eid", eid}, {"snapshotRoot", *e->snapshot_root}, {"snapshotPowers", e->snapshot_powers}}};
        }
      }
      throw Error(ErrorCode::NotFound, path);
    }

    if (method != "POST") throw Error(ErrorCode::NotFound, method + " " + path);
    json body = parse_body(body_text);

    if (n == 1 && parts[0] == "setup") return post_setup(body);
    if (n == 1 && parts[0] == "transfer") {
      body["type"] = "transfer";
      return respond(submit(command_from_json(body)));
    }
    if (n == 2 && parts[0] == "authority" && parts[1] == "refresh") return post_refresh(body);
    if (n == 2 && parts[0] == "assist" && parts[1] == "delegate") return assist_delegate(body);
    if (n == 2 && parts[0] == "assist" && parts[1] == "vote") return assist_vote(body);
    if (n == 3 && parts[0] == "parties") {
      const auto p = parse_u64(parts[1], "party");
      if (p > UINT32_MAX) throw Error(ErrorCode::MalformedRequest, "party");
      const std::string& verb = parts[2];
      if (verb != "register" && verb != "unregister" && verb != "delegate" && verb != "undelegate") {
        throw Error(ErrorCode::NotFound, path);
      }
      bind_param(body, "party", p);
      body["type"] = verb;
      return respond(submit(command_from_json(body)));
    }
    if (n == 1 && parts[0] == "elections") {
      body["type"] = "election_setup";
      if (!body.contains("desc")) body["desc"] = "";
      return respond(submit(command_from_json(body)));
    }
    if (n == 3 && parts[0] == "elections") {
      const ElectionId eid = parse_u64(parts[1], "election id");
      if (parts[2] == "start") {
        bind_param(body, "eid", eid);
        body["type"] = "election_start";
        return respond(submit(command_from_json(body)));
      }
      if (parts[2] == "vote") {
        bind_param(body, "eid", eid);
        const std::string mode = body.value("mode", std::string("public"));
        if (mode != "public" && mode != "private") throw Error(ErrorCode::MalformedRequest, "mode");
        body["type"] = mode == "private" ? "vote_private" : "vote_public";
        return respond(submit(command_from_json(body)));
      }
      if (parts[2] == "tally") return post_tally(eid, body);
    }
    throw Error(ErrorCode::NotFound, path);
  } catch (const Error& e) {
    return error_response(e);
  } catch (const json::exception& e) {
    return error_response(Error(ErrorCode::MalformedRequest, e.what()));
  }
}

int Node::start_background() {
  if (server_) throw Error(ErrorCode::MalformedRequest, "already serving");
  auto srv = std::make_unique<Server>();
  auto handler = [this](const httplib::Request& req, httplib::Response& res) {
    const HttpResponse r = handle(req.method, req.target, req.body);
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  // httplib's default sets SO_REUSEPORT, which lets a second node share a
  // busy port; plain SO_REUSEADDR still allows quick restarts.
  srv->http.set_socket_options([](socket_t sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  srv->http.Get(".*", handler);
  srv->http.Post(".*", handler);
  int port = config_.port;
  if (port == 0) {
    port = srv->http.bind_to_any_port(config_.host);
    if (port < 0) throw Error(ErrorCode::PortInUse, config_.host);
  } else if (!srv->http.bind_to_port(config_.host, port)) {
    throw Error(ErrorCode::PortInUse, config_.host + ":" + std::to_string(port));
  }
  httplib::Server* http = &srv->http;
  srv->thread = std::thread([http] { http->listen_after_bind(); });
  srv->http.wait_until_ready();
  server_ = std::move(srv);
  return port;
}

void Node::serve() {
  start_background();
  server_->thread.join();
}

void Node::stop() {
  if (!server_) return;
  server_->http.stop();
  if (server_->thread.joinable()) server_->thread.join();
  server_.reset();
}

// ---------------------------------------------------------------------------

struct RemoteBoard::Impl {
  explicit Impl(const std::string& url) : client(url) {
    client.set_connection_timeout(5);
    client.set_read_timeout(120);
  }
  mutable httplib::Client client;
};

RemoteBoard::RemoteBoard(const std::string& url) : impl_(std::make_unique<Impl>(url)) {}
RemoteBoard::~RemoteBoard() = default;

HttpResponse RemoteBoard::call(const std::string& method, const std::string& path, const json& body) const {
  httplib::Result res = method == "GET"
                            ? impl_->client.Get(path)
                            : impl_->client.Post(path, body.is_null() ? std::string("{}") : body.dump(),
                                                 "application/json");
  if (!res) throw Error(ErrorCode::Unavailable, "node unreachable: " + httplib::to_string(res.error()));
  HttpResponse out;
  out.status = res->status;
  try {
    out.body = json::parse(res->body);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Unavailable, std::string("bad response: ") + e.what());
  }
  return out;
}

Outcome outcome_from_response(const HttpResponse& r) {
  Outcome o;
  if (r.status == 200) {
    o.event = r.body.at("event").get<Event>();
    return o;
  }
  const ErrorCode code = r.body.contains("error") ? error_code_from_string(r.body["error"].get<std::string>())
                                                  : ErrorCode::Unavailable;
  if (!r.body.contains("event")) {
    throw Error(code, r.body.value("message", std::string("request failed")));
  }
  o.error = code;
  o.event = r.body.at("event").get<Event>();
  return o;
}

Outcome RemoteBoard::submit(const Command& cmd) {
  json body = command_to_json(cmd);
  const std::string type = body["type"].get<std::string>();
  body.erase("type");
  std::string path;
  if (type == "setup") {
    path = "/setup";
  } else if (type == "register" || type == "unregister" || type == "delegate" || type == "undelegate") {
    path = "/parties/" + std::to_string(body["party"].get<PartyIndex>()) + "/" + type;
  } else if (type == "election_setup") {
    path = "/elections";
  } else if (type == "election_start") {
    path = "/elections/" + std::to_string(body["eid"].get<ElectionId>()) + "/start";
  } else if (type == "vote_public" || type == "vote_private") {
    path = "/elections/" + std::to_string(body["eid"].get<ElectionId>()) + "/vote";
  } else if (type == "tally") {
    path = "/elections/" + std::to_string(body["eid"].get<ElectionId>()) + "/tally";
  } else if (type == "transfer") {
    path = "/transfer";
  } else {
    path = "/authority/refresh";
  }
  return outcome_from_response(call("POST", path, body));
}

BoardState RemoteBoard::snapshot() const {
  const HttpResponse r = call("GET", "/state");
  if (r.status != 200) throw Error(ErrorCode::Unavailable, r.body.dump());
  return r.body.at("state").get<BoardState>();
}

}  // namespace kite
