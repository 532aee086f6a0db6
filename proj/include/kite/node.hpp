#pragma once
// HTTP/JSON node hosting a board. Mutations go through one serial applier
// and are appended to a JSON-lines command log (fsync before the response);
// reads are served from the last committed snapshot. The trusted authority
// can run in-process, with its secrets kept in a separate file.
//
// Routes:
//   POST /setup                        {"tokens":[...], "numOptions"?} or a full setup command
//   POST /parties/{p}/register
//   POST /parties/{p}/unregister
//   POST /parties/{p}/delegate         delegate command fields
//   POST /parties/{p}/undelegate       {"anonSet", "ctVec"}
//   POST /elections                    {"party", "eid", "desc"}
//   POST /elections/{eid}/start        {"party"}
//   POST /elections/{eid}/vote         vote command fields ("mode": public|private)
//   POST /elections/{eid}/tally        {} for the in-process authority, or a tally command
//   POST /transfer                     {"from", "to", "amount"}
//   POST /authority/refresh            {} or a refresh command
//   POST /assist/delegate              {"party", "target", "setSize"}
//   POST /assist/vote                  {"party", "eid", "option", "mode"}
//   GET  /state, /elections/{eid}, /elections/{eid}/snapshot, /events?from=seq, /config
//
// Responses: 200 {"event": ...} on acceptance; 400 for malformed requests
// and failed proofs or signatures; 409 for guard violations; both carry
// {"error", "message"} and, when the board saw the command, the logged
// rejection event.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "kite/authority.hpp"
#include "kite/board.hpp"

namespace kite {

struct NodeConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path data_dir = "kite-data";
  std::string group_id = "ristretto255";
  std::vector<std::size_t> set_sizes{5, 10, 20};
  std::uint32_t num_options = 3;
  bool in_process_authority = true;

  // Throws Error(MalformedRequest).
  void validate() const;
};

struct HttpResponse {
  int status = 200;
  nlohmann::json body;
};

int http_status(ErrorCode code);

class Node {
 public:
  // Creates the data directory if needed and replays the command log.
  // Throws Error(CorruptLog) if the log does not replay to the events it
  // recorded.
  explicit Node(NodeConfig config);
  ~Node();
  Node(const Node&) = delete;
  Node& operator=(const Node&) = delete;

  // Transport-independent dispatch; target may carry a query string.
  HttpResponse handle(const std::string& method, const std::string& target, const std::string& body);

  std::shared_ptr<const BoardState> snapshot() const;
  std::vector<Event> events_from(std::uint64_t seq) const;
  Digest state_hash() const;
  const NodeConfig& config() const { return config_; }

  // Binds and serves until stop(). Throws Error(PortInUse).
  void serve();
  // Binds, then serves on a background thread; returns the bound port
  // (config port 0 picks a free one).
  int start_background();
  void stop();

 private:
  struct Applied {
    Outcome outcome;
    std::vector<Event> follow_up;
  };

  Outcome commit(const Command& cmd);  // caller holds apply_mu_
  Applied submit(const Command& cmd);
  HttpResponse respond(const Applied& applied) const;

  HttpResponse post_setup(const nlohmann::json& body);
  HttpResponse post_tally(ElectionId eid, const nlohmann::json& body);
  HttpResponse post_refresh(const nlohmann::json& body);
  HttpResponse assist_delegate(const nlohmann::json& body);
  HttpResponse assist_vote(const nlohmann::json& body);

  void replay_log();
  void load_authority();
  void save_authority(const Authority& ta, const std::filesystem::path& file) const;
  std::optional<RefreshRootCmd> pending_refresh();  // caller holds apply_mu_

  NodeConfig config_;
  std::filesystem::path log_path_;
  std::filesystem::path authority_path_;
  int log_fd_ = -1;

  std::mutex apply_mu_;
  Board board_;
  std::optional<Authority> authority_;

  mutable std::shared_mutex read_mu_;
  std::shared_ptr<const BoardState> committed_;
  std::vector<Event> committed_events_;

  struct Server;
  std::unique_ptr<Server> server_;
};

// BoardPort over HTTP, for the CLI and remote clients.
class RemoteBoard final : public BoardPort {
 public:
  explicit RemoteBoard(const std::string& url);
  ~RemoteBoard() override;

  Outcome submit(const Command& cmd) override;
  BoardState snapshot() const override;

  // Raw call; throws Error(Unavailable) on connection failure.
  HttpResponse call(const std::string& method, const std::string& path, const nlohmann::json& body = nullptr) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Converts an error response back into an Outcome or throws for transport
// and request errors that never reached the board.
Outcome outcome_from_response(const HttpResponse& r);

}  // namespace kite
