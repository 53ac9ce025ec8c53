#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "diplo/bots.hpp"
#include "diplo/features.hpp"
#include "diplo/record.hpp"

namespace diplo {

// Agent wire protocol: newline-delimited JSON objects, UTF-8, one object per
// line, each with a "type".
//
// engine -> agent  {"type": "hello", "protocol": 1, "map": "standard", "layout": "diplo-features/1"}
// agent -> engine  {"type": "hello", "name": "echo", "tensors": false}
// engine -> agent  {"type": "request_orders", "id": 3, "seed": 17, "power": "FRANCE", "phase": "S1901M",
//                   "state": <snapshot>, "prev_orders": ["A PAR - BUR", ...],
//                   "legal": {"PAR": ["A PAR H", ...], ...}, "build_count": 0,
//                   "decode_order": ["BRE", "PAR", ...],
//                   "tensors": {"board": <tensor>, "prev_orders": <tensor>}}   (when asked for)
// agent -> engine  {"type": "orders", "id": 3, "orders": ["A PAR - BUR", ...]}
//               or {"type": "error", "id": 3, "message": "..."}
// engine -> agent  {"type": "bye"}
//
// Every request_orders is answered by exactly one orders or error message
// carrying its id. Tensors are {"layout", "rows", "cols", "data"} with the
// data in row-major order.
inline constexpr int kProtocolVersion = 1;

Json tensor_to_json(const Tensor& t);
// Throws SchemaError on a wrong layout tag or shape.
Tensor tensor_from_json(const Json& j);

Json hello_message(const MapGraph& map);
Json request_message(const MapGraph& map, const AgentObservation& obs, std::uint64_t id, std::uint64_t seed,
                     bool tensors);
Json orders_message(std::uint64_t id, const std::vector<Order>& orders, const MapGraph& map);
Json error_message(std::uint64_t id, const std::string& message);
Json bye_message();

// Parses one line into an object with a known "type". Throws SchemaError.
Json parse_message(const std::string& line);

// A request as seen by the agent side.
struct Request {
  std::uint64_t id = 0;
  std::uint64_t seed = 0;
  GameState state;
  AgentObservation obs;  // obs.state points at `state`
};
// Throws SchemaError or LookupError/ParseError for unknown names and orders.
std::unique_ptr<Request> request_from_json(const MapGraph& map, const Json& j);

// A bidirectional line channel.
class Transport {
 public:
  virtual ~Transport() = default;
  // Throws TransportError when the peer is gone.
  virtual void send(const std::string& line) = 0;
  // Next line without its newline; nullopt when nothing arrived in time.
  // Throws TransportError at end of stream.
  virtual std::optional<std::string> receive(std::chrono::milliseconds timeout) = 0;
};

// Runs `command` through /bin/sh with its standard streams as the channel.
// Standard error is inherited. The child gets a bye and is reaped on
// destruction.
std::unique_ptr<Transport> spawn_process(const std::string& command);
// Connects to host:port. Throws TransportError.
std::unique_ptr<Transport> connect_tcp(const std::string& host, int port);

// Per-request timeout: DIPLO_AGENT_TIMEOUT (seconds, fractions allowed) or 5 s.
std::chrono::milliseconds default_agent_timeout();

// An agent behind the wire protocol. The transport is opened lazily and at
// most once; after a transport failure every later request falls back to
// civil disorder. A timed-out request is answered with no orders; a late
// reply to it is discarded by id.
class ExternalAgent : public Agent {
 public:
  using Connector = std::function<std::unique_ptr<Transport>()>;
  ExternalAgent(std::string label, Connector connect, std::chrono::milliseconds timeout = default_agent_timeout());
  ~ExternalAgent() override;

  std::string name() const override;
  void new_game(std::uint64_t seed) override { seed_ = seed; }
  AgentDecision decide(const MapGraph& map, const AgentObservation& obs) override;

  // Requests answered with civil disorder (timeout, transport failure, error
  // reply or unreadable reply).
  int substitutions() const { return substitutions_; }

 private:
  bool open(const MapGraph& map, std::vector<std::string>& notes);
  AgentDecision fallback(std::string note);

  std::string label_;
  std::string remote_name_;
  Connector connect_;
  std::chrono::milliseconds timeout_;
  std::unique_ptr<Transport> transport_;
  bool failed_ = false;
  bool tensors_ = false;
  std::uint64_t seed_ = 0;
  std::uint64_t next_id_ = 1;
  int substitutions_ = 0;
};

// Agent specs: a built-in name (random, greedy, dumbbot, hold),
// "exec:<command>" or "tcp:<host>:<port>". Throws ArgumentError.
std::unique_ptr<Agent> make_agent(const std::string& spec, std::uint64_t seed = 0);
// Checks a spec without starting anything. Throws ArgumentError.
void check_agent_spec(const std::string& spec);

// Agent side of the protocol: answers requests from `in` with `agent`'s
// decisions on `out` until bye or end of input. Malformed requests get an
// error reply. Returns the number of requests answered with orders.
int serve_agent(const MapGraph& map, Agent& agent, std::istream& in, std::ostream& out, bool want_tensors = false);

}  // namespace diplo
