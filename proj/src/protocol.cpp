#include "diplo/protocol.hpp"

#include <algorithm>
#include <cstdlib>
#include <istream>
#include <ostream>

#include "diplo/error.hpp"

namespace diplo {

namespace {

using Clock = std::chrono::steady_clock;

const char* const kTypes[] = {"hello", "request_orders", "orders", "error", "bye"};

std::vector<std::string> order_texts(const MapGraph& map, const std::vector<Order>& orders) {
  std::vector<std::string> out;
  out.reserve(orders.size());
  for (const Order& o : orders) out.push_back(format_order(map, o));
  return out;
}

std::uint64_t message_id(const Json& j) {
  const auto it = j.find("id");
  if (it == j.end() || !it->is_number_unsigned()) throw SchemaError("message without a valid id");
  return it->get<std::uint64_t>();
}

}  // namespace

Json tensor_to_json(const Tensor& t) {
  Json j;
  j["layout"] = kFeatureLayout;
  j["rows"] = t.rows;
  j["cols"] = t.cols;
  j["data"] = t.data;
  return j;
}

Tensor tensor_from_json(const Json& j) {
  try {
    if (j.at("layout").get<std::string>() != kFeatureLayout)
      throw SchemaError("tensor layout " + j.at("layout").dump() + ", expected " + std::string(kFeatureLayout));
    Tensor t(j.at("rows").get<int>(), j.at("cols").get<int>());
    const auto data = j.at("data").get<std::vector<float>>();
    if (data.size() != t.data.size()) throw SchemaError("tensor data does not match its shape");
    t.data = data;
    return t;
  } catch (const Json::exception& e) {
    throw SchemaError(std::string("malformed tensor: ") + e.what());
  }
}

Json hello_message(const MapGraph& map) {
  return {{"type", "hello"}, {"protocol", kProtocolVersion}, {"map", map.name()}, {"layout", kFeatureLayout}};
}

Json request_message(const MapGraph& map, const AgentObservation& obs, std::uint64_t id, std::uint64_t seed,
                     bool tensors) {
  Json j;
  j["type"] = "request_orders";
  j["id"] = id;
  j["seed"] = seed;
  j["power"] = power_name(obs.power);
  j["phase"] = obs.state->phase().code();
  j["state"] = state_to_json(map, *obs.state);
  j["prev_orders"] = order_texts(map, obs.prev_orders);
  Json legal = Json::object();
  std::vector<Loc> sites;
  for (const auto& [loc, orders] : obs.legal) {
    legal[std::string(map.location_name(loc))] = order_texts(map, orders);
    sites.push_back(loc);
  }
  j["legal"] = legal;
  j["build_count"] = obs.build_count;
  Json order = Json::array();
  for (Loc l : decode_ordering(map, sites)) order.push_back(map.location_name(l));
  j["decode_order"] = order;
  if (tensors) {
    const GameState& issued_in = obs.prev_state ? *obs.prev_state : *obs.state;
    j["tensors"] = {{"board", tensor_to_json(encode_board(map, *obs.state))},
                    {"prev_orders", tensor_to_json(encode_prev_orders(map, issued_in, obs.prev_orders))}};
  }
  return j;
}

Json orders_message(std::uint64_t id, const std::vector<Order>& orders, const MapGraph& map) {
  return {{"type", "orders"}, {"id", id}, {"orders", order_texts(map, orders)}};
}

Json error_message(std::uint64_t id, const std::string& message) {
  return {{"type", "error"}, {"id", id}, {"message", message}};
}

Json bye_message() { return {{"type", "bye"}}; }

Json parse_message(const std::string& line) {
  Json j = Json::parse(line, nullptr, false);
  if (j.is_discarded()) throw SchemaError("message is not JSON");
  if (!j.is_object()) throw SchemaError("message is not an object");
  const auto it = j.find("type");
  if (it == j.end() || !it->is_string()) throw SchemaError("message without a type");
  const std::string type = it->get<std::string>();
  if (std::find(std::begin(kTypes), std::end(kTypes), type) == std::end(kTypes))
    throw SchemaError("unknown message type '" + type + "'");
  return j;
}

std::unique_ptr<Request> request_from_json(const MapGraph& map, const Json& j) {
  auto r = std::make_unique<Request>();
  try {
    r->id = message_id(j);
    r->seed = j.value("seed", std::uint64_t{0});
    r->state = state_from_json(map, j.at("state"));
    r->obs.state = &r->state;
    r->obs.power = parse_power(j.at("power").get<std::string>());
    if (j.at("phase").get<std::string>() != r->state.phase().code())
      throw SchemaError("request phase does not match its state");
    for (const auto& text : j.at("prev_orders")) r->obs.prev_orders.push_back(parse_order(map, text.get<std::string>()));
    for (const auto& [name, list] : j.at("legal").items()) {
      std::vector<Order> orders;
      for (const auto& text : list) orders.push_back(parse_order(map, text.get<std::string>()));
      std::sort(orders.begin(), orders.end());
      r->obs.legal.emplace_back(map.location(name), std::move(orders));
    }
    r->obs.build_count = j.value("build_count", 0);
  } catch (const Json::exception& e) {
    throw SchemaError(std::string("malformed request: ") + e.what());
  }
  return r;
}

std::chrono::milliseconds default_agent_timeout() {
  if (const char* env = std::getenv("DIPLO_AGENT_TIMEOUT")) {
    char* end = nullptr;
    const double seconds = std::strtod(env, &end);
    if (end != env && seconds > 0) return std::chrono::milliseconds(static_cast<long>(seconds * 1000));
  }
  return std::chrono::seconds(5);
}

ExternalAgent::ExternalAgent(std::string label, Connector connect, std::chrono::milliseconds timeout)
    : label_(std::move(label)), connect_(std::move(connect)), timeout_(timeout) {}

ExternalAgent::~ExternalAgent() {
  if (transport_ && !failed_) {
    try {
      transport_->send(bye_message().dump());
    } catch (const TransportError&) {
    }
  }
}

std::string ExternalAgent::name() const { return remote_name_.empty() ? label_ : remote_name_; }

AgentDecision ExternalAgent::fallback(std::string note) {
  ++substitutions_;
  AgentDecision d;
  d.on_time = false;
  d.notes.push_back(label_ + ": " + note + "; civil disorder");
  return d;
}

bool ExternalAgent::open(const MapGraph& map, std::vector<std::string>& notes) {
  try {
    transport_ = connect_();
    transport_->send(hello_message(map).dump());
    const auto line = transport_->receive(timeout_);
    if (!line) throw TransportError("no hello within the timeout");
    const Json hello = parse_message(*line);
    if (hello["type"] != "hello") throw SchemaError("expected hello, got " + hello["type"].get<std::string>());
    remote_name_ = hello.value("name", std::string());
    tensors_ = hello.value("tensors", false);
    return true;
  } catch (const Error& e) {
    failed_ = true;
    notes.push_back(e.what());
    return false;
  }
}

AgentDecision ExternalAgent::decide(const MapGraph& map, const AgentObservation& obs) {
  if (failed_) return fallback("agent unavailable");
  std::vector<std::string> notes;
  if (!transport_ && !open(map, notes)) return fallback(notes.front());
  const std::uint64_t id = next_id_++;
  const auto deadline = Clock::now() + timeout_;
  try {
    transport_->send(request_message(map, obs, id, seed_, tensors_).dump());
    for (;;) {
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
      const auto line = left.count() > 0 ? transport_->receive(left) : std::nullopt;
      if (!line) return fallback("no reply to request " + std::to_string(id) + " within the timeout");
      Json reply;
      try {
        reply = parse_message(*line);
      } catch (const SchemaError& e) {
        return fallback(std::string("unreadable reply: ") + e.what());
      }
      const std::string type = reply["type"];
      if (type != "orders" && type != "error") continue;
      if (!reply.contains("id") || !reply["id"].is_number_unsigned() || reply["id"].get<std::uint64_t>() != id)
        continue;  // stale or unnumbered
      if (type == "error") return fallback("agent error: " + reply.value("message", std::string()));
      const auto list = reply.find("orders");
      if (list == reply.end() || !list->is_array()) return fallback("orders reply without an order list");
      AgentDecision d;
      for (const auto& text : *list) {
        if (!text.is_string()) {
          d.notes.push_back("non-string order dropped: " + text.dump());
          continue;
        }
        try {
          d.orders.push_back(parse_order(map, text.get<std::string>()));
        } catch (const Error& e) {
          d.notes.push_back("unparseable order dropped: " + text.get<std::string>());
        }
      }
      return d;
    }
  } catch (const TransportError& e) {
    failed_ = true;
    return fallback(e.what());
  }
}

namespace {

struct Endpoint {
  enum Kind { Builtin, Exec, Tcp } kind;
  std::string target;  // agent name or command, or host
  int port = 0;
};

Endpoint parse_spec(const std::string& spec) {
  if (spec.rfind("exec:", 0) == 0) {
    if (spec.size() == 5) throw ArgumentError("empty command in agent spec '" + spec + "'");
    return {Endpoint::Exec, spec.substr(5)};
  }
  if (spec.rfind("tcp:", 0) == 0) {
    const auto colon = spec.rfind(':');
    const std::string host = spec.substr(4, colon - 4);
    const std::string port = spec.substr(colon + 1);
    if (colon <= 4 || host.empty() || port.empty() || port.find_first_not_of("0123456789") != std::string::npos ||
        port.size() > 5 || std::stoi(port) > 65535)
      throw ArgumentError("agent spec '" + spec + "' is not tcp:<host>:<port>");
    return {Endpoint::Tcp, host, std::stoi(port)};
  }
  make_builtin_agent(spec);  // throws for unknown names
  return {Endpoint::Builtin, spec};
}

}  // namespace

void check_agent_spec(const std::string& spec) { parse_spec(spec); }

std::unique_ptr<Agent> make_agent(const std::string& spec, std::uint64_t seed) {
  const Endpoint e = parse_spec(spec);
  switch (e.kind) {
    case Endpoint::Exec:
      return std::make_unique<ExternalAgent>(spec, [cmd = e.target] { return spawn_process(cmd); });
    case Endpoint::Tcp:
      return std::make_unique<ExternalAgent>(spec, [host = e.target, port = e.port] { return connect_tcp(host, port); });
    case Endpoint::Builtin:
      break;
  }
  return make_builtin_agent(e.target, seed);
}

int serve_agent(const MapGraph& map, Agent& agent, std::istream& in, std::ostream& out, bool want_tensors) {
  int answered = 0;
  std::optional<std::uint64_t> seed;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    Json msg;
    try {
      msg = parse_message(line);
    } catch (const SchemaError& e) {
      out << error_message(0, e.what()).dump() << std::endl;
      continue;
    }
    const std::string type = msg["type"];
    if (type == "bye") break;
    if (type == "hello") {
      out << Json{{"type", "hello"}, {"name", agent.name()}, {"tensors", want_tensors}}.dump() << std::endl;
      continue;
    }
    if (type != "request_orders") continue;
    std::uint64_t id = 0;
    try {
      id = message_id(msg);
      const auto req = request_from_json(map, msg);
      if (seed != req->seed) {
        seed = req->seed;
        agent.new_game(req->seed);
      }
      const AgentDecision d = agent.decide(map, req->obs);
      out << orders_message(id, d.orders, map).dump() << std::endl;
      ++answered;
    } catch (const Error& e) {
      out << error_message(id, e.what()).dump() << std::endl;
    }
  }
  return answered;
}

}  // namespace diplo
