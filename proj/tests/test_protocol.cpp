#include <ext/stdio_filebuf.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <deque>
#include <sstream>
#include <thread>

#include "diplo/error.hpp"
#include "diplo/protocol.hpp"
#include "doctest.h"
#include "support/sampling.hpp"

using namespace diplo;
using namespace std::chrono_literals;

namespace {

const MapGraph& M() { return standard_map(); }

std::string echo(const std::string& flags = "") { return std::string(DIPLO_ECHO_AGENT) + " " + flags; }

Rules until(int year) {
  Rules r;
  r.last_year = year;
  return r;
}

// Scripted peer: every send is recorded, replies are handed out in order.
class ScriptedTransport : public Transport {
 public:
  ScriptedTransport(std::deque<std::string>* replies, std::vector<std::string>* sent)
      : replies_(replies), sent_(sent) {}
  void send(const std::string& line) override { sent_->push_back(line); }
  std::optional<std::string> receive(std::chrono::milliseconds) override {
    if (replies_->empty()) return std::nullopt;
    std::string r = replies_->front();
    replies_->pop_front();
    return r;
  }

 private:
  std::deque<std::string>* replies_;
  std::vector<std::string>* sent_;
};

struct Seven {
  std::array<std::unique_ptr<Agent>, kNumPowers> owned;
  Seats seats;
  explicit Seven(const std::function<std::unique_ptr<Agent>(Power)>& make) {
    for (Power p : kAllPowers) {
      owned[index(p)] = make(p);
      seats[index(p)] = owned[index(p)].get();
    }
  }
  int substitutions() const {
    int n = 0;
    for (const auto& a : owned)
      if (auto* e = dynamic_cast<ExternalAgent*>(a.get())) n += e->substitutions();
    return n;
  }
};

}  // namespace

TEST_CASE("requests carry everything an agent needs") {
  const auto states = sampling::game_states(M(), 1, 21);
  int checked = 0;
  for (std::size_t i = 1; i < states.size() && checked < 40; i += 3) {
    const GameState& s = states[i];
    for (Power p : kAllPowers) {
      AgentObservation obs = observe(M(), s, p, {});
      if (obs.legal.empty()) continue;
      if (s.phase().kind == PhaseKind::Movement) obs.prev_orders = {Order::hold(UnitKind::Army, M().location("PAR"))};
      const Json msg = request_message(M(), obs, 7, 99, true);
      const Json line = parse_message(msg.dump());
      const auto req = request_from_json(M(), line);
      CHECK(req->id == 7);
      CHECK(req->seed == 99);
      CHECK(req->state == s);
      CHECK(req->obs.power == p);
      CHECK(req->obs.build_count == obs.build_count);
      CHECK(req->obs.prev_orders == obs.prev_orders);
      CHECK(req->obs.legal == obs.legal);
      CHECK(tensor_from_json(line["tensors"]["board"]) == encode_board(M(), s));
      CHECK(line["decode_order"].size() == obs.legal.size());
      ++checked;
    }
  }
  CHECK(checked > 10);

  CHECK_THROWS_AS(parse_message("{\"type\": \"shout\"}"), SchemaError);
  CHECK_THROWS_AS(parse_message("[1, 2]"), SchemaError);
  CHECK_THROWS_AS(parse_message("{\"type\": \"orders\", \"id\""), SchemaError);
  Json bad = tensor_to_json(Tensor(2, 2));
  bad["layout"] = "other/9";
  CHECK_THROWS_AS(tensor_from_json(bad), SchemaError);
}

TEST_CASE("the agent side answers every request once") {
  const GameState s = initial_state(M());
  std::stringstream in, out;
  in << hello_message(M()).dump() << "\n";
  in << request_message(M(), observe(M(), s, Power::France, {}), 1, 5, false).dump() << "\n";
  in << "not json\n";
  in << Json{{"type", "request_orders"}, {"id", 2}}.dump() << "\n";
  in << bye_message().dump() << "\n";
  in << request_message(M(), observe(M(), s, Power::Italy, {}), 3, 5, false).dump() << "\n";
  HoldAgent hold;
  CHECK(serve_agent(M(), hold, in, out) == 1);
  std::vector<Json> replies;
  for (std::string line; std::getline(out, line);) replies.push_back(Json::parse(line));
  REQUIRE(replies.size() == 4);
  CHECK(replies[0]["type"] == "hello");
  CHECK(replies[0]["name"] == "hold");
  CHECK(replies[1]["type"] == "orders");
  CHECK(replies[1]["id"] == 1);
  CHECK(replies[1]["orders"].size() == 3);
  CHECK(replies[2]["type"] == "error");
  CHECK(replies[3]["type"] == "error");
  CHECK(replies[3]["id"] == 2);
}

TEST_CASE("late replies are discarded by id") {
  std::deque<std::string> replies = {Json{{"type", "hello"}, {"name", "scripted"}}.dump(),
                                     orders_message(41, {}, M()).dump(),
                                     Json{{"type", "orders"}, {"id", 1}, {"orders", {"A PAR - BUR", "F XYZ"}}}.dump()};
  std::vector<std::string> sent;
  ExternalAgent agent("scripted", [&] { return std::make_unique<ScriptedTransport>(&replies, &sent); }, 100ms);
  const GameState s = initial_state(M());
  const AgentObservation obs = observe(M(), s, Power::France, {});
  const AgentDecision d = agent.decide(M(), obs);
  CHECK(agent.name() == "scripted");
  CHECK(d.on_time);
  REQUIRE(d.orders.size() == 1);
  CHECK(d.orders[0] == parse_order(M(), "A PAR - BUR"));
  CHECK(d.notes.size() == 1);  // the unparseable order
  CHECK(agent.substitutions() == 0);
  REQUIRE(sent.size() == 2);
  CHECK(Json::parse(sent[0])["type"] == "hello");
  CHECK(Json::parse(sent[1])["type"] == "request_orders");

  // Nothing left to read: the next request times out.
  const AgentDecision late = agent.decide(M(), obs);
  CHECK_FALSE(late.on_time);
  CHECK(late.orders.empty());
  CHECK(agent.substitutions() == 1);

  replies = {Json{{"type", "hello"}}.dump(), error_message(1, "cannot think").dump()};
  ExternalAgent failing("scripted", [&] { return std::make_unique<ScriptedTransport>(&replies, &sent); }, 100ms);
  const AgentDecision e = failing.decide(M(), obs);
  CHECK_FALSE(e.on_time);
  REQUIRE(e.notes.size() == 1);
  CHECK(e.notes[0].find("cannot think") != std::string::npos);
}

TEST_CASE("seven agent processes finish a game without substitutions") {
  Seven seven([](Power) { return make_agent("exec:" + echo()); });
  std::vector<std::string> log;
  const GameRecord rec = play_game(M(), seven.seats, 3, until(1903), &log);
  CHECK(rec.outcome.ended());
  CHECK(seven.substitutions() == 0);
  CHECK(log.empty());
  CHECK(replay(M(), rec).exact);
  CHECK(seven.owned[0]->name() == "echo");
}

TEST_CASE("a bot behind the protocol plays exactly as in process") {
  const std::string serve = std::string(DIPLO_CLI) + " serve --agent random";
  Seven remote([&](Power) { return make_agent("exec:" + serve); });
  Seven local([](Power) { return make_agent("random"); });
  const GameRecord a = play_game(M(), remote.seats, 12, until(1902));
  const GameRecord b = play_game(M(), local.seats, 12, until(1902));
  CHECK(remote.substitutions() == 0);
  CHECK(a == b);

  // The same with tensors requested on every turn.
  const std::string dumb = std::string(DIPLO_CLI) + " serve --tensors --agent dumbbot";
  Seven remote_dumb([&](Power) { return make_agent("exec:" + dumb); });
  Seven local_dumb([](Power) { return make_agent("dumbbot"); });
  CHECK(play_game(M(), remote_dumb.seats, 4, until(1902)) == play_game(M(), local_dumb.seats, 4, until(1902)));
  CHECK(remote_dumb.substitutions() == 0);
}

TEST_CASE("illegal orders are dropped and flagged") {
  Seven seven([](Power p) { return make_agent(p == Power::France ? "exec:" + echo("--illegal") : "hold"); });
  std::vector<std::string> log;
  const GameRecord rec = play_game(M(), seven.seats, 1, until(1901), &log);
  CHECK(seven.substitutions() == 0);
  REQUIRE_FALSE(log.empty());
  CHECK(log[0].rfind("S1901M FRANCE: illegal order dropped: ", 0) == 0);
  // France's first unit (BRE) held by default.
  bool held = false;
  for (const OrderResult& r : rec.phases[0].results)
    if (r.power == Power::France && r.order == "F BRE H") held = r.implicit;
  CHECK(held);
}

TEST_CASE("slow, broken and unreachable agents fall into civil disorder") {
  const GameState s = initial_state(M());
  const AgentObservation obs = observe(M(), s, Power::Turkey, {});

  ExternalAgent slow("slow", [] { return spawn_process(echo("--sleep 400")); }, 150ms);
  AgentDecision d = slow.decide(M(), obs);
  CHECK_FALSE(d.on_time);
  CHECK(d.orders.empty());
  CHECK(d.notes[0].find("timeout") != std::string::npos);

  ExternalAgent garbage("garbage", [] { return spawn_process(echo("--garbage")); }, 2000ms);
  d = garbage.decide(M(), obs);
  CHECK_FALSE(d.on_time);
  CHECK(d.notes[0].find("unreadable reply") != std::string::npos);

  ExternalAgent dead("dead", [] { return spawn_process("exit 0"); }, 2000ms);
  d = dead.decide(M(), obs);
  CHECK_FALSE(d.on_time);
  d = dead.decide(M(), obs);
  CHECK(d.notes[0].find("unavailable") != std::string::npos);
  CHECK(dead.substitutions() == 2);

  // A whole game against a closed port: every power in civil disorder.
  Seven nobody([](Power) { return make_agent("tcp:127.0.0.1:1"); });
  std::vector<std::string> log;
  const GameRecord rec = play_game(M(), nobody.seats, 1, until(1901), &log);
  CHECK(rec.outcome.ended());
  CHECK(nobody.substitutions() > 0);
  CHECK_FALSE(log.empty());
  for (const PhaseRecord& ph : rec.phases)
    for (const auto& [power, list] : ph.orders) CHECK(list.empty());
  CHECK(rec.phases.back().state.units() == initial_state(M()).units());

  CHECK_THROWS_AS(make_agent("tcp:localhost"), ArgumentError);
  CHECK_THROWS_AS(make_agent("tcp:host:99999"), ArgumentError);
  CHECK_THROWS_AS(make_agent("exec:"), ArgumentError);
  CHECK_THROWS_AS(make_agent("oracle"), ArgumentError);
}

TEST_CASE("agents over TCP") {
  const int listener = ::socket(AF_INET, SOCK_STREAM, 0);
  REQUIRE(listener >= 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  REQUIRE(::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);
  socklen_t len = sizeof addr;
  ::getsockname(listener, reinterpret_cast<sockaddr*>(&addr), &len);
  REQUIRE(::listen(listener, 1) == 0);
  const int port = ntohs(addr.sin_port);

  std::thread server([listener] {
    const int fd = ::accept(listener, nullptr, nullptr);
    __gnu_cxx::stdio_filebuf<char> inbuf(fd, std::ios::in), outbuf(::dup(fd), std::ios::out);
    std::istream in(&inbuf);
    std::ostream out(&outbuf);
    GreedyAgent greedy;
    serve_agent(M(), greedy, in, out);
  });
  auto agent = make_agent("tcp:127.0.0.1:" + std::to_string(port));
  const GameState s = initial_state(M());
  const AgentObservation obs = observe(M(), s, Power::Germany, {});
  const AgentDecision d = agent->decide(M(), obs);
  GreedyAgent local;
  CHECK(d.orders == local.decide(M(), obs).orders);
  CHECK(agent->name() == "greedy");
  agent.reset();  // sends bye
  server.join();
  ::close(listener);
}

TEST_CASE("agent timeout comes from the environment") {
  ::setenv("DIPLO_AGENT_TIMEOUT", "0.25", 1);
  CHECK(default_agent_timeout() == 250ms);
  ::setenv("DIPLO_AGENT_TIMEOUT", "soon", 1);
  CHECK(default_agent_timeout() == 5000ms);
  ::unsetenv("DIPLO_AGENT_TIMEOUT");
  CHECK(default_agent_timeout() == 5000ms);
}
