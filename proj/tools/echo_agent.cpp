// Protocol test agent: answers every request with the first legal order of
// each orderable location (adjustments: the first |build_count| locations).

#include <chrono>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "diplo/error.hpp"
#include "diplo/protocol.hpp"

using namespace diplo;

namespace {

class EchoAgent : public Agent {
 public:
  EchoAgent(std::string name, bool illegal, int sleep_ms) : name_(std::move(name)), illegal_(illegal), sleep_ms_(sleep_ms) {}

  std::string name() const override { return name_; }

  AgentDecision decide(const MapGraph& map, const AgentObservation& obs) override {
    if (sleep_ms_ > 0) std::this_thread::sleep_for(std::chrono::milliseconds(sleep_ms_));
    AgentDecision d;
    const bool adjustment = obs.state->phase().kind == PhaseKind::Adjustment;
    const std::size_t limit = adjustment ? static_cast<std::size_t>(std::abs(obs.build_count)) : obs.legal.size();
    for (std::size_t i = 0; i < obs.legal.size() && i < limit; ++i) d.orders.push_back(obs.legal[i].second.front());
    if (illegal_ && obs.state->phase().kind == PhaseKind::Movement && !d.orders.empty()) d.orders[0] = unreachable(map, d.orders[0]);
    return d;
  }

 private:
  // A move of the same unit to the first location it cannot reach.
  static Order unreachable(const MapGraph& map, const Order& o) {
    for (int l = 0; l < kNumLocations; ++l) {
      const Loc to = loc_at(l);
      if (map.province_of(to) != map.province_of(o.loc) && map.can_occupy(to, o.kind) &&
          !map.is_adjacent(o.loc, to, o.kind) && !map.is_coast(to))
        return Order::move(o.kind, o.loc, to);
    }
    return o;
  }

  std::string name_;
  bool illegal_;
  int sleep_ms_;
};

// Answers hello properly and every request with a line that is not JSON.
void serve_garbage(std::istream& in, std::ostream& out) {
  for (std::string line; std::getline(in, line);) {
    Json msg = Json::parse(line, nullptr, false);
    if (msg.is_discarded() || !msg.is_object()) continue;
    if (msg.value("type", "") == "bye") return;
    if (msg.value("type", "") == "hello")
      out << Json{{"type", "hello"}, {"name", "garbage"}}.dump() << std::endl;
    else
      out << "this is not json {" << std::endl;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Protocol echo agent"};
  std::string name = "echo";
  bool illegal = false, garbage = false, tensors = false;
  int sleep_ms = 0;
  app.add_option("--name", name, "Name sent in hello")->capture_default_str();
  app.add_flag("--illegal", illegal, "Replace the first movement order with an unreachable move");
  app.add_option("--sleep", sleep_ms, "Delay before every reply, in milliseconds");
  app.add_flag("--garbage", garbage, "Reply to requests with malformed lines");
  app.add_flag("--tensors", tensors, "Ask for feature tensors");
  CLI11_PARSE(app, argc, argv);

  if (garbage) {
    serve_garbage(std::cin, std::cout);
    return 0;
  }
  EchoAgent agent(name, illegal, sleep_ms);
  serve_agent(standard_map(), agent, std::cin, std::cout, tensors);
  return 0;
}
