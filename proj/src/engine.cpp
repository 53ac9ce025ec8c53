#include "diplo/engine.hpp"

#include "diplo/error.hpp"

namespace diplo {

Game::Game(const MapGraph& map, Rules rules) : Game(map, initial_state(map), rules) {}

Game::Game(const MapGraph& map, GameState start, Rules rules) : map_(&map), state_(std::move(start)) {
  record_.map = map.name();
  record_.rules = rules;
  record_.initial = state_;
  record_.outcome = evaluate_outcome(map, state_, rules);
}

void Game::step(const std::map<Power, std::vector<Order>>& orders) {
  SubmittedOrders text;
  for (const auto& [power, list] : orders)
    for (const Order& o : list) text[power].push_back(format_order(*map_, o));
  play(text, orders, {});
}

void Game::step_text(const SubmittedOrders& orders) {
  std::map<Power, std::vector<Order>> parsed;
  std::vector<OrderResult> unparsed;
  for (const auto& [power, list] : orders) {
    auto& out = parsed[power];
    for (const std::string& s : list) {
      try {
        out.push_back(parse_order(*map_, s));
      } catch (const ParseError& e) {
        unparsed.push_back({power, s, OrderResult::Invalid, e.what(), false});
      }
    }
  }
  play(orders, parsed, unparsed);
}

void Game::play(const SubmittedOrders& text, const std::map<Power, std::vector<Order>>& parsed,
                const std::vector<OrderResult>& unparsed) {
  if (ended()) throw StateError("game has ended");
  const Phase played = state_.phase();
  std::vector<Order> valid;
  std::vector<OrderResult> rejected = unparsed;
  for (const auto& [power, list] : parsed) {
    for (const OrderCheck& c : validate(*map_, state_, power, list)) {
      if (c.valid)
        valid.push_back(c.order);
      else
        rejected.push_back({power, format_order(*map_, c.order), OrderResult::Invalid, c.reason, false});
    }
  }
  last_resolution_ = resolve(*map_, state_, valid);

  PhaseRecord rec;
  rec.name = played.code();
  rec.orders = text;
  for (const OrderVerdict& v : last_resolution_.verdicts)
    rec.results.push_back({v.power, format_order(*map_, v.order), v.succeeds ? OrderResult::Succeeds : OrderResult::Fails,
                           v.reason, v.implicit});
  rec.results.insert(rec.results.end(), rejected.begin(), rejected.end());

  if (played.kind == PhaseKind::Movement) {
    last_movement_.clear();
    for (const Order& o : valid)
      if (o.type != OrderType::Waive) last_movement_.push_back(o);
  }
  state_ = apply(*map_, state_, last_resolution_);
  rec.state = state_;
  record_.phases.push_back(std::move(rec));
  record_.outcome = evaluate_outcome(*map_, state_, record_.rules);
}

Outcome evaluate_outcome(const MapGraph&, const GameState& state, const Rules& rules) {
  Outcome out;
  for (Power p : kAllPowers)
    if (!state.is_eliminated(p)) out.survivors.push_back(p);
  for (Power p : kAllPowers)
    if (state.sc_count(p) >= kSoloThreshold) {
      out.kind = OutcomeKind::Solo;
      out.winner = p;
      return out;
    }
  if (out.survivors.size() == 1) {
    out.kind = OutcomeKind::Solo;
    out.winner = out.survivors[0];
    return out;
  }
  if (state.phase().year > rules.last_year) out.kind = OutcomeKind::Draw;
  return out;
}

std::array<double, kNumPowers> score(const MapGraph&, const GameState& final_state, const Outcome& outcome,
                                     ScoringSystem system) {
  std::array<double, kNumPowers> pts{};
  if (!outcome.ended()) throw StateError("game is still ongoing");
  const double total = kNumSupplyCenters;
  if (outcome.kind == OutcomeKind::Solo) {
    pts[index(*outcome.winner)] = total;
    return pts;
  }
  if (system == ScoringSystem::DrawBased) {
    for (Power p : outcome.survivors) pts[index(p)] = total / static_cast<double>(outcome.survivors.size());
    return pts;
  }
  int centres = 0;
  for (Power p : outcome.survivors) centres += final_state.sc_count(p);
  if (centres == 0) return pts;
  for (Power p : outcome.survivors) pts[index(p)] = total * final_state.sc_count(p) / centres;
  return pts;
}

double reward(const MapGraph& map, const GameState& prev, const GameState& state, Power power, bool terminal,
              const Outcome& final_outcome) {
  const double local = state.controlled_sc_count(map, power) - prev.controlled_sc_count(map, power);
  double term = 0.0;
  if (terminal) term = score(map, state, final_outcome, ScoringSystem::ScCount)[index(power)];
  return (local + term) / 2.0;
}

}  // namespace diplo
