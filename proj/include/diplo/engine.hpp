#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "diplo/adjudicator.hpp"
#include "diplo/map.hpp"
#include "diplo/order.hpp"
#include "diplo/state.hpp"

namespace diplo {

struct Rules {
  // The game is drawn among the survivors once this year's last phase is
  // played.
  int last_year = 1935;

  friend bool operator==(const Rules&, const Rules&) = default;
};

enum class OutcomeKind { Ongoing, Solo, Draw };

struct Outcome {
  OutcomeKind kind = OutcomeKind::Ongoing;
  std::optional<Power> winner;  // Solo only
  std::vector<Power> survivors;  // Draw: the powers sharing it; Solo: everyone still alive

  bool ended() const { return kind != OutcomeKind::Ongoing; }
  friend bool operator==(const Outcome&, const Outcome&) = default;
};

// Text submitted by one power for one phase.
using SubmittedOrders = std::map<Power, std::vector<std::string>>;

struct OrderResult {
  Power power;
  std::string order;  // canonical text when it parsed, the raw text otherwise
  enum Kind { Succeeds, Fails, Invalid } result = Fails;
  std::string reason;
  bool implicit = false;

  friend bool operator==(const OrderResult&, const OrderResult&) = default;
};

struct PhaseRecord {
  std::string name;          // phase code
  SubmittedOrders orders;    // as submitted, per power
  std::vector<OrderResult> results;
  GameState state;           // position after the phase was applied

  friend bool operator==(const PhaseRecord&, const PhaseRecord&) = default;
};

struct GameRecord {
  std::string map = "standard";
  Rules rules;
  GameState initial;
  std::vector<PhaseRecord> phases;
  Outcome outcome;

  friend bool operator==(const GameRecord&, const GameRecord&) = default;
};

// One game in progress. Each step validates every power's orders check-style
// (invalid ones are dropped, so movement units hold), resolves the phase,
// applies it and appends a PhaseRecord.
class Game {
 public:
  Game(const MapGraph& map, Rules rules = {});
  Game(const MapGraph& map, GameState start, Rules rules = {});

  const MapGraph& map() const { return *map_; }
  const GameState& state() const { return state_; }
  const Outcome& outcome() const { return record_.outcome; }
  const GameRecord& record() const { return record_; }
  bool ended() const { return record_.outcome.ended(); }

  // Orders of the last movement phase played, all powers.
  const std::vector<Order>& last_movement_orders() const { return last_movement_; }
  // The resolution of the last step.
  const Resolution& last_resolution() const { return last_resolution_; }

  // Throws StateError once the game has ended.
  void step(const std::map<Power, std::vector<Order>>& orders);
  // Unparseable strings count as invalid orders.
  void step_text(const SubmittedOrders& orders);

 private:
  void play(const SubmittedOrders& text, const std::map<Power, std::vector<Order>>& parsed,
            const std::vector<OrderResult>& unparsed);
  void update_outcome(const Phase& played);

  const MapGraph* map_;
  GameState state_;
  GameRecord record_;
  std::vector<Order> last_movement_;
  Resolution last_resolution_;
};

// Outcome of a position: Solo when a power owns at least 18 centres or is
// the only one left, Draw among the survivors once the phase lies beyond the
// rules' last year, otherwise Ongoing.
Outcome evaluate_outcome(const MapGraph& map, const GameState& state, const Rules& rules);

enum class ScoringSystem { DrawBased, ScCount };

// Points per power (indexed by Power). A solo gives the winner 34 and the
// rest 0. DrawBased shares 34 equally among the survivors; ScCount splits it
// in proportion to the survivors' centres. Throws StateError while ongoing.
std::array<double, kNumPowers> score(const MapGraph& map, const GameState& final_state, const Outcome& outcome,
                                     ScoringSystem system);

// Per-phase learning signal: the average of the change in occupancy-adjusted
// centre control and, at the terminal step, the ScCount score.
double reward(const MapGraph& map, const GameState& prev, const GameState& state, Power power, bool terminal,
              const Outcome& final_outcome);

}  // namespace diplo
