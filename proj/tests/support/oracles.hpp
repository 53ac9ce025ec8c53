#pragma once

// Reference implementations used only by tests. They are written from the
// rules directly and share no resolution or legality code with the library.

#include <optional>
#include <random>
#include <vector>

#include "diplo/map.hpp"
#include "diplo/order.hpp"
#include "diplo/state.hpp"

namespace oracle {

struct Outcome {
  std::vector<bool> succeeds;       // per order, in input order
  std::vector<diplo::Loc> dislodged;  // sorted by location index
};

struct AdjudicationResult {
  // Empty when the position has no well-defined answer under the oracle
  // (several convoy-paradox readings that disagree).
  std::optional<Outcome> outcome;
  int consistent_assignments = 0;  // before any tie-breaking rule
};

// Movement resolution by exhaustive search: every success/failure assignment
// of the move, support and convoy decisions is checked against the rules and
// the consistent ones kept. A unique fixed point is the answer. Several fixed
// points without convoys are circular movement and the one moving the most
// units wins. Otherwise convoys are forced to fail, smallest sets first,
// until a single reading remains. `orders` holds one order per unit.
AdjudicationResult adjudicate(const diplo::MapGraph& map, const diplo::GameState& state,
                              const std::vector<diplo::Order>& orders);

// Every syntactically possible order at `loc`, filtered by the rules.
std::vector<diplo::Order> legal_orders(const diplo::MapGraph& map, const diplo::GameState& state, diplo::Loc loc);

// A random movement position of 2..max_units units clustered around a random
// province with one legal order per unit, biased towards supports and
// convoys that match other orders.
struct SmallScenario {
  diplo::GameState state;
  std::vector<diplo::Order> orders;
};
SmallScenario random_small_scenario(const diplo::MapGraph& map, std::mt19937_64& rng, int max_units);

}  // namespace oracle
