#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "diplo/engine.hpp"

namespace diplo {

struct AgentObservation {
  Power power;
  const GameState* state = nullptr;
  std::vector<Order> prev_orders;  // last movement phase, all powers
  const GameState* prev_state = nullptr;  // position prev_orders were given in
  // Orderable locations in location order with their legal orders.
  std::vector<std::pair<Loc, std::vector<Order>>> legal;
  int build_count = 0;  // adjustment phases only
};

struct AgentDecision {
  std::vector<Order> orders;
  bool on_time = true;
  // Problems the agent or its transport ran into; the runtime logs them.
  std::vector<std::string> notes;
};

AgentObservation observe(const MapGraph& map, const GameState& state, Power power,
                         const std::vector<Order>& prev_orders);

class Agent {
 public:
  virtual ~Agent() = default;
  virtual std::string name() const = 0;
  // Called before each game with a seed derived from the game seed and power.
  virtual void new_game(std::uint64_t seed) { (void)seed; }
  virtual AgentDecision decide(const MapGraph& map, const AgentObservation& obs) = 0;
};

// Uniform choice per orderable location. Adjustments: |build_count| sites
// or units are sampled and each gets a uniform legal order.
class RandomAgent : public Agent {
 public:
  explicit RandomAgent(std::uint64_t seed = 0) : rng_(seed) {}
  std::string name() const override { return "random"; }
  void new_game(std::uint64_t seed) override { rng_.seed(seed); }
  AgentDecision decide(const MapGraph& map, const AgentObservation& obs) override;

 private:
  std::mt19937_64 rng_;
};

// Moves onto an adjacent centre it does not own (neutral first, then enemy,
// then by name); otherwise one step towards the nearest such centre. A unit
// standing on a centre it does not own holds to take it. Never supports or
// convoys. Deterministic.
class GreedyAgent : public Agent {
 public:
  std::string name() const override { return "greedy"; }
  AgentDecision decide(const MapGraph& map, const AgentObservation& obs) override;
};

// Province-value bot: attack values on centres it does not own, defence
// values on its threatened centres, diffused over neighbours; units take the
// best free destination and back each other's attacks and defences.
class DumbBot : public Agent {
 public:
  struct Params {
    int diffusion_rounds = 5;
    double decay = 0.5;
    double noise = 0.05;  // relative
  };
  explicit DumbBot(std::uint64_t seed = 0) : DumbBot(seed, Params{}) {}
  DumbBot(std::uint64_t seed, Params params) : rng_(seed), params_(params) {}
  std::string name() const override { return "dumbbot"; }
  void new_game(std::uint64_t seed) override { rng_.seed(seed); }
  AgentDecision decide(const MapGraph& map, const AgentObservation& obs) override;

  // Value per province for `power` before noise.
  std::array<double, kNumProvinces> province_values(const MapGraph& map, const GameState& state, Power power) const;

 private:
  std::mt19937_64 rng_;
  Params params_;
};

// Holds everything; retreating units disband and builds are waived.
class HoldAgent : public Agent {
 public:
  std::string name() const override { return "hold"; }
  AgentDecision decide(const MapGraph& map, const AgentObservation& obs) override;
};

// Drops orders outside the legal sets, duplicates per location and builds or
// disbands beyond the allowance, noting each one.
AgentDecision sanitize(const MapGraph& map, const AgentObservation& obs, AgentDecision decision);

using AgentFactory = std::function<std::unique_ptr<Agent>()>;

// Builds the named agent: random, greedy, dumbbot or hold. Throws ArgumentError.
std::unique_ptr<Agent> make_builtin_agent(const std::string& name, std::uint64_t seed = 0);

using Seats = std::array<Agent*, kNumPowers>;

// Plays one game to its end. Agents are reseeded from `seed` per power.
GameRecord play_game(const MapGraph& map, const Seats& seats, std::uint64_t seed, const Rules& rules = {},
                     std::vector<std::string>* log = nullptr);

// Per-power agent seed for a game.
std::uint64_t agent_seed(std::uint64_t game_seed, Power power);

// Runs games 0..n-1 on `threads` workers (0: hardware concurrency).
// `seats_for(i)` creates the agents of game i and must be thread-safe; game i
// is seeded with seed + i. Results come back in game order, and so do the
// agents' notes when `logs` is given.
struct SeatAssignment {
  std::array<std::unique_ptr<Agent>, kNumPowers> agents;
};
std::vector<GameRecord> run_games(const MapGraph& map, int n, std::uint64_t seed,
                                  const std::function<SeatAssignment(int)>& seats_for, const Rules& rules = {},
                                  int threads = 0, std::vector<std::vector<std::string>>* logs = nullptr);

}  // namespace diplo
