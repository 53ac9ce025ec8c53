#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "diplo/bots.hpp"

namespace diplo {

struct Rating {
  double mu = 25.0;
  double sigma = 25.0 / 3.0;

  double conservative() const { return mu - 3.0 * sigma; }
  friend bool operator==(const Rating&, const Rating&) = default;
};

struct TrueSkillParams {
  double mu = 25.0;
  double sigma = 25.0 / 3.0;
  double beta = 25.0 / 6.0;
  double tau = 25.0 / 300.0;
  double draw_probability = 0.10;

  Rating initial() const { return {mu, sigma}; }
  // Performance gap below which two players are considered tied.
  double draw_margin() const;
};

// Rank per power (indexed by Power), 1 is best. Survivors outrank every
// eliminated power and are ordered by final centre count; eliminated powers
// are ordered by when they were eliminated, the first one last. Equal
// standing shares a rank (1, 2, 2, 4, ...). Throws StateError while ongoing.
using GameRanking = std::array<int, kNumPowers>;
GameRanking rank_game(const GameRecord& record);

// Free-for-all TrueSkill update of single-player teams. `ranks` has one entry
// per player (lower is better, equal means tied). Players are chained in rank
// order with a pairwise difference factor between neighbours and the chain is
// solved by expectation propagation.
std::vector<Rating> trueskill_update(std::span<const Rating> ratings, std::span<const int> ranks,
                                     const TrueSkillParams& params = {});

// A named entrant and a way to make fresh copies of it.
struct Entrant {
  std::string name;
  AgentFactory make;
};

// Entrant from a built-in agent name.
Entrant builtin_entrant(const std::string& name);

// Outcome categories of one seat in a finished game. Exactly one applies.
enum class SeatResult { Win, MostSc, Survived, Defeated };
SeatResult seat_result(const GameRecord& record, Power power);

struct OneVsSixSummary {
  std::string agent_a;
  std::string agent_b;
  int games = 0;
  // Counts for agent A's seat, by SeatResult.
  std::array<int, 4> a_counts{};
  // Counts over the six agent B seats.
  std::array<int, 4> b_counts{};
  // Agent A wins per power it played.
  std::array<int, kNumPowers> a_wins_by_power{};
  std::array<int, kNumPowers> a_games_by_power{};

  double percent(SeatResult r) const { return games ? 100.0 * a_counts[static_cast<int>(r)] / games : 0.0; }
  friend bool operator==(const OneVsSixSummary&, const OneVsSixSummary&) = default;
};

// Game i gives agent A the power i mod 7 and agent B every other power; game
// i is seeded with seed + i.
OneVsSixSummary run_1v6(const MapGraph& map, const Entrant& a, const Entrant& b, int n_games, std::uint64_t seed,
                        const Rules& rules = {}, int threads = 0);

struct PoolResult {
  std::vector<std::string> names;
  std::vector<Rating> ratings;
  std::vector<int> seats;  // seats played per entrant
  // After each game, the sigma of every entrant.
  std::vector<std::vector<double>> sigma_trace;
  friend bool operator==(const PoolResult&, const PoolResult&) = default;
};

// Each game draws the entrant of every power uniformly and independently.
// Games run in parallel; ratings are updated in game order. An entrant seated
// several times in one game plays each seat as a separate player and its
// rating absorbs the evidence of all of them.
PoolResult run_pool(const MapGraph& map, const std::vector<Entrant>& pool, int n_games, std::uint64_t seed,
                    const TrueSkillParams& params = {}, const Rules& rules = {}, int threads = 0);

// Seat plan of pool game i: the entrant index per power.
std::array<int, kNumPowers> pool_seats(std::size_t pool_size, std::uint64_t seed, int game);

// Homogeneity chi-square of agent A's seat results against agent B's over the
// categories either side reached. Returns the p-value and degrees of freedom.
struct ChiSquare {
  double statistic = 0;
  int dof = 0;
  double p_value = 1;
};
ChiSquare seat_homogeneity(const OneVsSixSummary& summary);

// Tables in the 1-vs-6 and pool formats.
std::string one_vs_six_csv(const OneVsSixSummary& s);
std::string one_vs_six_json(const OneVsSixSummary& s);
std::string pool_csv(const PoolResult& r);
std::string pool_json(const PoolResult& r);
std::string sigma_trace_csv(const PoolResult& r);

}  // namespace diplo
