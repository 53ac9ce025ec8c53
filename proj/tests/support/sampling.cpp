#include "support/sampling.hpp"

namespace sampling {

std::vector<diplo::GameRecord> games(const diplo::MapGraph& map, int n, std::uint64_t seed, const std::string& agent) {
  return diplo::run_games(map, n, seed, [&](int) {
    diplo::SeatAssignment s;
    for (auto& a : s.agents) a = diplo::make_builtin_agent(agent);
    return s;
  });
}

std::vector<diplo::GameState> game_states(const diplo::MapGraph& map, int n, std::uint64_t seed,
                                          const std::string& agent) {
  std::vector<diplo::GameState> out;
  for (const diplo::GameRecord& rec : games(map, n, seed, agent)) {
    out.push_back(rec.initial);
    for (const diplo::PhaseRecord& ph : rec.phases) out.push_back(ph.state);
  }
  return out;
}

}  // namespace sampling
