// Acceptance run: one PASS/FAIL line per requirement, exit status 1 if any
// fails. Every check draws its own seeded data so lines are reproducible.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "diplo/adjudicator.hpp"
#include "diplo/analysis.hpp"
#include "diplo/features.hpp"
#include "diplo/ingest.hpp"
#include "diplo/scenario.hpp"
#include "diplo/tournament.hpp"
#include "support/coalition_cases.hpp"
#include "support/oracles.hpp"
#include "support/sampling.hpp"

namespace fs = std::filesystem;
using namespace diplo;
using Clock = std::chrono::steady_clock;

namespace {

const MapGraph& M() { return standard_map(); }

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

// Random legal orders for every unit of a movement position.
std::vector<Order> random_orders(const GameState& s, std::mt19937_64& rng) {
  std::vector<Order> out;
  const ConvoyGraph convoys(M(), s);
  for (const Unit& u : s.units()) {
    const auto legal = legal_orders(M(), s, convoys, u.location);
    out.push_back(legal.orders[rng() % legal.orders.size()]);
  }
  return out;
}

std::vector<GameState> movement_states(int games, std::uint64_t seed) {
  std::vector<GameState> out;
  for (const GameState& s : sampling::game_states(M(), games, seed))
    if (s.phase().kind == PhaseKind::Movement && !s.units().empty()) out.push_back(s);
  return out;
}

// ---------------------------------------------------------------------------

Verdict corpus() {
  const auto start = Clock::now();
  int cases = 0, failed = 0;
  for (const auto& entry : fs::directory_iterator(DIPLO_CORPUS_DIR)) {
    if (entry.path().extension() != ".scn") continue;
    std::ifstream in(entry.path());
    std::stringstream text;
    text << in.rdbuf();
    for (const Scenario& sc : parse_scenarios(M(), text.str())) {
      ++cases;
      failed += !run_scenario(M(), sc).passed();
    }
  }
  const double t = seconds_since(start);
  return {cases >= 120 && failed == 0 && t < 5.0, fmt("%.0f cases, %.0f failed, %.2f s", cases, failed, t)};
}

Verdict oracle_equivalence() {
  std::mt19937_64 rng(500);
  int compared = 0, mismatched = 0, undefined = 0;
  while (compared < 500) {
    const auto sc = oracle::random_small_scenario(M(), rng, 8);
    const auto expected = oracle::adjudicate(M(), sc.state, sc.orders);
    if (!expected.outcome) {
      ++undefined;
      continue;
    }
    ++compared;
    const Resolution r = resolve_movement(M(), sc.state, sc.orders);
    bool same = true;
    for (std::size_t i = 0; i < sc.orders.size(); ++i) {
      const OrderVerdict* v = r.find(sc.orders[i]);
      same = same && v && v->succeeds == expected.outcome->succeeds[i];
    }
    std::vector<Loc> dislodged;
    for (const auto& d : r.dislodged) dislodged.push_back(d.unit.location);
    std::sort(dislodged.begin(), dislodged.end(), [](Loc a, Loc b) { return index(a) < index(b); });
    same = same && dislodged == expected.outcome->dislodged;
    mismatched += !same;
  }
  return {mismatched == 0,
          fmt("%.0f scenarios, %.0f mismatches (%.0f paradox positions without a unique oracle answer skipped)",
              compared, mismatched, undefined)};
}

Verdict permutation_invariance() {
  const auto states = movement_states(12, 10000);
  std::mt19937_64 rng(10000);
  int differing = 0;
  for (int n = 0; n < 10000; ++n) {
    const GameState& s = states[rng() % states.size()];
    std::vector<Order> orders = random_orders(s, rng);
    const Resolution base = resolve_movement(M(), s, orders);
    std::shuffle(orders.begin(), orders.end(), rng);
    differing += !(resolve_movement(M(), s, orders) == base);
  }
  return {differing == 0, fmt("10000 phases from %.0f game positions, %.0f differ", states.size(), differing)};
}

Verdict legality() {
  const auto all = sampling::game_states(M(), 10, 1000);
  std::mt19937_64 rng(1000);
  int states = 0, mismatches = 0;
  long units = 0, legal_total = 0;
  for (; states < 1000; ++states) {
    const GameState& s = all[rng() % all.size()];
    for (int l = 0; l < kNumLocations; ++l) {
      const Loc loc = loc_at(l);
      const auto lib = legal_orders(M(), s, loc);
      if (!lib.orderable && !s.unit_at(M(), loc)) continue;
      mismatches += lib.orders != oracle::legal_orders(M(), s, loc);
      if (s.phase().kind == PhaseKind::Movement && lib.orderable) {
        ++units;
        legal_total += static_cast<long>(lib.orders.size());
      }
    }
  }
  const double mean = units ? static_cast<double>(legal_total) / units : 0;
  return {mismatches == 0 && std::abs(mean - 26) <= 10,
          fmt("%.0f states, %.0f mismatching sites, mean legal orders per unit %.1f", states, mismatches, mean)};
}

Verdict mask_consistency() {
  const OrderVocabulary& vocab = OrderVocabulary::standard();
  const auto all = sampling::game_states(M(), 5, 1001);
  std::mt19937_64 rng(1001);
  int mismatched = 0, orderable = 0;
  for (int n = 0; n < 1000; ++n) {
    const GameState& s = all[rng() % all.size()];
    Loc loc = loc_at(static_cast<int>(rng() % kNumLocations));
    if (n % 2 == 0 && !s.units().empty()) loc = s.units()[rng() % s.units().size()].location;
    const auto mask = legality_mask(vocab, M(), s, loc);
    const auto legal = legal_orders(M(), s, loc);
    std::set<int> want;
    for (const Order& o : legal.orders) want.insert(*vocab.find(o));
    std::set<int> got;
    for (std::size_t i = 0; i < mask.size(); ++i)
      if (mask[i]) got.insert(static_cast<int>(i));
    mismatched += got != want;
    orderable += legal.orderable;
  }
  return {mismatched == 0, fmt("1000 pairs (%.0f orderable), %.0f mismatches", orderable, mismatched)};
}

Verdict trueskill_protocol() {
  std::vector<Entrant> pool;
  for (const char* name : {"random", "greedy", "dumbbot", "hold"}) pool.push_back(builtin_entrant(name));
  const auto start = Clock::now();
  const PoolResult r = run_pool(M(), pool, 1378, 1378);
  double worst_sigma = 0;
  std::string table;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    worst_sigma = std::max(worst_sigma, r.ratings[i].sigma);
    table += " " + r.names[i] + fmt(" %.2f/%.3f", r.ratings[i].mu, r.ratings[i].sigma);
  }
  // Two equal players: the winner gains exactly what the loser gives up.
  double worst_asym = 0;
  for (const Rating& x : {Rating{25, 25.0 / 3}, Rating{30, 2}, Rating{12.5, 0.8}}) {
    const Rating pair[] = {x, x};
    for (const auto& ranks : {std::array<int, 2>{1, 2}, std::array<int, 2>{2, 1}}) {
      const auto out = trueskill_update(pair, ranks);
      worst_asym = std::max(worst_asym, std::abs((out[0].mu - x.mu) + (out[1].mu - x.mu)));
    }
  }
  return {worst_sigma <= 1.0 && worst_asym <= 1e-9,
          fmt("1378 games in %.0f s, max sigma %.3f, max |dmu1 + dmu2| %.1e;", seconds_since(start), worst_sigma,
              worst_asym) +
              table};
}

Verdict coalition_counterfactuals() {
  int exact = 0, supports = 0;
  for (const coalition::Case& c : coalition::cases()) {
    const auto checks = classify_supports(M(), coalition::position(M(), c), coalition::orders(M(), c));
    bool ok = checks.size() == c.expected.size();
    for (const coalition::Expected& e : c.expected) {
      const Order support = parse_order(M(), e.support);
      const auto it = std::find_if(checks.begin(), checks.end(), [&](const SupportCheck& k) { return k.support == support; });
      ok = ok && it != checks.end() && it->cross_power == e.cross_power && it->effective == e.effective;
      ++supports;
    }
    exact += ok;
  }
  const int n_cases = static_cast<int>(coalition::cases().size());

  // Invariant per game over generated games, in batches.
  int games = 0, violations = 0, rejected = 0;
  CoalitionReport total;
  for (int batch = 0; batch < 20; ++batch) {
    const auto records = sampling::games(M(), 50, 70000 + 50 * batch);
    for (const GameRecord& rec : records) {
      const GameRecord one[] = {rec};
      const CoalitionReport r = coalition_metrics(M(), one);
      ++games;
      rejected += r.rejected_records;
      violations += !(r.effective_x_supports <= r.x_supports && r.x_supports <= r.supports);
      total.supports += r.supports;
      total.x_supports += r.x_supports;
      total.effective_x_supports += r.effective_x_supports;
    }
  }
  return {exact == n_cases && n_cases == 10 && violations == 0 && rejected == 0,
          fmt("%.0f/%.0f scripted cases exact (%.0f supports); ", exact, n_cases, supports) +
              fmt("%.0f games, %.0f violations, effective %.0f", games, violations, total.effective_x_supports) +
              fmt(" <= X %.0f <= total %.0f", total.x_supports, total.supports)};
}

Verdict replay_check() {
  int games = 0, inexact = 0, mutated = 0, located = 0;
  std::mt19937_64 rng(808);
  const char* agents[] = {"random", "greedy", "dumbbot", "hold"};
  for (int batch = 0; batch < 8; ++batch) {
    const auto records = sampling::games(M(), 25, 90000 + 25 * batch, agents[batch % 4]);
    for (const GameRecord& rec : records) {
      ++games;
      const GameRecord back = read_record(M(), write_record(M(), rec));
      inexact += !(back == rec) || !replay(M(), back).exact;

      // Drop one unit from the snapshot of a random phase.
      GameRecord bad = rec;
      std::size_t k = rng() % bad.phases.size();
      while (bad.phases[k].state.units().empty()) k = rng() % bad.phases.size();
      std::vector<Unit> units = bad.phases[k].state.units();
      units.erase(units.begin() + static_cast<long>(rng() % units.size()));
      bad.phases[k].state.set_units(M(), units);
      const IngestResult r = ingest(M(), write_record(M(), bad));
      ++mutated;
      located += r.reports.size() == 1 && !r.reports[0].accepted && r.reports[0].first_divergent == k;
    }
  }
  return {inexact == 0 && located == mutated,
          fmt("%.0f records, %.0f not bit-exact; %.0f/%.0f mutated records rejected at the mutated phase", games,
              inexact, located, mutated)};
}

Verdict performance() {
  const auto states = movement_states(4, 2000);
  std::mt19937_64 rng(2000);
  std::vector<std::pair<const GameState*, std::vector<Order>>> phases;
  for (int n = 0; n < 500; ++n) {
    const GameState& s = states[rng() % states.size()];
    phases.emplace_back(&s, random_orders(s, rng));
  }
  double units = 0;
  for (const auto& p : phases) units += static_cast<double>(p.second.size());
  units /= static_cast<double>(phases.size());
  long done = 0;
  volatile std::size_t sink = 0;
  const auto start = Clock::now();
  while (seconds_since(start) < 2.0)
    for (const auto& [s, orders] : phases) {
      sink = sink + resolve_movement(M(), *s, orders).dislodged.size();
      ++done;
    }
  const double rate = done / seconds_since(start);
  return {rate >= 2000, fmt("%.0f movement adjudications/s on one thread, %.1f units per phase", rate, units)};
}

Verdict one_vs_six() {
  const auto start = Clock::now();
  const auto s = run_1v6(M(), builtin_entrant("random"), builtin_entrant("random"), 700, 700);
  const ChiSquare c = seat_homogeneity(s);
  std::string counts = " A seat";
  for (int v : s.a_counts) counts += " " + std::to_string(v);
  counts += ", B seats";
  for (int v : s.b_counts) counts += " " + std::to_string(v);
  return {c.p_value > 0.01, fmt("700 games in %.0f s, chi2 %.3f, dof %.0f, p %.3f;", seconds_since(start), c.statistic,
                                c.dof, c.p_value) +
                                counts};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Verdict()>> checks[] = {
      {"rulebook conformance corpus", corpus},
      {"adjudicator oracle equivalence", oracle_equivalence},
      {"determinism and permutation invariance", permutation_invariance},
      {"legality oracle", legality},
      {"mask consistency", mask_consistency},
      {"trueskill protocol", trueskill_protocol},
      {"coalition counterfactuals", coalition_counterfactuals},
      {"replay", replay_check},
      {"performance", performance},
      {"1-vs-6 harness sanity", one_vs_six},
  };
  int failed = 0;
  for (const auto& [name, run] : checks) {
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::printf("%s %s: %s\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
