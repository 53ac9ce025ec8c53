#include "diplo/bots.hpp"

#include <algorithm>
#include <atomic>
#include <climits>
#include <mutex>
#include <optional>
#include <set>
#include <thread>

#include "diplo/error.hpp"

namespace diplo {

namespace {

template <class T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& v) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

bool is_adjustment(const AgentObservation& obs) { return obs.state->phase().kind == PhaseKind::Adjustment; }

// Up to `count` entries of `legal`, sampled without replacement.
std::vector<std::size_t> sample_sites(std::mt19937_64& rng, std::size_t available, int count) {
  std::vector<std::size_t> idx(available);
  for (std::size_t i = 0; i < available; ++i) idx[i] = i;
  std::shuffle(idx.begin(), idx.end(), rng);
  idx.resize(std::min<std::size_t>(available, static_cast<std::size_t>(std::max(count, 0))));
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::vector<Order> disbands(const MapGraph& map, const GameState& state, Power power, int count) {
  std::vector<Order> out;
  for (Loc l : auto_disband_choice(map, state, power, count))
    out.push_back(Order::disband(state.unit_at(map, l)->kind, l));
  return out;
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

AgentObservation observe(const MapGraph& map, const GameState& state, Power power,
                         const std::vector<Order>& prev_orders) {
  AgentObservation obs;
  obs.power = power;
  obs.state = &state;
  obs.prev_orders = prev_orders;
  const ConvoyGraph convoys(map, state);
  for (Loc l : units_requiring_orders(map, state, power)) {
    LegalOrders lo = legal_orders(map, state, convoys, l);
    if (lo.orderable) obs.legal.emplace_back(l, std::move(lo.orders));
  }
  if (state.phase().kind == PhaseKind::Adjustment) obs.build_count = build_count(map, state, power);
  return obs;
}

AgentDecision sanitize(const MapGraph& map, const AgentObservation& obs, AgentDecision decision) {
  AgentDecision out;
  out.on_time = decision.on_time;
  out.notes = std::move(decision.notes);
  std::set<int> used;
  int adjustments = 0;
  const int allowance = std::abs(obs.build_count);
  for (const Order& o : decision.orders) {
    const Loc site = o.type == OrderType::Waive ? Loc{} : order_site(map, o);
    const auto it = std::find_if(obs.legal.begin(), obs.legal.end(), [&](const auto& e) {
      return o.type == OrderType::Waive ? std::binary_search(e.second.begin(), e.second.end(), o) : e.first == site;
    });
    std::string why;
    if (it == obs.legal.end() || !std::binary_search(it->second.begin(), it->second.end(), o))
      why = "illegal";
    else if (o.type != OrderType::Waive && used.count(index(site)))
      why = "duplicate";
    else if (is_adjustment(obs) && adjustments >= allowance)
      why = "beyond allowance";
    if (!why.empty()) {
      out.notes.push_back(why + " order dropped: " + format_order(map, o));
      continue;
    }
    if (o.type != OrderType::Waive) used.insert(index(site));
    if (is_adjustment(obs)) ++adjustments;
    out.orders.push_back(o);
  }
  return out;
}

// ---------------------------------------------------------------------------

AgentDecision RandomAgent::decide(const MapGraph&, const AgentObservation& obs) {
  AgentDecision d;
  if (is_adjustment(obs)) {
    for (std::size_t i : sample_sites(rng_, obs.legal.size(), std::abs(obs.build_count)))
      d.orders.push_back(pick(rng_, obs.legal[i].second));
    return d;
  }
  for (const auto& [loc, legal] : obs.legal) d.orders.push_back(pick(rng_, legal));
  return d;
}

// ---------------------------------------------------------------------------

namespace {

struct Targets {
  std::vector<Loc> locations;  // every location of a centre the power does not own
};

Targets unowned_centres(const MapGraph& map, const GameState& state, Power power) {
  Targets t;
  for (Province p : map.supply_centers())
    if (state.sc_owner(map, p) != power)
      for (Loc l : map.province_locations(p)) t.locations.push_back(l);
  return t;
}

int distance_to(const MapGraph& map, Loc from, UnitKind k, const Targets& t) {
  int best = INT_MAX;
  for (Loc l : t.locations) {
    if (!map.can_occupy(l, k)) continue;
    const int d = map.unit_distance(from, l, k);
    if (d >= 0) best = std::min(best, d);
  }
  return best;
}

}  // namespace

AgentDecision GreedyAgent::decide(const MapGraph& map, const AgentObservation& obs) {
  AgentDecision d;
  const GameState& s = *obs.state;
  const Targets targets = unowned_centres(map, s, obs.power);
  auto unowned_sc = [&](Province p) { return map.is_supply_center(p) && s.sc_owner(map, p) != obs.power; };
  // Neutral before enemy, then by name.
  auto conquest_key = [&](Loc dest) {
    const Province p = map.province_of(dest);
    return std::make_pair(s.sc_owner(map, p).has_value(), std::string(map.location_name(dest)));
  };

  const PhaseKind kind = s.phase().kind;
  if (kind == PhaseKind::Adjustment) {
    if (obs.build_count < 0) {
      d.orders = disbands(map, s, obs.power, -obs.build_count);
      return d;
    }
    int armies = 0, fleets = 0;
    for (const Unit& u : s.units())
      if (u.owner == obs.power) (u.kind == UnitKind::Army ? armies : fleets)++;
    for (const auto& [loc, legal] : obs.legal) {
      if (static_cast<int>(d.orders.size()) >= obs.build_count) break;
      const bool coastal = map.terrain(loc) == Terrain::Coastal;
      const UnitKind want = coastal && fleets < armies ? UnitKind::Fleet : UnitKind::Army;
      std::optional<Order> choice;
      for (const Order& o : legal)
        if (o.type == OrderType::Build && o.kind == want && (!choice || map.location_name(o.loc) < map.location_name(choice->loc)))
          choice = o;
      if (!choice) continue;
      d.orders.push_back(*choice);
      (want == UnitKind::Army ? armies : fleets)++;
    }
    return d;
  }

  const OrderType step = kind == PhaseKind::Movement ? OrderType::Move : OrderType::Retreat;
  for (const auto& [loc, legal] : obs.legal) {
    const UnitKind uk = legal.front().kind;
    if (kind == PhaseKind::Movement && unowned_sc(map.province_of(loc))) {
      d.orders.push_back(Order::hold(uk, loc));
      continue;
    }
    std::optional<Order> conquer, approach;
    int approach_dist = INT_MAX;
    for (const Order& o : legal) {
      if (o.type != step || o.via_convoy) continue;
      if (unowned_sc(map.province_of(o.dest))) {
        if (!conquer || conquest_key(o.dest) < conquest_key(conquer->dest)) conquer = o;
        continue;
      }
      const int dist = distance_to(map, o.dest, uk, targets);
      if (dist < approach_dist ||
          (dist == approach_dist && approach && map.location_name(o.dest) < map.location_name(approach->dest))) {
        approach = o;
        approach_dist = dist;
      }
    }
    if (conquer)
      d.orders.push_back(*conquer);
    else if (approach && approach_dist != INT_MAX)
      d.orders.push_back(*approach);
    else
      d.orders.push_back(kind == PhaseKind::Movement ? Order::hold(uk, loc) : Order::disband(uk, loc));
  }
  return d;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::vector<int>> province_neighbours(const MapGraph& map) {
  std::vector<std::vector<int>> out(kNumProvinces);
  for (int l = 0; l < kNumLocations; ++l) {
    const int p = index(map.province_of(loc_at(l)));
    for (Loc n : map.graph_neighbors(loc_at(l))) {
      const int q = index(map.province_of(n));
      if (q != p && std::find(out[p].begin(), out[p].end(), q) == out[p].end()) out[p].push_back(q);
    }
  }
  return out;
}

// Enemy units able to move into the province.
int threat(const MapGraph& map, const GameState& s, Power me, Province p) {
  int n = 0;
  for (const Unit& u : s.units())
    if (u.owner != me && map.province_of(u.location) != p && map.reaches_province(u.location, p, u.kind)) ++n;
  return n;
}

}  // namespace

std::array<double, kNumProvinces> DumbBot::province_values(const MapGraph& map, const GameState& s, Power me) const {
  static const auto neighbours = province_neighbours(map);
  std::array<double, kNumProvinces> v{};
  for (Province p : map.supply_centers()) {
    const auto owner = s.sc_owner(map, p);
    if (owner == me) {
      const int t = threat(map, s, me, p);
      v[index(p)] = t > 0 ? 6.0 * t : 1.0;
    } else if (!owner) {
      v[index(p)] = 10.0;
    } else {
      v[index(p)] = 8.0 + 0.5 * s.sc_count(*owner);
    }
  }
  for (int r = 0; r < params_.diffusion_rounds; ++r) {
    std::array<double, kNumProvinces> next = v;
    for (int p = 0; p < kNumProvinces; ++p) {
      if (neighbours[p].empty()) continue;
      double sum = 0;
      for (int q : neighbours[p]) sum += v[q];
      next[p] += params_.decay * sum / static_cast<double>(neighbours[p].size());
    }
    v = next;
  }
  return v;
}

AgentDecision DumbBot::decide(const MapGraph& map, const AgentObservation& obs) {
  AgentDecision d;
  const GameState& s = *obs.state;
  auto value = province_values(map, s, obs.power);
  std::uniform_real_distribution<double> jitter(-params_.noise, params_.noise);
  for (double& x : value) x *= 1.0 + jitter(rng_);
  auto val = [&](Loc l) { return value[index(map.province_of(l))]; };
  const PhaseKind kind = s.phase().kind;

  if (kind == PhaseKind::Adjustment) {
    std::vector<std::pair<double, std::size_t>> ranked;
    for (std::size_t i = 0; i < obs.legal.size(); ++i) ranked.emplace_back(val(obs.legal[i].first), i);
    if (obs.build_count < 0) {
      // Lowest-valued units go first.
      std::sort(ranked.begin(), ranked.end());
      for (int i = 0; i < -obs.build_count && i < static_cast<int>(ranked.size()); ++i) {
        const Loc l = obs.legal[ranked[i].second].first;
        d.orders.push_back(Order::disband(s.unit_at(map, l)->kind, l));
      }
      return d;
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    for (int i = 0; i < obs.build_count && i < static_cast<int>(ranked.size()); ++i) {
      const auto& legal = obs.legal[ranked[i].second].second;
      // Each buildable location scored by the best province it could then reach.
      std::optional<Order> best;
      double best_v = -1;
      for (const Order& o : legal) {
        if (o.type != OrderType::Build) continue;
        double reach = 0;
        for (Loc n : map.adjacent(o.loc, o.kind)) reach = std::max(reach, val(n));
        if (reach > best_v) {
          best_v = reach;
          best = o;
        }
      }
      if (best) d.orders.push_back(*best);
    }
    return d;
  }

  if (kind == PhaseKind::Retreat) {
    for (const auto& [loc, legal] : obs.legal) {
      const Order* best = nullptr;
      for (const Order& o : legal)
        if (o.type == OrderType::Retreat && (!best || val(o.dest) > val(best->dest))) best = &o;
      d.orders.push_back(best ? *best : legal.front());
    }
    return d;
  }

  // Movement: every unit ranks hold and its direct moves by destination value.
  struct Choice {
    Loc loc;
    const std::vector<Order>* legal;
    std::vector<std::pair<double, Order>> options;  // best first
    Order order;
    double chosen = 0;
  };
  std::vector<Choice> units;
  for (const auto& [loc, legal] : obs.legal) {
    Choice c{loc, &legal, {}, Order::hold(legal.front().kind, loc), 0};
    c.options.emplace_back(val(loc), c.order);
    for (const Order& o : legal) {
      if (o.type != OrderType::Move || o.via_convoy) continue;
      const Unit* there = s.unit_in(map.province_of(o.dest));
      if (there && there->owner == obs.power) continue;
      c.options.emplace_back(val(o.dest), o);
    }
    std::stable_sort(c.options.begin(), c.options.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    units.push_back(std::move(c));
  }
  std::vector<std::size_t> rank(units.size());
  for (std::size_t i = 0; i < rank.size(); ++i) rank[i] = i;
  std::stable_sort(rank.begin(), rank.end(), [&](std::size_t a, std::size_t b) {
    return units[a].options.front().first > units[b].options.front().first;
  });
  std::set<int> claimed;
  for (std::size_t i : rank) {
    Choice& c = units[i];
    for (const auto& [v, o] : c.options) {
      const int p = index(map.province_of(o.type == OrderType::Move ? o.dest : o.loc));
      if (claimed.count(p)) continue;
      claimed.insert(p);
      c.order = o;
      c.chosen = v;
      break;
    }
  }

  // Coordination, weakest units first: back a friendly attack on a contested
  // province, or a friendly unit holding a threatened centre, when that is
  // worth more than the unit's own choice.
  std::vector<std::size_t> weakest = rank;
  std::reverse(weakest.begin(), weakest.end());
  std::vector<bool> supporting(units.size(), false), backed(units.size(), false);
  for (std::size_t i : weakest) {
    Choice& c = units[i];
    if (backed[i]) continue;
    double best_v = c.chosen;
    std::optional<Order> backing;
    std::size_t target = 0;
    for (std::size_t j = 0; j < units.size(); ++j) {
      if (j == i || supporting[j]) continue;
      const Order& f = units[j].order;
      if (f.type == OrderType::Move) {
        const Province dp = map.province_of(f.dest);
        const Unit* there = s.unit_in(dp);
        const bool contested = (there && there->owner != obs.power) || threat(map, s, obs.power, dp) > 0;
        if (!contested || value[index(dp)] <= best_v) continue;
        const Order sup = Order::support_move(c.order.kind, c.loc, f.kind, f.loc, map.parent_location(dp));
        if (std::binary_search(c.legal->begin(), c.legal->end(), sup)) {
          backing = sup;
          best_v = value[index(dp)];
          target = j;
        }
      } else {
        const Province hp = map.province_of(f.loc);
        if (!map.is_supply_center(hp) || s.sc_owner(map, hp) != obs.power) continue;
        if (threat(map, s, obs.power, hp) == 0 || value[index(hp)] <= best_v) continue;
        const Order sup = Order::support_hold(c.order.kind, c.loc, f.kind, f.loc);
        if (std::binary_search(c.legal->begin(), c.legal->end(), sup)) {
          backing = sup;
          best_v = value[index(hp)];
          target = j;
        }
      }
    }
    if (backing) {
      c.order = *backing;
      supporting[i] = true;
      backed[target] = true;
    }
  }
  for (const Choice& c : units) d.orders.push_back(c.order);
  return d;
}

// ---------------------------------------------------------------------------

AgentDecision HoldAgent::decide(const MapGraph&, const AgentObservation& obs) {
  AgentDecision d;
  if (obs.state->phase().kind != PhaseKind::Movement) return d;
  for (const auto& [loc, legal] : obs.legal) d.orders.push_back(Order::hold(legal.front().kind, loc));
  return d;
}

std::unique_ptr<Agent> make_builtin_agent(const std::string& name, std::uint64_t seed) {
  if (name == "random") return std::make_unique<RandomAgent>(seed);
  if (name == "greedy") return std::make_unique<GreedyAgent>();
  if (name == "dumbbot") return std::make_unique<DumbBot>(seed);
  if (name == "hold") return std::make_unique<HoldAgent>();
  throw ArgumentError("unknown agent '" + name + "'");
}

// ---------------------------------------------------------------------------

std::uint64_t agent_seed(std::uint64_t game_seed, Power power) {
  return splitmix(game_seed * kNumPowers + static_cast<std::uint64_t>(index(power)));
}

GameRecord play_game(const MapGraph& map, const Seats& seats, std::uint64_t seed, const Rules& rules,
                     std::vector<std::string>* log) {
  Game game(map, rules);
  for (Power p : kAllPowers) seats[index(p)]->new_game(agent_seed(seed, p));
  std::optional<GameState> issued_in;
  while (!game.ended()) {
    std::map<Power, std::vector<Order>> orders;
    for (Power p : kAllPowers) {
      AgentObservation obs = observe(map, game.state(), p, game.last_movement_orders());
      if (obs.legal.empty()) continue;
      if (issued_in) obs.prev_state = &*issued_in;
      AgentDecision dec = sanitize(map, obs, seats[index(p)]->decide(map, obs));
      if (log)
        for (const auto& n : dec.notes)
          log->push_back(game.state().phase().code() + " " + std::string(power_name(p)) + ": " + n);
      orders[p] = std::move(dec.orders);
    }
    const bool movement = game.state().phase().kind == PhaseKind::Movement;
    std::optional<GameState> before;
    if (movement) before = game.state();
    game.step(orders);
    if (movement) issued_in = std::move(before);
  }
  return game.record();
}

std::vector<GameRecord> run_games(const MapGraph& map, int n, std::uint64_t seed,
                                  const std::function<SeatAssignment(int)>& seats_for, const Rules& rules,
                                  int threads, std::vector<std::vector<std::string>>* logs) {
  std::vector<GameRecord> out(static_cast<std::size_t>(std::max(n, 0)));
  if (logs) logs->assign(out.size(), {});
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = std::min(threads, std::max(n, 1));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        SeatAssignment a = seats_for(i);
        Seats seats;
        for (int p = 0; p < kNumPowers; ++p) seats[p] = a.agents[p].get();
        out[i] = play_game(map, seats, seed + static_cast<std::uint64_t>(i), rules, logs ? &(*logs)[i] : nullptr);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace diplo
