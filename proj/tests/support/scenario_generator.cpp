#include <algorithm>

#include "oracles.hpp"

using namespace diplo;

namespace oracle {

namespace {

template <class T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& v) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

bool chance(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

// A support or convoy from `o`'s unit that backs `other`, when legal.
std::vector<Order> backing(const std::vector<Order>& legal, const Order& other) {
  std::vector<Order> out;
  for (const Order& c : legal) {
    if (other.type == OrderType::Move) {
      const bool sup = c.type == OrderType::SupportMove && c.target == other.loc;
      const bool con = c.type == OrderType::Convoy && other.via_convoy && c.target == other.loc;
      if ((sup || con) && c.dest == other.dest) out.push_back(c);
    } else if (c.type == OrderType::SupportHold && c.target == other.loc) {
      out.push_back(c);
    }
  }
  return out;
}

}  // namespace

SmallScenario random_small_scenario(const MapGraph& map, std::mt19937_64& rng, int max_units) {
  const int n = std::uniform_int_distribution<int>(2, std::max(2, max_units))(rng);
  std::vector<Province> centres;
  for (int q = 0; q < kNumProvinces; ++q) centres.push_back(province_at(q));
  const Province centre = pick(rng, centres);

  std::vector<Province> near;
  for (int q = 0; q < kNumProvinces; ++q)
    if (map.province_distance(centre, province_at(q)) <= 2) near.push_back(province_at(q));
  std::shuffle(near.begin(), near.end(), rng);
  near.resize(std::min<std::size_t>(near.size(), n));

  std::vector<Power> powers(kAllPowers.begin(), kAllPowers.end());
  std::shuffle(powers.begin(), powers.end(), rng);
  powers.resize(std::uniform_int_distribution<int>(2, 3)(rng));

  std::vector<Unit> units;
  for (Province p : near) {
    std::vector<Unit> options;
    for (Loc l : map.province_locations(p))
      for (UnitKind k : {UnitKind::Army, UnitKind::Fleet})
        if (map.can_occupy(l, k)) options.push_back({k, l, pick(rng, powers)});
    units.push_back(pick(rng, options));
  }

  SmallScenario sc;
  sc.state = initial_state(map);
  sc.state.set_units(map, units);
  const auto& placed = sc.state.units();

  std::vector<std::vector<Order>> legal;
  for (const Unit& u : placed) legal.push_back(oracle::legal_orders(map, sc.state, u.location));

  // First pass: holds and moves, preferring convoyed moves when available.
  for (std::size_t i = 0; i < placed.size(); ++i) {
    std::vector<Order> moves, convoyed;
    for (const Order& o : legal[i]) {
      if (o.type != OrderType::Move) continue;
      (o.via_convoy ? convoyed : moves).push_back(o);
    }
    Order o = Order::hold(placed[i].kind, placed[i].location);
    if (!convoyed.empty() && chance(rng, 0.5))
      o = pick(rng, convoyed);
    else if (!moves.empty() && chance(rng, 0.7))
      o = pick(rng, moves);
    sc.orders.push_back(o);
  }

  // Second pass: some units back another unit's order instead.
  for (std::size_t i = 0; i < placed.size(); ++i) {
    if (!chance(rng, 0.55)) continue;
    std::vector<Order> options;
    for (std::size_t j = 0; j < placed.size(); ++j) {
      if (j == i) continue;
      auto b = backing(legal[i], sc.orders[j]);
      options.insert(options.end(), b.begin(), b.end());
    }
    if (!options.empty()) {
      sc.orders[i] = pick(rng, options);
    } else if (chance(rng, 0.3)) {
      std::vector<Order> other;
      for (const Order& o : legal[i])
        if (o.is_support() || o.type == OrderType::Convoy) other.push_back(o);
      if (!other.empty()) sc.orders[i] = pick(rng, other);
    }
  }
  return sc;
}

}  // namespace oracle
