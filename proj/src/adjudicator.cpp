#include "diplo/adjudicator.hpp"

#include <algorithm>
#include <climits>

#include "diplo/error.hpp"

namespace diplo {

const OrderVerdict* Resolution::find(const Order& o) const {
  for (const auto& v : verdicts)
    if (v.order == o) return &v;
  return nullptr;
}

bool operator==(const Resolution& a, const Resolution& b) {
  if (a.kind != b.kind || a.dislodged != b.dislodged || a.standoffs != b.standoffs || a.positions != b.positions ||
      a.verdicts.size() != b.verdicts.size())
    return false;
  for (std::size_t i = 0; i < a.verdicts.size(); ++i) {
    const auto& x = a.verdicts[i];
    const auto& y = b.verdicts[i];
    if (!(x.order == y.order) || x.power != y.power || x.succeeds != y.succeeds || x.reason != y.reason ||
        x.implicit != y.implicit)
      return false;
  }
  return true;
}

namespace {

bool by_location(const Unit& a, const Unit& b) { return index(a.location) < index(b.location); }

// One movement phase. Decisions exist for moves, supports and convoys; holds
// only matter through dislodgement.
class MovementResolver {
 public:
  MovementResolver(const MapGraph& map, const GameState& state, std::span<const Order> orders)
      : map_(map), state_(state) {
    const auto& units = state.units();
    n_ = static_cast<int>(units.size());
    orders_.resize(n_);
    std::vector<bool> given(n_, false);
    for (const Order& o : orders) {
      const Province p = map.province_of(o.loc);
      const Unit* u = state.unit_in(p);
      if (!u || u->location != o.loc || u->kind != o.kind)
        throw ContractError("order for a unit not on the board: " + format_order(map, o));
      const int ui = static_cast<int>(u - units.data());
      if (given[ui]) throw ContractError("two orders for " + unit_string(map, *u));
      if (!(o.type == OrderType::Hold || o.type == OrderType::Move || o.is_support() || o.type == OrderType::Convoy))
        throw ContractError("not a movement order: " + format_order(map, o));
      if (o.type == OrderType::Move && !o.via_convoy && !map.is_adjacent(o.loc, o.dest, o.kind))
        throw ContractError("unvalidated move: " + format_order(map, o));
      given[ui] = true;
      orders_[ui] = o;
    }
    implicit_.resize(n_);
    for (int i = 0; i < n_; ++i) {
      if (!given[i]) {
        orders_[i] = Order::hold(units[i].kind, units[i].location);
        implicit_[i] = true;
      }
      prov_[i] = map.province_of(units[i].location);
      occupant_[index(prov_[i])] = i;
    }
    for (int i = 0; i < n_; ++i) {
      const Order& o = orders_[i];
      if (o.type == OrderType::Move) moves_into_[index(map.province_of(o.dest))].push_back(i);
    }
    supports_.resize(n_);
    matched_.assign(n_, true);
    for (int i = 0; i < n_; ++i) {
      const Order& o = orders_[i];
      if (o.type == OrderType::SupportHold || o.type == OrderType::SupportMove) {
        const int t = occupant_[index(map.province_of(o.target))];
        bool ok = t >= 0;
        if (ok && o.type == OrderType::SupportMove)
          ok = orders_[t].type == OrderType::Move && map.province_of(orders_[t].dest) == map.province_of(o.dest);
        else if (ok)
          ok = orders_[t].type != OrderType::Move;
        if (ok) supports_[t].push_back(i);
        else matched_[i] = false;
      } else if (o.type == OrderType::Convoy) {
        const int t = occupant_[index(map.province_of(o.target))];
        matched_[i] = t >= 0 && orders_[t].type == OrderType::Move && orders_[t].via_convoy &&
                      map.province_of(orders_[t].dest) == map.province_of(o.dest);
      }
    }
    state_of_.assign(n_, Status::Unresolved);
    result_.assign(n_, false);
    paradox_.assign(n_, false);
  }

  Resolution run() {
    for (int i = 0; i < n_; ++i)
      if (has_decision(i)) resolve(i);

    Resolution r;
    r.kind = PhaseKind::Movement;
    const auto& units = state_.units();
    std::vector<bool> dislodged(n_, false);
    std::vector<int> dislodged_from(n_, -1);
    for (int i = 0; i < n_; ++i) {
      const bool moved = orders_[i].type == OrderType::Move && result_[i];
      if (moved) continue;
      for (int m : moves_into_[index(prov_[i])]) {
        if (result_[m]) {
          dislodged[i] = true;
          dislodged_from[i] = index(prov_[m]);
          r.dislodged.push_back({units[i], prov_[m], orders_[m].via_convoy});
        }
      }
    }
    for (int i = 0; i < n_; ++i) {
      OrderVerdict v{orders_[i], units[i].owner, true, {}, implicit_[i]};
      const Order& o = orders_[i];
      switch (o.type) {
        case OrderType::Hold:
          if (dislodged[i]) v = fail(v, "dislodged");
          break;
        case OrderType::Move:
          if (!result_[i]) v = fail(v, o.via_convoy && !path(i) ? "no convoy path" : "bounced");
          break;
        case OrderType::SupportHold:
        case OrderType::SupportMove:
          if (!matched_[i]) v = fail(v, "unmatched");
          else if (dislodged[i]) v = fail(v, "dislodged");
          else if (!result_[i]) v = fail(v, "cut");
          break;
        case OrderType::Convoy:
          if (!matched_[i]) v = fail(v, "unmatched");
          else if (paradox_[i]) v = fail(v, "paradox");
          else if (!result_[i]) v = fail(v, "dislodged");
          break;
        default:
          break;
      }
      r.verdicts.push_back(std::move(v));
    }

    for (int i = 0; i < n_; ++i) {
      if (dislodged[i]) continue;
      Unit u = units[i];
      if (orders_[i].type == OrderType::Move && result_[i]) u.location = orders_[i].dest;
      r.positions.push_back(u);
    }
    std::sort(r.positions.begin(), r.positions.end(), by_location);

    std::array<bool, kNumProvinces> occupied{};
    for (const auto& u : r.positions) occupied[index(map_.province_of(u.location))] = true;
    for (int p = 0; p < kNumProvinces; ++p) {
      if (occupied[p]) continue;
      // A unit beaten head-to-head by the province's own occupant does not
      // leave it contested.
      for (int m : moves_into_[p])
        if (!result_[m] && path(m) && dislodged_from[m] != p) {
          r.standoffs.push_back(province_at(p));
          break;
        }
    }
    return r;
  }

 private:
  enum class Status { Unresolved, Guessing, Resolved };

  static OrderVerdict fail(OrderVerdict v, const char* why) {
    v.succeeds = false;
    v.reason = why;
    return v;
  }

  bool has_decision(int i) const {
    const auto t = orders_[i].type;
    return t == OrderType::Move || t == OrderType::SupportHold || t == OrderType::SupportMove ||
           t == OrderType::Convoy;
  }
  bool is_move(int i) const { return orders_[i].type == OrderType::Move; }
  Province dest_of(int i) const { return map_.province_of(orders_[i].dest); }
  Power power(int i) const { return state_.units()[i].owner; }

  bool head_to_head(int m, int o) const {
    return is_move(o) && dest_of(o) == prov_[m] && !orders_[m].via_convoy && !orders_[o].via_convoy;
  }

  bool resolve(int nr) {
    if (state_of_[nr] == Status::Resolved) return result_[nr];
    if (state_of_[nr] == Status::Guessing) {
      if (std::find(deps_.begin(), deps_.end(), nr) == deps_.end()) deps_.push_back(nr);
      return result_[nr];
    }
    const std::size_t old = deps_.size();
    result_[nr] = false;
    state_of_[nr] = Status::Guessing;
    const bool first = adjudicate(nr);
    if (deps_.size() == old) {
      if (state_of_[nr] != Status::Resolved) {
        result_[nr] = first;
        state_of_[nr] = Status::Resolved;
      }
      return first;
    }
    if (deps_[old] != nr) {
      // Depends on a guess made further up the stack.
      deps_.push_back(nr);
      result_[nr] = first;
      return first;
    }
    for (std::size_t k = old; k < deps_.size(); ++k) state_of_[deps_[k]] = Status::Unresolved;
    deps_.resize(old);
    result_[nr] = true;
    state_of_[nr] = Status::Guessing;
    const bool second = adjudicate(nr);
    if (first == second) {
      for (std::size_t k = old; k < deps_.size(); ++k) state_of_[deps_[k]] = Status::Unresolved;
      deps_.resize(old);
      result_[nr] = first;
      state_of_[nr] = Status::Resolved;
      return first;
    }
    // Either both guesses or neither are consistent: a cycle needing a rule.
    backup_rule(old);
    return resolve(nr);
  }

  void backup_rule(std::size_t old) {
    std::vector<int> cycle(deps_.begin() + static_cast<std::ptrdiff_t>(old), deps_.end());
    deps_.resize(old);
    const bool has_convoy =
        std::any_of(cycle.begin(), cycle.end(), [&](int i) { return orders_[i].type == OrderType::Convoy; });
    for (int i : cycle) state_of_[i] = Status::Unresolved;
    if (has_convoy) {
      convoy_paradox(cycle);
    } else {
      circular_movement(cycle);
    }
  }

  // Paradoxical convoys: the convoys in the cycle are disrupted, so the
  // convoyed armies fail and cut nothing.
  void convoy_paradox(const std::vector<int>& cycle) {
    for (int i : cycle) {
      if (orders_[i].type != OrderType::Convoy) continue;
      result_[i] = false;
      paradox_[i] = true;
      state_of_[i] = Status::Resolved;
    }
  }

  // A ring of moves where each unit leaves for the next province: all move.
  void circular_movement(const std::vector<int>& cycle) {
    for (int i : cycle) {
      if (!is_move(i)) continue;
      result_[i] = true;
      state_of_[i] = Status::Resolved;
    }
  }

  bool adjudicate(int i) {
    switch (orders_[i].type) {
      case OrderType::Move: return adjudicate_move(i);
      case OrderType::SupportHold:
      case OrderType::SupportMove: return adjudicate_support(i);
      case OrderType::Convoy: return adjudicate_convoy(i);
      default: return true;
    }
  }

  int supports_counted(int i, std::optional<Power> excluded) {
    int n = 0;
    for (int s : supports_[i])
      if (resolve(s) && (!excluded || power(s) != *excluded)) ++n;
    return n;
  }

  bool path(int m) {
    const Order& o = orders_[m];
    if (!o.via_convoy) return true;
    const Province src = prov_[m];
    const Province dst = dest_of(m);
    std::vector<int> frontier;
    std::array<bool, kNumProvinces> seen{};
    auto usable = [&](Province sea) -> bool {
      const int f = occupant_[index(sea)];
      if (f < 0 || seen[index(sea)]) return false;
      const Order& c = orders_[f];
      if (c.type != OrderType::Convoy || !matched_[f] || map_.province_of(c.target) != src ||
          map_.province_of(c.dest) != dst)
        return false;
      return resolve(f);
    };
    for (Province sea : map_.adjacent_seas(src)) {
      if (usable(sea)) {
        seen[index(sea)] = true;
        frontier.push_back(index(sea));
      }
    }
    while (!frontier.empty()) {
      const Province cur = province_at(frontier.back());
      frontier.pop_back();
      const auto dest_seas = map_.adjacent_seas(dst);
      if (std::find(dest_seas.begin(), dest_seas.end(), cur) != dest_seas.end()) return true;
      for (Province sea : map_.adjacent_seas(cur)) {
        if (usable(sea)) {
          seen[index(sea)] = true;
          frontier.push_back(index(sea));
        }
      }
    }
    return false;
  }

  int attack_strength(int m) {
    if (!path(m)) return 0;
    const int o = occupant_[index(dest_of(m))];
    if (o < 0 || (is_move(o) && !head_to_head(m, o) && resolve(o))) return 1 + supports_counted(m, std::nullopt);
    if (power(o) == power(m)) return 0;
    return 1 + supports_counted(m, power(o));
  }

  int hold_strength(Province p) {
    const int o = occupant_[index(p)];
    if (o < 0) return 0;
    if (is_move(o)) return resolve(o) ? 0 : 1;
    return 1 + supports_counted(o, std::nullopt);
  }

  int prevent_strength(int m) {
    if (!path(m)) return 0;
    const int o = occupant_[index(dest_of(m))];
    if (o >= 0 && head_to_head(m, o) && resolve(o)) return 0;
    return 1 + supports_counted(m, std::nullopt);
  }

  bool adjudicate_move(int m) {
    const int attack = attack_strength(m);
    const int o = occupant_[index(dest_of(m))];
    if (o >= 0 && head_to_head(m, o)) {
      if (attack <= 1 + supports_counted(o, std::nullopt)) return false;
    } else if (attack <= hold_strength(dest_of(m))) {
      return false;
    }
    for (int other : moves_into_[index(dest_of(m))])
      if (other != m && attack <= prevent_strength(other)) return false;
    return true;
  }

  bool adjudicate_support(int s) {
    const Order& o = orders_[s];
    for (int m : moves_into_[index(prov_[s])]) {
      if (power(m) == power(s)) continue;
      if (o.type == OrderType::SupportMove && prov_[m] == map_.province_of(o.dest)) {
        if (resolve(m)) return false;
        continue;
      }
      if (path(m)) return false;
    }
    return true;
  }

  bool adjudicate_convoy(int c) {
    for (int m : moves_into_[index(prov_[c])])
      if (resolve(m)) return false;
    return true;
  }

  const MapGraph& map_;
  const GameState& state_;
  int n_ = 0;
  std::vector<Order> orders_;
  std::vector<bool> implicit_;
  std::array<Province, 64> prov_{};
  std::array<int, kNumProvinces> occupant_ = [] {
    std::array<int, kNumProvinces> a{};
    a.fill(-1);
    return a;
  }();
  std::array<std::vector<int>, kNumProvinces> moves_into_;
  std::vector<std::vector<int>> supports_;
  std::vector<bool> matched_;
  std::vector<Status> state_of_;
  std::vector<bool> result_;
  std::vector<bool> paradox_;
  std::vector<int> deps_;
};

void check_phase(const GameState& state, PhaseKind kind, const char* what) {
  if (state.phase().kind != kind) throw PhaseError(std::string(what) + " called in " + state.phase().code());
}

}  // namespace

Resolution resolve_movement(const MapGraph& map, const GameState& state, std::span<const Order> orders) {
  check_phase(state, PhaseKind::Movement, "resolve_movement");
  return MovementResolver(map, state, orders).run();
}

Resolution resolve_retreats(const MapGraph& map, const GameState& state, std::span<const Order> orders) {
  check_phase(state, PhaseKind::Retreat, "resolve_retreats");
  const auto& dis = state.dislodged();
  std::vector<std::optional<Order>> chosen(dis.size());
  for (const Order& o : orders) {
    auto it = std::find_if(dis.begin(), dis.end(), [&](const DislodgedUnit& d) {
      return d.unit.location == o.loc && d.unit.kind == o.kind;
    });
    if (it == dis.end()) throw ContractError("order for a unit that is not dislodged: " + format_order(map, o));
    if (o.type != OrderType::Retreat && o.type != OrderType::Disband)
      throw ContractError("not a retreat order: " + format_order(map, o));
    auto& slot = chosen[static_cast<std::size_t>(it - dis.begin())];
    if (slot) throw ContractError("two orders for " + unit_string(map, it->unit));
    slot = o;
  }

  std::array<int, kNumProvinces> arrivals{};
  for (const auto& c : chosen)
    if (c && c->type == OrderType::Retreat) ++arrivals[index(map.province_of(c->dest))];

  Resolution r;
  r.kind = PhaseKind::Retreat;
  r.positions = state.units();
  for (std::size_t i = 0; i < dis.size(); ++i) {
    const Unit& u = dis[i].unit;
    if (!chosen[i]) {
      r.verdicts.push_back({Order::disband(u.kind, u.location), u.owner, true, {}, true});
      continue;
    }
    const Order& o = *chosen[i];
    if (o.type == OrderType::Disband) {
      r.verdicts.push_back({o, u.owner, true, {}, false});
    } else if (arrivals[index(map.province_of(o.dest))] > 1) {
      r.verdicts.push_back({o, u.owner, false, "retreat collision", false});
    } else {
      r.verdicts.push_back({o, u.owner, true, {}, false});
      r.positions.push_back({u.kind, o.dest, u.owner});
    }
  }
  std::sort(r.positions.begin(), r.positions.end(), by_location);
  return r;
}

std::vector<Loc> auto_disband_choice(const MapGraph& map, const GameState& state, Power power, int count) {
  std::vector<std::pair<int, Loc>> ranked;
  for (const auto& u : state.units()) {
    if (u.owner != power) continue;
    int best = INT_MAX;
    for (Province h : map.home_centers(power))
      if (state.sc_owner(map, h) == power) best = std::min(best, map.province_distance(map.province_of(u.location), h));
    ranked.emplace_back(best, u.location);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return index(a.second) < index(b.second);
  });
  std::vector<Loc> out;
  for (int i = 0; i < count && i < static_cast<int>(ranked.size()); ++i) out.push_back(ranked[i].second);
  return out;
}

Resolution resolve_adjustments(const MapGraph& map, const GameState& state, std::span<const Order> orders) {
  check_phase(state, PhaseKind::Adjustment, "resolve_adjustments");
  std::array<int, kNumPowers> allowance{}, builds{}, disbands{};
  for (Power p : kAllPowers) allowance[index(p)] = build_count(map, state, p);

  Resolution r;
  r.kind = PhaseKind::Adjustment;
  std::vector<Unit> units = state.units();
  std::array<bool, kNumProvinces> touched{};

  for (const Order& o : orders) {
    if (o.type == OrderType::Waive) continue;
    const Province prov = map.province_of(o.loc);
    if (touched[index(prov)]) throw ContractError("two orders for " + std::string(map.province_name(prov)));
    touched[index(prov)] = true;
    if (o.type == OrderType::Build) {
      auto home = map.home_power(prov);
      if (!home || allowance[index(*home)] <= builds[index(*home)] || state.unit_in(prov) ||
          state.sc_owner(map, prov) != *home || !map.can_occupy(o.loc, o.kind))
        throw ContractError("unvalidated build: " + format_order(map, o));
      ++builds[index(*home)];
      units.push_back({o.kind, o.loc, *home});
      r.verdicts.push_back({o, *home, true, {}, false});
    } else if (o.type == OrderType::Disband) {
      const Unit* u = state.unit_in(prov);
      if (!u || u->location != o.loc || -allowance[index(u->owner)] <= disbands[index(u->owner)])
        throw ContractError("unvalidated disband: " + format_order(map, o));
      ++disbands[index(u->owner)];
      r.verdicts.push_back({o, u->owner, true, {}, false});
    } else {
      throw ContractError("not an adjustment order: " + format_order(map, o));
    }
  }

  for (Power p : kAllPowers) {
    const int a = allowance[index(p)];
    if (a < 0 && disbands[index(p)] < -a) {
      GameState remaining = state;
      std::vector<Unit> keep;
      for (const auto& u : state.units())
        if (!r.find(Order::disband(u.kind, u.location))) keep.push_back(u);
      remaining.set_units(map, keep);
      for (Loc l : auto_disband_choice(map, remaining, p, -a - disbands[index(p)])) {
        const Unit* u = state.unit_at(map, l);
        r.verdicts.push_back({Order::disband(u->kind, l), p, true, {}, true});
      }
    }
    for (int i = builds[index(p)]; i < a; ++i) r.verdicts.push_back({Order::waive(), p, true, {}, true});
  }

  for (const auto& v : r.verdicts) {
    if (v.order.type != OrderType::Disband) continue;
    units.erase(std::remove_if(units.begin(), units.end(), [&](const Unit& u) { return u.location == v.order.loc; }),
                units.end());
  }
  std::sort(units.begin(), units.end(), by_location);
  r.positions = std::move(units);
  std::stable_sort(r.verdicts.begin(), r.verdicts.end(), [&](const OrderVerdict& a, const OrderVerdict& b) {
    const bool wa = a.order.type == OrderType::Waive, wb = b.order.type == OrderType::Waive;
    if (wa || wb) return !wa && wb ? true : (wa && wb ? index(a.power) < index(b.power) : false);
    return index(order_site(map, a.order)) < index(order_site(map, b.order));
  });
  return r;
}

Resolution resolve(const MapGraph& map, const GameState& state, std::span<const Order> orders) {
  switch (state.phase().kind) {
    case PhaseKind::Movement: return resolve_movement(map, state, orders);
    case PhaseKind::Retreat: return resolve_retreats(map, state, orders);
    case PhaseKind::Adjustment: return resolve_adjustments(map, state, orders);
  }
  throw PhaseError("unknown phase");
}

namespace {

// Spring/Fall movement or retreat finished with nothing left to retreat.
Phase after_season(const MapGraph& map, const GameState& settled) {
  const Phase& ph = settled.phase();
  if (ph.season == Season::Spring) return {ph.year, Season::Fall, PhaseKind::Movement};
  GameState winter = update_ownership(map, settled);
  winter.set_phase({ph.year, Season::Winter, PhaseKind::Adjustment});
  for (Power p : kAllPowers)
    if (build_count(map, winter, p) != 0) return winter.phase();
  return {ph.year + 1, Season::Spring, PhaseKind::Movement};
}

}  // namespace

Phase next_phase(const MapGraph& map, const GameState& state, const Resolution& resolution) {
  const Phase& ph = state.phase();
  switch (ph.kind) {
    case PhaseKind::Movement:
      if (!resolution.dislodged.empty()) return {ph.year, ph.season, PhaseKind::Retreat};
      [[fallthrough]];
    case PhaseKind::Retreat: {
      GameState settled = state;
      settled.set_units(map, resolution.positions);
      settled.set_dislodged({});
      return after_season(map, settled);
    }
    case PhaseKind::Adjustment:
      return {ph.year + 1, Season::Spring, PhaseKind::Movement};
  }
  return ph;
}

GameState apply(const MapGraph& map, const GameState& state, const Resolution& resolution) {
  if (resolution.kind != state.phase().kind) throw ContractError("resolution does not match the phase");
  const Phase next = next_phase(map, state, resolution);
  GameState s = state;
  s.set_units(map, resolution.positions);
  s.set_dislodged({});
  s.set_standoffs({});
  if (next.kind == PhaseKind::Retreat) {
    s.set_dislodged(resolution.dislodged);
    s.set_standoffs(resolution.standoffs);
  }
  if (state.phase().season == Season::Fall && next.season != Season::Fall) s = update_ownership(map, s);
  s.set_phase(next);
  return s;
}

Resolution counterfactual_without(const MapGraph& map, const GameState& state, std::span<const Order> orders,
                                  const Order& dropped) {
  std::vector<Order> changed(orders.begin(), orders.end());
  auto it = std::find(changed.begin(), changed.end(), dropped);
  if (it == changed.end()) throw ArgumentError("order not present: " + format_order(map, dropped));
  *it = Order::hold(dropped.kind, dropped.loc);
  return resolve_movement(map, state, changed);
}

}  // namespace diplo
