#include "diplo/order.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

#include "diplo/error.hpp"

namespace diplo {

std::uint64_t Order::key() const {
  std::uint64_t k = static_cast<std::uint64_t>(type) << 40;
  auto put_unit = [&] {
    k |= static_cast<std::uint64_t>(kind) << 39;
    k |= static_cast<std::uint64_t>(index(loc)) << 32;
  };
  auto put_target = [&] {
    k |= static_cast<std::uint64_t>(target_kind) << 31;
    k |= static_cast<std::uint64_t>(index(target)) << 24;
  };
  auto put_dest = [&] { k |= static_cast<std::uint64_t>(index(dest)) << 16; };
  switch (type) {
    case OrderType::Hold:
    case OrderType::Disband:
    case OrderType::Build:
      put_unit();
      break;
    case OrderType::Move:
      put_unit();
      put_dest();
      k |= via_convoy ? 1 : 0;
      break;
    case OrderType::SupportHold:
      put_unit();
      put_target();
      break;
    case OrderType::SupportMove:
    case OrderType::Convoy:
      put_unit();
      put_target();
      put_dest();
      break;
    case OrderType::Retreat:
      put_unit();
      put_dest();
      break;
    case OrderType::Waive:
      break;
  }
  return k;
}

// ---------------------------------------------------------------------------
// Text

namespace {

struct Token {
  std::string text;  // upper-cased
  std::size_t pos;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !std::isspace(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) {
      std::string t(s.substr(i, j - i));
      for (auto& c : t) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      out.push_back({std::move(t), i});
    }
    i = j;
  }
  return out;
}

class Parser {
 public:
  Parser(const MapGraph& map, std::string_view text) : map_(map), toks_(tokenize(text)), end_(text.size()) {}

  Order parse() {
    if (toks_.size() == 1 && toks_[0].text == "WAIVE") return Order::waive();
    auto [kind, loc] = unit();
    const Token& verb = next("order type");
    Order o;
    if (verb.text == "H") {
      o = Order::hold(kind, loc);
    } else if (verb.text == "-") {
      Loc dest = location();
      bool via = false;
      if (peek() && peek()->text == "VIA") {
        ++at_;
        via = true;
      }
      o = Order::move(kind, loc, dest, via);
    } else if (verb.text == "S") {
      auto [tk, target] = unit();
      if (peek() && peek()->text == "-") {
        ++at_;
        Loc dest = map_.parent_location(location());
        o = Order::support_move(kind, loc, tk, target, dest);
      } else {
        o = Order::support_hold(kind, loc, tk, target);
      }
    } else if (verb.text == "C") {
      const std::size_t at_army = pos();
      auto [tk, src] = unit();
      if (tk != UnitKind::Army) throw ParseError("only armies can be convoyed", at_army);
      expect("-");
      Loc dest = map_.parent_location(location());
      if (kind != UnitKind::Fleet) throw ParseError("only fleets can convoy", toks_[0].pos);
      o = Order::convoy(loc, src, dest);
    } else if (verb.text == "R") {
      o = Order::retreat(kind, loc, location());
    } else if (verb.text == "D") {
      o = Order::disband(kind, loc);
    } else if (verb.text == "B") {
      o = Order::build(kind, loc);
    } else {
      throw ParseError("unknown order type '" + verb.text + "'", verb.pos);
    }
    if (at_ != toks_.size()) throw ParseError("unexpected trailing token '" + toks_[at_].text + "'", toks_[at_].pos);
    return o;
  }

 private:
  const Token* peek() const { return at_ < toks_.size() ? &toks_[at_] : nullptr; }
  std::size_t pos() const { return at_ < toks_.size() ? toks_[at_].pos : end_; }

  const Token& next(const char* what) {
    if (at_ >= toks_.size()) throw ParseError(std::string("expected ") + what, end_);
    return toks_[at_++];
  }

  void expect(std::string_view t) {
    const Token& tok = next("'-'");
    if (tok.text != t) throw ParseError("expected '" + std::string(t) + "', found '" + tok.text + "'", tok.pos);
  }

  std::pair<UnitKind, Loc> unit() {
    const Token& k = next("unit type");
    UnitKind kind;
    if (k.text == "A") kind = UnitKind::Army;
    else if (k.text == "F") kind = UnitKind::Fleet;
    else throw ParseError("expected unit type 'A' or 'F', found '" + k.text + "'", k.pos);
    return {kind, location()};
  }

  Loc location() {
    const Token& t = next("location");
    auto slash = t.text.find('/');
    auto prov = map_.find_province(t.text.substr(0, slash));
    if (!prov) throw ParseError("unknown province '" + t.text.substr(0, slash) + "'", t.pos);
    if (slash == std::string::npos) return map_.parent_location(*prov);
    auto l = map_.find_location(t.text);
    if (!l) throw ParseError("malformed coast tag '" + t.text + "'", t.pos + slash);
    return *l;
  }

  const MapGraph& map_;
  std::vector<Token> toks_;
  std::size_t end_;
  std::size_t at_ = 0;
};

}  // namespace

Order parse_order(const MapGraph& map, std::string_view text) { return Parser(map, text).parse(); }

std::string format_order(const MapGraph& map, const Order& o) {
  auto unit = [&](UnitKind k, Loc l) {
    std::string s(1, unit_letter(k));
    s += ' ';
    s += map.location_name(l);
    return s;
  };
  const std::string u = unit(o.kind, o.loc);
  switch (o.type) {
    case OrderType::Hold: return u + " H";
    case OrderType::Move:
      return u + " - " + std::string(map.location_name(o.dest)) + (o.via_convoy ? " VIA" : "");
    case OrderType::SupportHold: return u + " S " + unit(o.target_kind, o.target);
    case OrderType::SupportMove:
      return u + " S " + unit(o.target_kind, o.target) + " - " + std::string(map.location_name(o.dest));
    case OrderType::Convoy:
      return u + " C " + unit(UnitKind::Army, o.target) + " - " + std::string(map.location_name(o.dest));
    case OrderType::Retreat: return u + " R " + std::string(map.location_name(o.dest));
    case OrderType::Disband: return u + " D";
    case OrderType::Build: return u + " B";
    case OrderType::Waive: return "WAIVE";
  }
  return {};
}

// ---------------------------------------------------------------------------
// Convoy reachability

ConvoyGraph::ConvoyGraph(const MapGraph& map, const GameState& state) : map_(&map) {
  component_.fill(-1);
  std::array<bool, kNumProvinces> fleet_sea{};
  for (const auto& u : state.units())
    if (u.kind == UnitKind::Fleet && map.terrain(u.location) == Terrain::Water)
      fleet_sea[index(map.province_of(u.location))] = true;

  int n = 0;
  std::vector<int> stack;
  for (int start = 0; start < kNumProvinces; ++start) {
    if (!fleet_sea[start] || component_[start] >= 0) continue;
    shores_.emplace_back();
    component_[start] = n;
    stack.push_back(start);
    while (!stack.empty()) {
      const int p = stack.back();
      stack.pop_back();
      for (Loc nb : map.adjacent(map.parent_location(province_at(p)), UnitKind::Fleet)) {
        const int q = index(map.province_of(nb));
        if (map.terrain(nb) == Terrain::Water) {
          if (fleet_sea[q] && component_[q] < 0) {
            component_[q] = n;
            stack.push_back(q);
          }
        } else {
          shores_[n].set(q);
        }
      }
    }
    ++n;
  }
}

bool ConvoyGraph::links(int c, Province a, Province b) const {
  return c >= 0 && shores_[c].test(index(a)) && shores_[c].test(index(b));
}

bool ConvoyGraph::can_convoy(Province a, Province b) const {
  if (a == b) return false;
  for (const auto& s : shores_)
    if (s.test(index(a)) && s.test(index(b))) return true;
  return false;
}

// ---------------------------------------------------------------------------
// Legal orders

std::optional<Power> orderable_owner(const MapGraph& map, const GameState& state, Loc loc) {
  const Province prov = map.province_of(loc);
  switch (state.phase().kind) {
    case PhaseKind::Movement: {
      const Unit* u = state.unit_in(prov);
      if (u && u->location == loc) return u->owner;
      return std::nullopt;
    }
    case PhaseKind::Retreat: {
      const DislodgedUnit* d = state.dislodged_in(map, prov);
      if (d && d->unit.location == loc) return d->unit.owner;
      return std::nullopt;
    }
    case PhaseKind::Adjustment: {
      if (const Unit* u = state.unit_in(prov); u && u->location == loc) {
        if (build_count(map, state, u->owner) < 0) return u->owner;
        return std::nullopt;
      }
      auto home = map.home_power(prov);
      if (!home || loc != map.parent_location(prov)) return std::nullopt;
      if (build_count(map, state, *home) <= 0) return std::nullopt;
      auto sites = available_build_sites(map, state, *home);
      if (std::find(sites.begin(), sites.end(), prov) == sites.end()) return std::nullopt;
      return home;
    }
  }
  return std::nullopt;
}

Loc order_site(const MapGraph& map, const Order& o) {
  if (o.type == OrderType::Build) return map.parent_location(o.loc);
  return o.loc;
}

LegalOrders legal_orders(const MapGraph& map, const GameState& state, Loc loc) {
  return legal_orders(map, state, ConvoyGraph(map, state), loc);
}

LegalOrders legal_orders(const MapGraph& map, const GameState& state, const ConvoyGraph& convoys, Loc loc) {
  LegalOrders out;
  if (!orderable_owner(map, state, loc)) return out;
  out.orderable = true;
  auto& v = out.orders;
  const Province prov = map.province_of(loc);

  switch (state.phase().kind) {
    case PhaseKind::Movement: {
      const Unit& u = *state.unit_in(prov);
      const UnitKind k = u.kind;
      v.push_back(Order::hold(k, loc));
      for (Loc d : map.adjacent(loc, k)) v.push_back(Order::move(k, loc, d));

      if (k == UnitKind::Army && map.terrain(loc) == Terrain::Coastal) {
        for (int q = 0; q < kNumProvinces; ++q)
          if (convoys.can_convoy(prov, province_at(q)))
            v.push_back(Order::move(k, loc, map.parent_location(province_at(q)), true));
      }

      for (int q = 0; q < kNumProvinces; ++q) {
        const Province dp = province_at(q);
        if (dp == prov || !map.reaches_province(loc, dp, k)) continue;
        if (const Unit* t = state.unit_in(dp)) v.push_back(Order::support_hold(k, loc, t->kind, t->location));
        const Loc dest = map.parent_location(dp);
        for (const auto& t : state.units()) {
          const Province tp = map.province_of(t.location);
          if (tp == prov || tp == dp) continue;
          const bool direct = map.reaches_province(t.location, dp, t.kind);
          const bool by_sea = t.kind == UnitKind::Army && convoys.can_convoy(tp, dp);
          if (direct || by_sea) v.push_back(Order::support_move(k, loc, t.kind, t.location, dest));
        }
      }

      if (k == UnitKind::Fleet && map.terrain(loc) == Terrain::Water) {
        const int c = convoys.component(prov);
        for (const auto& t : state.units()) {
          if (t.kind != UnitKind::Army) continue;
          const Province tp = map.province_of(t.location);
          for (int q = 0; q < kNumProvinces; ++q) {
            const Province dp = province_at(q);
            if (dp != tp && convoys.links(c, tp, dp))
              v.push_back(Order::convoy(loc, t.location, map.parent_location(dp)));
          }
        }
      }
      break;
    }
    case PhaseKind::Retreat: {
      const DislodgedUnit& d = *state.dislodged_in(map, prov);
      for (Loc dest : map.adjacent(loc, d.unit.kind)) {
        const Province dp = map.province_of(dest);
        if (state.unit_in(dp) || state.is_standoff(dp)) continue;
        if (dp == d.attacker_origin && !d.attacker_convoyed) continue;
        v.push_back(Order::retreat(d.unit.kind, loc, dest));
      }
      v.push_back(Order::disband(d.unit.kind, loc));
      break;
    }
    case PhaseKind::Adjustment: {
      if (const Unit* u = state.unit_in(prov)) {
        v.push_back(Order::disband(u->kind, loc));
      } else {
        for (Loc l : map.province_locations(prov)) {
          if (map.can_occupy(l, UnitKind::Army)) v.push_back(Order::build(UnitKind::Army, l));
          if (map.can_occupy(l, UnitKind::Fleet)) v.push_back(Order::build(UnitKind::Fleet, l));
        }
        v.push_back(Order::waive());
      }
      break;
    }
  }
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return out;
}

// ---------------------------------------------------------------------------
// Validation

Order canonicalize(const MapGraph& map, const GameState& state, const Order& in) {
  Order o = in;
  switch (o.type) {
    case OrderType::Move:
    case OrderType::Retreat: {
      if (o.kind == UnitKind::Army) {
        o.dest = map.parent_location(o.dest);
        if (o.type == OrderType::Move && !o.via_convoy && !map.is_adjacent(o.loc, o.dest, UnitKind::Army)) {
          ConvoyGraph cg(map, state);
          if (cg.can_convoy(map.province_of(o.loc), map.province_of(o.dest))) o.via_convoy = true;
        }
      } else if (!map.is_coast(o.dest) && map.has_split_coasts(map.province_of(o.dest))) {
        std::optional<Loc> only;
        int n = 0;
        for (Loc c : map.province_locations(map.province_of(o.dest)))
          if (map.is_adjacent(o.loc, c, UnitKind::Fleet)) {
            only = c;
            ++n;
          }
        if (n == 1) o.dest = *only;
      }
      break;
    }
    case OrderType::SupportMove:
    case OrderType::Convoy:
      o.dest = map.parent_location(o.dest);
      break;
    default:
      break;
  }
  return o;
}

namespace {

std::string diagnose(const MapGraph& map, const GameState& state, const Order& o) {
  const PhaseKind ph = state.phase().kind;
  const bool movement_type = o.type == OrderType::Hold || o.type == OrderType::Move || o.is_support() ||
                             o.type == OrderType::Convoy;
  if ((ph == PhaseKind::Movement) != movement_type ||
      (ph == PhaseKind::Retreat && o.type != OrderType::Retreat && o.type != OrderType::Disband) ||
      (ph == PhaseKind::Adjustment && o.type != OrderType::Build && o.type != OrderType::Disband &&
       o.type != OrderType::Waive))
    return "wrong phase";
  const Province prov = map.province_of(o.loc);

  if (o.type == OrderType::Build) {
    const auto home = map.home_power(prov);
    if (!home) return "not a home center";
    if (state.unit_in(prov)) return "occupied";
    if (state.sc_owner(map, prov) != *home) return "home center not owned";
    if (!map.can_occupy(o.loc, o.kind)) return "unit cannot occupy location";
    return "no builds available";
  }

  const Unit* u = ph == PhaseKind::Retreat ? (state.dislodged_in(map, prov) ? &state.dislodged_in(map, prov)->unit
                                                                           : nullptr)
                                           : state.unit_in(prov);
  if (!u || u->location != o.loc || u->kind != o.kind) return "no such unit";
  if (ph == PhaseKind::Adjustment) return "no disbands required";

  switch (o.type) {
    case OrderType::Move: {
      if (map.province_of(o.dest) == prov) return "cannot move to own province";
      if (o.via_convoy) {
        if (o.kind != UnitKind::Army) return "only armies can be convoyed";
        return "no convoy route";
      }
      if (map.reaches_province(o.loc, map.province_of(o.dest), o.kind)) return "ambiguous or unreachable coast";
      return "unreachable destination";
    }
    case OrderType::SupportHold:
    case OrderType::SupportMove: {
      const Province dp = map.province_of(o.type == OrderType::SupportHold ? o.target : o.dest);
      if (dp == prov) return "cannot support into own province";
      if (!map.reaches_province(o.loc, dp, o.kind)) return "unreachable destination";
      const Unit* t = state.unit_in(map.province_of(o.target));
      if (!t || t->location != o.target || t->kind != o.target_kind) return "no such supported unit";
      if (o.type == OrderType::SupportMove) return "supported unit cannot reach destination";
      return "illegal support";
    }
    case OrderType::Convoy:
      if (map.terrain(o.loc) != Terrain::Water) return "fleet not at sea";
      return "no convoy route";
    case OrderType::Retreat: {
      const Province dp = map.province_of(o.dest);
      if (!map.is_adjacent(o.loc, o.dest, o.kind)) return "unreachable destination";
      if (state.unit_in(dp)) return "occupied";
      if (state.is_standoff(dp)) return "standoff";
      return "attacker origin";
    }
    default:
      return "illegal order";
  }
}

}  // namespace

std::vector<OrderCheck> validate(const MapGraph& map, const GameState& state, Power power,
                                 std::span<const Order> orders) {
  std::vector<OrderCheck> out;
  out.reserve(orders.size());
  const ConvoyGraph convoys(map, state);
  std::array<bool, kNumProvinces> claimed{};
  const bool adjustment = state.phase().kind == PhaseKind::Adjustment;
  const int allowance = adjustment ? build_count(map, state, power) : 0;
  int builds = 0, disbands = 0;

  for (const Order& raw : orders) {
    OrderCheck c{canonicalize(map, state, raw), false, {}};
    const Order& o = c.order;
    if (o.type == OrderType::Waive) {
      if (!adjustment || allowance <= 0) c.reason = "no builds available";
      else if (builds >= allowance) c.reason = "too many builds";
      else {
        ++builds;
        c.valid = true;
      }
      out.push_back(std::move(c));
      continue;
    }
    const Loc site = order_site(map, o);
    const auto owner = orderable_owner(map, state, site);
    if (!owner) {
      c.reason = diagnose(map, state, o);
    } else if (*owner != power) {
      c.reason = "foreign unit";
    } else if (claimed[index(map.province_of(site))]) {
      c.reason = "duplicate";
    } else {
      claimed[index(map.province_of(site))] = true;
      auto legal = legal_orders(map, state, convoys, site);
      if (!std::binary_search(legal.orders.begin(), legal.orders.end(), o)) {
        c.reason = diagnose(map, state, o);
      } else if (adjustment && o.type == OrderType::Build && builds >= allowance) {
        c.reason = "too many builds";
      } else if (adjustment && o.type == OrderType::Disband && disbands >= -allowance) {
        c.reason = "too many disbands";
      } else {
        if (adjustment) (o.type == OrderType::Build ? builds : disbands)++;
        c.valid = true;
      }
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace diplo
