#include "diplo/features.hpp"

#include <algorithm>
#include <queue>
#include <tuple>

#include "diplo/error.hpp"

namespace diplo {

namespace {

constexpr int kNone = kNumPowers;  // the "none" slot of a power block

int kind_slot(UnitKind k) { return k == UnitKind::Army ? 0 : 1; }
int terrain_slot(Terrain t) { return t == Terrain::Land ? 0 : t == Terrain::Water ? 1 : 2; }
int power_slot(std::optional<Power> p) { return p ? index(*p) : kNone; }

// The row itself and, for a coast, its parent province's row.
std::vector<int> rows_of(const MapGraph& map, Loc l) {
  std::vector<int> r{index(l)};
  if (map.is_coast(l)) r.push_back(index(map.parent_location(l)));
  return r;
}

std::optional<Power> centre_owner(const MapGraph& map, const GameState& s, Province p) {
  return map.is_supply_center(p) ? s.sc_owner(map, p) : std::nullopt;
}

}  // namespace

Tensor encode_board(const MapGraph& map, const GameState& state) {
  using namespace board;
  Tensor t(kNumLocations, kWidth);
  for (int l = 0; l < kNumLocations; ++l) {
    const Loc loc = loc_at(l);
    t.at(l, kUnitKind + 2) = 1;
    t.at(l, kUnitOwner + kNone) = 1;
    t.at(l, kDislodgedKind + 2) = 1;
    t.at(l, kDislodgedOwner + kNone) = 1;
    t.at(l, kTerrain + terrain_slot(map.terrain(loc))) = 1;
    t.at(l, kScOwner + power_slot(centre_owner(map, state, map.province_of(loc)))) = 1;
  }
  auto put_unit = [&](int row, int kind_col, int owner_col, const Unit& u) {
    for (int c = 0; c < 3; ++c) t.at(row, kind_col + c) = 0;
    for (int c = 0; c <= kNumPowers; ++c) t.at(row, owner_col + c) = 0;
    t.at(row, kind_col + kind_slot(u.kind)) = 1;
    t.at(row, owner_col + index(u.owner)) = 1;
  };
  for (const Unit& u : state.units())
    for (int r : rows_of(map, u.location)) put_unit(r, kUnitKind, kUnitOwner, u);
  for (const DislodgedUnit& d : state.dislodged())
    for (int r : rows_of(map, d.unit.location)) put_unit(r, kDislodgedKind, kDislodgedOwner, d.unit);

  if (state.phase().kind == PhaseKind::Adjustment) {
    for (Power p : kAllPowers) {
      const int count = build_count(map, state, p);
      if (count > 0) {
        for (Province site : available_build_sites(map, state, p))
          for (Loc l : map.province_locations(site)) t.at(index(l), kBuildable) = 1;
      } else if (count < 0) {
        for (const Unit& u : state.units())
          if (u.owner == p)
            for (int r : rows_of(map, u.location)) t.at(r, kRemovable) = 1;
      }
    }
  }
  return t;
}

Tensor encode_prev_orders(const MapGraph& map, const GameState& issued_in, std::span<const Order> orders) {
  using namespace prev_order;
  Tensor t(kNumLocations, kWidth);
  for (int l = 0; l < kNumLocations; ++l) {
    t.at(l, kUnitKind + 2) = 1;
    t.at(l, kIssuer + kNone) = 1;
    t.at(l, kOrderKind + 4) = 1;
    t.at(l, kFriendly + kNone) = 1;
    t.at(l, kOpponent + kNone) = 1;
    t.at(l, kDestScOwner + kNone) = 1;
  }
  auto owner_in = [&](Province p) -> std::optional<Power> {
    const Unit* u = issued_in.unit_in(p);
    return u ? std::optional<Power>(u->owner) : std::nullopt;
  };
  for (const Order& o : orders) {
    int kind;
    std::optional<Province> dest;
    std::optional<Power> friendly;
    switch (o.type) {
      case OrderType::Hold: kind = 0; break;
      case OrderType::Move: kind = 1; dest = map.province_of(o.dest); break;
      case OrderType::SupportHold:
        kind = 2;
        dest = map.province_of(o.target);
        friendly = owner_in(map.province_of(o.target));
        break;
      case OrderType::SupportMove:
        kind = 2;
        dest = map.province_of(o.dest);
        friendly = owner_in(map.province_of(o.target));
        break;
      case OrderType::Convoy:
        kind = 3;
        dest = map.province_of(o.dest);
        friendly = owner_in(map.province_of(o.target));
        break;
      default: continue;
    }
    const std::optional<Power> issuer = owner_in(map.province_of(o.loc));
    const std::optional<Power> sc = dest ? centre_owner(map, issued_in, *dest) : std::nullopt;
    // A unit on the destination, else whoever owns its centre.
    std::optional<Power> opponent = dest ? owner_in(*dest) : std::nullopt;
    if (!opponent) opponent = sc;
    for (int r : rows_of(map, o.loc)) {
      std::fill(t.data.begin() + static_cast<std::ptrdiff_t>(r) * kWidth,
                t.data.begin() + static_cast<std::ptrdiff_t>(r + 1) * kWidth, 0.0f);
      t.at(r, kUnitKind + kind_slot(o.kind)) = 1;
      t.at(r, kIssuer + power_slot(issuer)) = 1;
      t.at(r, kOrderKind + kind) = 1;
      t.at(r, kFriendly + power_slot(friendly)) = 1;
      t.at(r, kOpponent + power_slot(opponent)) = 1;
      t.at(r, kDestScOwner + power_slot(sc)) = 1;
    }
  }
  return t;
}

// ---------------------------------------------------------------------------

OrderVocabulary::OrderVocabulary(const MapGraph& map) {
  std::vector<Order> v;
  auto coastal = [&](Province p) { return map.terrain(p) == Terrain::Coastal; };
  const UnitKind kinds[] = {UnitKind::Army, UnitKind::Fleet};

  for (int a = 0; a < kNumLocations; ++a) {
    const Loc l = loc_at(a);
    const Province own = map.province_of(l);
    for (UnitKind k : kinds) {
      if (!map.can_occupy(l, k)) continue;
      v.push_back(Order::hold(k, l));
      v.push_back(Order::disband(k, l));
      for (Loc d : map.adjacent(l, k)) {
        v.push_back(Order::move(k, l, d));
        v.push_back(Order::retreat(k, l, d));
      }
      if (k == UnitKind::Army && coastal(own))
        for (int q = 0; q < kNumProvinces; ++q)
          if (province_at(q) != own && coastal(province_at(q)))
            v.push_back(Order::move(k, l, map.parent_location(province_at(q)), true));

      for (int q = 0; q < kNumProvinces; ++q) {
        const Province dp = province_at(q);
        if (dp == own || !map.reaches_province(l, dp, k)) continue;
        for (int b = 0; b < kNumLocations; ++b) {
          const Loc t = loc_at(b);
          const Province tp = map.province_of(t);
          for (UnitKind tk : kinds) {
            if (!map.can_occupy(t, tk)) continue;
            if (tp == dp) v.push_back(Order::support_hold(k, l, tk, t));
            if (tp == own || tp == dp) continue;
            const bool by_sea = tk == UnitKind::Army && coastal(tp) && coastal(dp);
            if (by_sea || map.reaches_province(t, dp, tk))
              v.push_back(Order::support_move(k, l, tk, t, map.parent_location(dp)));
          }
        }
      }

      if (k == UnitKind::Fleet && map.terrain(l) == Terrain::Water)
        for (int s = 0; s < kNumProvinces; ++s)
          for (int q = 0; q < kNumProvinces; ++q)
            if (s != q && coastal(province_at(s)) && coastal(province_at(q)))
              v.push_back(Order::convoy(l, map.parent_location(province_at(s)), map.parent_location(province_at(q))));
    }
  }
  for (Power p : kAllPowers)
    for (Province h : map.home_centers(p))
      for (Loc l : map.province_locations(h))
        for (UnitKind k : kinds)
          if (map.can_occupy(l, k)) v.push_back(Order::build(k, l));
  v.push_back(Order::waive());

  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  orders_ = std::move(v);
  by_site_.assign(kNumLocations, {});
  index_.reserve(orders_.size());
  for (std::size_t i = 0; i < orders_.size(); ++i) {
    const Order& o = orders_[i];
    index_.emplace(o.key(), static_cast<int>(i));
    if (o.type == OrderType::Waive)
      waive_ = static_cast<int>(i);
    else
      by_site_[index(order_site(map, o))].push_back(static_cast<int>(i));
  }
  for (Power p : kAllPowers)
    for (Province h : map.home_centers(p)) {
      auto& list = by_site_[index(map.parent_location(h))];
      list.insert(std::upper_bound(list.begin(), list.end(), waive_), waive_);
    }
}

const OrderVocabulary& OrderVocabulary::standard() {
  static const OrderVocabulary vocab(standard_map());
  return vocab;
}

std::optional<int> OrderVocabulary::find(const Order& o) const {
  auto it = index_.find(o.key());
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<int> legal_indices(const OrderVocabulary& vocab, const MapGraph& map, const GameState& state, Loc loc) {
  std::vector<int> out;
  for (const Order& o : legal_orders(map, state, loc).orders) {
    auto i = vocab.find(o);
    if (!i) throw ContractError("order outside the vocabulary: " + format_order(map, o));
    out.push_back(*i);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<bool> legality_mask(const OrderVocabulary& vocab, const MapGraph& map, const GameState& state, Loc loc) {
  std::vector<bool> mask(vocab.size(), false);
  for (int i : legal_indices(vocab, map, state, loc)) mask[i] = true;
  return mask;
}

// ---------------------------------------------------------------------------

std::vector<int> decode_ranks(const MapGraph& map) {
  using Key = std::tuple<double, double, double, int>;
  auto key = [&](int l) {
    const auto [x, y] = map.coordinates(loc_at(l));
    return Key{x + y, y, x, l};
  };
  std::vector<int> rank(kNumLocations, -1);
  std::priority_queue<Key, std::vector<Key>, std::greater<>> frontier;
  std::vector<bool> queued(kNumLocations, false);
  int next = 0;
  while (next < kNumLocations) {
    if (frontier.empty()) {
      // Seed (or reseed a disconnected part) at the top-left-most unranked location.
      int best = -1;
      for (int l = 0; l < kNumLocations; ++l)
        if (!queued[l] && (best < 0 || key(l) < key(best))) best = l;
      queued[best] = true;
      frontier.push(key(best));
    }
    const int l = std::get<3>(frontier.top());
    frontier.pop();
    rank[l] = next++;
    for (Loc n : map.graph_neighbors(loc_at(l)))
      if (!queued[index(n)]) {
        queued[index(n)] = true;
        frontier.push(key(index(n)));
      }
  }
  return rank;
}

std::vector<Loc> decode_ordering(const MapGraph& map, std::span<const Loc> locations) {
  const std::vector<int> ranks = decode_ranks(map);
  std::vector<Loc> out(locations.begin(), locations.end());
  std::sort(out.begin(), out.end(), [&](Loc a, Loc b) { return ranks[index(a)] < ranks[index(b)]; });
  return out;
}

}  // namespace diplo
