#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "diplo/map.hpp"
#include "diplo/order.hpp"
#include "diplo/state.hpp"

namespace diplo {

// Tag written next to every serialized tensor; bump when a layout changes.
inline constexpr std::string_view kFeatureLayout = "diplo-features/1";

// Column blocks of the board tensor, one row per location.
namespace board {
inline constexpr int kUnitKind = 0;         // army, fleet, none
inline constexpr int kUnitOwner = 3;        // 7 powers, none
inline constexpr int kBuildable = 11;
inline constexpr int kRemovable = 12;
inline constexpr int kDislodgedKind = 13;   // army, fleet, none
inline constexpr int kDislodgedOwner = 16;  // 7 powers, none
inline constexpr int kTerrain = 24;         // land, water, coastal
inline constexpr int kScOwner = 27;         // 7 powers, none
inline constexpr int kWidth = 35;
}  // namespace board

// Column blocks of the previous-order tensor.
namespace prev_order {
inline constexpr int kUnitKind = 0;       // army, fleet, none
inline constexpr int kIssuer = 3;         // 7 powers, none
inline constexpr int kOrderKind = 11;     // hold, move, support, convoy, none
inline constexpr int kFriendly = 16;      // owner of the supported or convoyed unit
inline constexpr int kOpponent = 24;      // owner of the unit at the destination
inline constexpr int kDestScOwner = 32;   // owner of the destination centre
inline constexpr int kWidth = 40;
}  // namespace prev_order

// Dense row-major matrix.
struct Tensor {
  int rows = 0;
  int cols = 0;
  std::vector<float> data;

  Tensor() = default;
  Tensor(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0f) {}
  float& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  float at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
  friend bool operator==(const Tensor&, const Tensor&) = default;
};

// 81 x 35. Units, dislodged units and the removable flag on a coast are
// copied to the parent province's row; coast rows carry the province's
// centre owner.
Tensor encode_board(const MapGraph& map, const GameState& state);

// 81 x 40 from the orders of the last movement phase and the position they
// were given in. Rows without an order use the none categories.
Tensor encode_prev_orders(const MapGraph& map, const GameState& issued_in, std::span<const Order> orders);

// Every unit order the map can ever make legal, plus WAIVE, sorted by
// Order::key. Indices are stable for a given map.
class OrderVocabulary {
 public:
  explicit OrderVocabulary(const MapGraph& map);
  // Shared instance for the standard map.
  static const OrderVocabulary& standard();

  std::size_t size() const { return orders_.size(); }
  const Order& at(std::size_t i) const { return orders_[i]; }
  std::optional<int> find(const Order& o) const;
  // Indices of the orders keyed on `site` (see order_site); WAIVE is listed
  // under every home-centre site.
  std::span<const int> candidates(Loc site) const { return by_site_[index(site)]; }
  int waive_index() const { return waive_; }

 private:
  std::vector<Order> orders_;
  std::unordered_map<std::uint64_t, int> index_;
  std::vector<std::vector<int>> by_site_;
  int waive_ = -1;
};

// True exactly on the vocabulary indices of legal_orders(state, loc).
std::vector<bool> legality_mask(const OrderVocabulary& vocab, const MapGraph& map, const GameState& state, Loc loc);
// The same set as sorted indices.
std::vector<int> legal_indices(const OrderVocabulary& vocab, const MapGraph& map, const GameState& state, Loc loc);

// Decode rank of each location: a traversal of the location graph that
// starts at the north-west-most location and always continues with the
// frontier location nearest the top-left corner (smallest x + y, then y,
// then x).
std::vector<int> decode_ranks(const MapGraph& map);

// `locations` sorted by decode rank.
std::vector<Loc> decode_ordering(const MapGraph& map, std::span<const Loc> locations);

}  // namespace diplo
