#pragma once

#include <array>
#include <bitset>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "diplo/types.hpp"

namespace diplo {

using LocSet = std::bitset<kNumLocations>;

struct OpeningUnit {
  Power power;
  UnitKind kind;
  Loc location;
};

// Immutable topology of the standard board.
//
// Location order: alphabetical by province name, a split-coast province's
// own location first, then its coasts (BUL, BUL/EC, BUL/SC). Province order
// is alphabetical. Both orders are fixed for the map version and index every
// tensor the features module produces.
class MapGraph {
 public:
  // Parses the versioned map text. Throws MapIntegrityError naming the first
  // violated invariant.
  static MapGraph parse(std::string_view text);

  const std::string& name() const { return name_; }
  std::uint64_t checksum() const { return checksum_; }

  std::string_view location_name(Loc l) const { return loc_names_[index(l)]; }
  std::string_view province_name(Province p) const { return province_names_[index(p)]; }

  // Case-insensitive. `location` throws LookupError.
  std::optional<Loc> find_location(std::string_view name) const;
  Loc location(std::string_view name) const;
  std::optional<Province> find_province(std::string_view name) const;

  Province province_of(Loc l) const { return loc_province_[index(l)]; }
  // The province-level location (SPA for SPA/NC).
  Loc parent_location(Province p) const { return province_loc_[index(p)]; }
  Loc parent_location(Loc l) const { return parent_location(province_of(l)); }
  bool is_coast(Loc l) const { return loc_is_coast_[index(l)]; }
  // All locations of a province: the parent location then any coasts.
  std::span<const Loc> province_locations(Province p) const { return province_locs_[index(p)]; }
  bool has_split_coasts(Province p) const { return province_locs_[index(p)].size() > 1; }

  Terrain terrain(Loc l) const { return terrain_[index(l)]; }
  Terrain terrain(Province p) const { return terrain_[index(parent_location(p))]; }

  bool can_occupy(Loc l, UnitKind k) const;

  // Single-step destinations (no convoys). Sorted by location index.
  std::span<const Loc> adjacent(Loc l, UnitKind k) const {
    return k == UnitKind::Army ? army_adj_[index(l)] : fleet_adj_[index(l)];
  }
  const LocSet& adjacent_set(Loc l, UnitKind k) const {
    return k == UnitKind::Army ? army_adj_set_[index(l)] : fleet_adj_set_[index(l)];
  }
  bool is_adjacent(Loc from, Loc to, UnitKind k) const { return adjacent_set(from, k).test(index(to)); }
  // True if a unit of kind `k` at `from` can move to some location of province `p`.
  bool reaches_province(Loc from, Province p, UnitKind k) const;

  bool is_supply_center(Province p) const { return sc_index_[index(p)] >= 0; }
  // Position of `p` in supply_centers(), or -1.
  int supply_center_index(Province p) const { return sc_index_[index(p)]; }
  std::span<const Province> supply_centers() const { return supply_centers_; }
  std::span<const Province> home_centers(Power pw) const { return home_centers_[index(pw)]; }
  std::optional<Power> home_power(Province p) const { return home_power_[index(p)]; }

  std::span<const OpeningUnit> opening_units() const { return opening_units_; }

  std::pair<double, double> coordinates(Loc l) const { return coords_[index(l)]; }

  // Undirected neighbours in the union of both adjacency relations plus the
  // coast/parent links; the graph the encoder convolves over.
  std::span<const Loc> graph_neighbors(Loc l) const { return union_adj_[index(l)]; }

  // Water provinces a fleet in province `p` borders; the convoy graph's edges.
  std::span<const Province> adjacent_seas(Province p) const { return adjacent_seas_[index(p)]; }

  // Shortest path length between provinces in the union graph.
  int province_distance(Province a, Province b) const {
    return province_dist_[index(a) * kNumProvinces + index(b)];
  }
  // Shortest path for a unit of kind `k` (no convoys); -1 when unreachable.
  int unit_distance(Loc from, Loc to, UnitKind k) const;

  // Diameter of the union graph over locations.
  int diameter() const { return diameter_; }

 private:
  MapGraph() = default;
  void finalize();

  std::string name_;
  std::uint64_t checksum_ = 0;
  std::array<std::string, kNumLocations> loc_names_;
  std::array<std::string, kNumProvinces> province_names_;
  std::array<Province, kNumLocations> loc_province_{};
  std::array<bool, kNumLocations> loc_is_coast_{};
  std::array<Terrain, kNumLocations> terrain_{};
  std::array<std::pair<double, double>, kNumLocations> coords_{};
  std::array<Loc, kNumProvinces> province_loc_{};
  std::array<std::vector<Loc>, kNumProvinces> province_locs_;
  std::array<std::vector<Loc>, kNumLocations> army_adj_, fleet_adj_, union_adj_;
  std::array<LocSet, kNumLocations> army_adj_set_, fleet_adj_set_;
  std::array<int, kNumProvinces> sc_index_{};
  std::vector<Province> supply_centers_;
  std::array<std::vector<Province>, kNumPowers> home_centers_;
  std::array<std::optional<Power>, kNumProvinces> home_power_{};
  std::vector<OpeningUnit> opening_units_;
  std::array<std::vector<Province>, kNumProvinces> adjacent_seas_;
  std::vector<std::uint8_t> province_dist_;
  std::vector<std::int8_t> army_dist_, fleet_dist_;
  int diameter_ = 0;
};

// The embedded standard map text, exactly as shipped in data/standard.map.
std::string_view standard_map_text();

// Parses and validates the embedded map. Deterministic; each call re-parses.
MapGraph load_standard_map();

// Process-wide shared instance of load_standard_map().
const MapGraph& standard_map();

// Same as map.adjacent(); throws LookupError on an unknown location name.
std::vector<Loc> adjacent(const MapGraph& map, std::string_view location, UnitKind kind);

// Row-major square matrix.
struct DenseMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  double operator()(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
  double& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
};

// D^{-1/2} (A + I) D^{-1/2} for an undirected graph given as neighbour lists.
DenseMatrix normalized_adjacency(std::span<const std::vector<int>> neighbors);

// The 81x81 normalised adjacency of the map's union graph, rows in location order.
DenseMatrix normalized_adjacency(const MapGraph& map);

// FNV-1a 64-bit; the map checksum.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace diplo
