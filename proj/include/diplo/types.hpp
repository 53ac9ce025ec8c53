#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace diplo {

inline constexpr int kNumPowers = 7;
inline constexpr int kNumLocations = 81;
inline constexpr int kNumProvinces = 75;
inline constexpr int kNumSupplyCenters = 34;
inline constexpr int kSoloThreshold = 18;

enum class Power : std::uint8_t { Austria, England, France, Germany, Italy, Russia, Turkey };
enum class UnitKind : std::uint8_t { Army, Fleet };
enum class Terrain : std::uint8_t { Land, Water, Coastal };

// Strong index types. Locations and provinces are numbered in the map's
// alphabetical order (see MapGraph).
enum class Loc : std::uint8_t {};
enum class Province : std::uint8_t {};

constexpr int index(Loc l) { return static_cast<int>(l); }
constexpr int index(Province p) { return static_cast<int>(p); }
constexpr int index(Power p) { return static_cast<int>(p); }
constexpr Loc loc_at(int i) { return static_cast<Loc>(i); }
constexpr Province province_at(int i) { return static_cast<Province>(i); }
constexpr Power power_at(int i) { return static_cast<Power>(i); }

inline constexpr std::array<Power, kNumPowers> kAllPowers = {
    Power::Austria, Power::England, Power::France, Power::Germany,
    Power::Italy,   Power::Russia,  Power::Turkey};

std::string_view power_name(Power p);
// Accepts any case; throws LookupError on unknown names.
Power parse_power(std::string_view name);
std::optional<Power> find_power(std::string_view name);

constexpr char unit_letter(UnitKind k) { return k == UnitKind::Army ? 'A' : 'F'; }
std::string_view terrain_name(Terrain t);

}  // namespace diplo
