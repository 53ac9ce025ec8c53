#include "diplo/types.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "diplo/error.hpp"

namespace diplo {

namespace {
constexpr std::array<std::string_view, kNumPowers> kPowerNames = {
    "AUSTRIA", "ENGLAND", "FRANCE", "GERMANY", "ITALY", "RUSSIA", "TURKEY"};
}  // namespace

std::string_view power_name(Power p) { return kPowerNames[index(p)]; }

std::optional<Power> find_power(std::string_view name) {
  for (int i = 0; i < kNumPowers; ++i) {
    const auto& n = kPowerNames[i];
    if (n.size() == name.size() &&
        std::equal(n.begin(), n.end(), name.begin(), [](char a, char b) {
          return a == std::toupper(static_cast<unsigned char>(b));
        }))
      return power_at(i);
  }
  return std::nullopt;
}

Power parse_power(std::string_view name) {
  auto p = find_power(name);
  if (!p) throw LookupError("unknown power '" + std::string(name) + "'");
  return *p;
}

std::string_view terrain_name(Terrain t) {
  switch (t) {
    case Terrain::Land: return "land";
    case Terrain::Water: return "water";
    case Terrain::Coastal: return "coastal";
  }
  return "?";
}

}  // namespace diplo
