#include "support/coalition_cases.hpp"

namespace coalition {

using diplo::Power;

const std::vector<Case>& cases() {
  static const std::vector<Case> all = {
      {"support breaks a single defender",
       {{Power::Germany, "A RUH"}, {Power::France, "A PIC"}, {Power::England, "A BEL"}},
       {"A RUH - BEL", "A PIC S A RUH - BEL", "A BEL H"},
       {{"A PIC S A RUH - BEL", true, true}}},
      {"support into an empty province",
       {{Power::Germany, "A RUH"}, {Power::France, "A PIC"}},
       {"A RUH - BEL", "A PIC S A RUH - BEL"},
       {{"A PIC S A RUH - BEL", true, false}}},
      {"support holds off a supported attack",
       {{Power::Italy, "A TYR"}, {Power::Austria, "A VIE"}, {Power::Germany, "A MUN"}, {Power::Germany, "A BOH"}},
       {"A TYR H", "A VIE S A TYR", "A MUN - TYR", "A BOH S A MUN - TYR"},
       {{"A VIE S A TYR", true, true}, {"A BOH S A MUN - TYR", false, false}}},
      {"defensive support against a lone attacker",
       {{Power::Italy, "A TYR"}, {Power::Austria, "A VIE"}, {Power::Germany, "A MUN"}},
       {"A TYR H", "A VIE S A TYR", "A MUN - TYR"},
       {{"A VIE S A TYR", true, false}}},
      {"own support carries the attack",
       {{Power::France, "A BUR"}, {Power::France, "A PIC"}, {Power::Germany, "A RUH"}, {Power::England, "A BEL"}},
       {"A BUR - BEL", "A PIC S A BUR - BEL", "A RUH S A BUR - BEL", "A BEL H"},
       {{"A PIC S A BUR - BEL", false, false}, {"A RUH S A BUR - BEL", true, false}}},
      {"cut support",
       {{Power::Germany, "A RUH"}, {Power::France, "A PIC"}, {Power::England, "A BEL"}, {Power::England, "A BRE"}},
       {"A RUH - BEL", "A PIC S A RUH - BEL", "A BEL H", "A BRE - PIC"},
       {{"A PIC S A RUH - BEL", true, false}}},
      {"two supports both needed",
       {{Power::Germany, "A RUH"},
        {Power::France, "A PIC"},
        {Power::Austria, "A BUR"},
        {Power::England, "A BEL"},
        {Power::England, "A HOL"}},
       {"A RUH - BEL", "A PIC S A RUH - BEL", "A BUR S A RUH - BEL", "A BEL H", "A HOL S A BEL"},
       {{"A PIC S A RUH - BEL", true, true}, {"A BUR S A RUH - BEL", true, true}, {"A HOL S A BEL", false, false}}},
      {"two supports where one suffices",
       {{Power::Germany, "A RUH"}, {Power::France, "A PIC"}, {Power::Austria, "A BUR"}, {Power::England, "A BEL"}},
       {"A RUH - BEL", "A PIC S A RUH - BEL", "A BUR S A RUH - BEL", "A BEL H"},
       {{"A PIC S A RUH - BEL", true, false}, {"A BUR S A RUH - BEL", true, false}}},
      {"support of a convoyed army",
       {{Power::England, "A LON"}, {Power::England, "F NTH"}, {Power::France, "A PIC"}, {Power::Germany, "A BEL"}},
       {"A LON - BEL VIA", "F NTH C A LON - BEL", "A PIC S A LON - BEL", "A BEL H"},
       {{"A PIC S A LON - BEL", true, true}}},
      {"support of an attack that fails anyway",
       {{Power::Germany, "A RUH"},
        {Power::France, "A PIC"},
        {Power::England, "A BEL"},
        {Power::England, "A HOL"},
        {Power::England, "A BUR"}},
       {"A RUH - BEL", "A PIC S A RUH - BEL", "A BEL H", "A HOL S A BEL", "A BUR S A BEL"},
       {{"A PIC S A RUH - BEL", true, false}, {"A HOL S A BEL", false, false}, {"A BUR S A BEL", false, false}}},
  };
  return all;
}

diplo::GameState position(const diplo::MapGraph& map, const Case& c) {
  diplo::GameState s = diplo::initial_state(map);
  std::vector<diplo::Unit> units;
  for (const auto& [power, text] : c.units)
    units.push_back({text[0] == 'A' ? diplo::UnitKind::Army : diplo::UnitKind::Fleet, map.location(text.substr(2)),
                     power});
  s.set_units(map, units);
  return s;
}

std::vector<diplo::Order> orders(const diplo::MapGraph& map, const Case& c) {
  std::vector<diplo::Order> out;
  for (const auto& t : c.orders) out.push_back(diplo::parse_order(map, t));
  return out;
}

}  // namespace coalition
