#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "json.hpp"

#include "diplo/engine.hpp"

namespace diplo {

using Json = nlohmann::ordered_json;

inline constexpr int kRecordVersion = 1;

// Position snapshot:
//   {"phase": "F1901M",
//    "units": {"FRANCE": ["A PAR", "F SPA/NC"], ...},
//    "centers": {"FRANCE": ["BRE", "MAR", "PAR"], ...},
//    "dislodged": [{"unit": "A BUR", "power": "GERMANY", "attacker": "PAR", "convoyed": false}],
//    "standoffs": ["BEL"]}
// Powers without units or centres are omitted; lists follow location order.
Json state_to_json(const MapGraph& map, const GameState& state);
// Throws SchemaError.
GameState state_from_json(const MapGraph& map, const Json& j);

// Game record:
//   {"version": 1, "map": "standard", "rules": {...}, "initial": <state>,
//    "phases": [{"name": "S1901M", "orders": {"FRANCE": [...]},
//                "results": [{"power": .., "order": .., "result": "succeeds|fails|invalid",
//                             "reason": .., "implicit": true}],
//                "state": <state after the phase>}],
//    "outcome": {"kind": "ongoing|solo|draw", "winner": .., "survivors": [...]}}
Json record_to_json(const MapGraph& map, const GameRecord& record);
GameRecord record_from_json(const MapGraph& map, const Json& j);

std::string write_record(const MapGraph& map, const GameRecord& record);
// Throws SchemaError on malformed or truncated input.
GameRecord read_record(const MapGraph& map, std::string_view text);

struct ReplayReport {
  bool exact = true;
  std::optional<std::size_t> first_divergent;  // phase index
  std::string detail;
};

// Replays the submitted orders from the record's initial position and compares
// every phase name, result list and snapshot.
ReplayReport replay(const MapGraph& map, const GameRecord& record);

std::string_view outcome_kind_name(OutcomeKind k);
std::string_view result_name(OrderResult::Kind k);

}  // namespace diplo
