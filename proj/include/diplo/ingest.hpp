#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "diplo/features.hpp"
#include "diplo/record.hpp"

namespace diplo {

// One game of an archive, or the reason it could not be read.
struct ArchiveEntry {
  std::optional<GameRecord> record;
  std::string error;
};

// An archive holds one record, a JSON array of records, or one record per
// line. A document that does not parse is a single failed entry.
std::vector<ArchiveEntry> read_archive(const MapGraph& map, std::string_view text);

struct IngestReport {
  bool accepted = false;
  // Orders the engine found invalid (they hold) and other disagreements
  // with the recorded results, one note each.
  std::vector<std::string> divergences;
  // Set when a rejected game failed to reproduce a recorded position.
  std::optional<std::size_t> first_divergent;
  std::string divergent_phase;
  std::string error;
};

// Re-validates every phase by playing the submitted orders from the recorded
// initial position. The game is rejected unless every recorded position is
// reproduced. On acceptance `out` receives the engine's own record.
IngestReport ingest_record(const MapGraph& map, const GameRecord& in, GameRecord* out);

struct IngestResult {
  std::vector<GameRecord> records;  // accepted games, in archive order
  std::vector<IngestReport> reports;  // one per archive entry
  int rejected() const;
};

IngestResult ingest(const MapGraph& map, std::string_view archive);

// Training export: one object per phase of a replayable record,
//   {"type": "phase", "layout": "diplo-features/1", "game": 0, "phase": "S1901M",
//    "board": <tensor>, "prev_orders": <tensor>,
//    "powers": {"FRANCE": {"build_count": 0, "decode_order": ["BRE", ...],
//                          "orders": [{"loc": "PAR", "order": "A PAR - BUR", "index": 812}],
//                          "legal": {"PAR": [805, 812, ...]}}}}
// Only powers with something to order appear. Implicit holds are included
// and marked. Throws StateError when the record does not replay.
std::vector<Json> encode_record(const MapGraph& map, const OrderVocabulary& vocab, const GameRecord& record,
                                int game_index, bool masks = true);

// {"layout": ..., "map": ..., "size": N, "orders": ["A ADR H", ...]}
Json vocabulary_json(const MapGraph& map, const OrderVocabulary& vocab);

}  // namespace diplo
