#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "diplo/engine.hpp"

namespace diplo {

// Cross-power support statistics. A support is an X-support when the
// supported unit belongs to another power, whether or not the support
// succeeded. An X-support is effective when it succeeded and, re-resolving
// the phase with the supporting unit holding instead, the supported move
// fails (attack) or the supported unit is dislodged (defence).
struct CoalitionReport {
  long supports = 0;
  long x_supports = 0;
  long effective_x_supports = 0;
  int records = 0;
  int rejected_records = 0;  // not replayable, left out
  std::vector<std::string> rejections;

  std::optional<double> x_support_ratio() const;
  std::optional<double> eff_x_support_ratio() const;
  friend bool operator==(const CoalitionReport&, const CoalitionReport&) = default;
};

// Classification of one support order in a movement phase.
struct SupportCheck {
  Order support;
  Power power;
  bool cross_power = false;
  bool succeeded = false;
  bool effective = false;
};

// Every support among `orders` (validated, all powers) in `state`.
std::vector<SupportCheck> classify_supports(const MapGraph& map, const GameState& state, std::span<const Order> orders);

CoalitionReport coalition_metrics(const MapGraph& map, std::span<const GameRecord> records);

// One power's orders for one phase.
struct PhaseOrders {
  std::string phase;
  Power power;
  std::vector<Order> orders;
};

struct PositionAccuracy {
  int correct = 0;
  int total = 0;
  friend bool operator==(const PositionAccuracy&, const PositionAccuracy&) = default;
};

struct AccuracyReport {
  int unit_orders = 0;
  int unit_correct = 0;
  int order_sets = 0;
  int order_sets_correct = 0;
  // Support orders by the unit's 1-based position in the decode ordering;
  // entry 0 is position 1.
  std::vector<PositionAccuracy> support_by_position;

  std::optional<double> unit_accuracy() const;
  std::optional<double> all_orders_accuracy() const;
  std::optional<double> support_accuracy(int position) const;
  friend bool operator==(const AccuracyReport&, const AccuracyReport&) = default;
};

// Compares predicted with gold orders entry by entry. A gold order counts as
// correct when the prediction has the identical order for the same site; a
// set is correct when every gold order is. Throws AlignmentError unless both
// lists name the same (phase, power) pairs in the same order.
AccuracyReport accuracy_metrics(const MapGraph& map, std::span<const PhaseOrders> predictions,
                                std::span<const PhaseOrders> gold);

// Game results per power over finished games. Every power's games split into
// wins, draws, losses to another power's solo while still alive, and
// eliminations.
struct DatasetStats {
  int games = 0;
  std::array<int, kNumPowers> wins{};
  std::array<int, kNumPowers> draws{};
  std::array<int, kNumPowers> lost{};
  std::array<int, kNumPowers> defeated{};
  // [p][q]: games where p won or drew and q was still alive.
  std::array<std::array<int, kNumPowers>, kNumPowers> survived_with{};

  double percent(const std::array<int, kNumPowers>& counts, Power p) const;
  // Survival rate of q in the games p won or drew.
  std::optional<double> survival_rate(Power p, Power q) const;
};

// Throws StateError for a game still in progress.
DatasetStats dataset_stats(std::span<const GameRecord> records);

// Tables for reports.
std::string coalition_json(const CoalitionReport& r, const std::string& variant);
std::string coalition_csv(const CoalitionReport& r, const std::string& variant);
std::string accuracy_json(const AccuracyReport& r);
std::string dataset_stats_csv(const DatasetStats& s);
std::string dataset_stats_json(const DatasetStats& s);

}  // namespace diplo
