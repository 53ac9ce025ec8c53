#include <algorithm>
#include <numeric>

#include "diplo/analysis.hpp"
#include "diplo/error.hpp"
#include "diplo/features.hpp"
#include "diplo/record.hpp"
#include "doctest.h"
#include "support/coalition_cases.hpp"
#include "support/oracles.hpp"
#include "support/sampling.hpp"

using namespace diplo;

namespace {

const MapGraph& M() { return standard_map(); }

// Effect of dropping `support` according to the exhaustive oracle.
bool oracle_effective(const GameState& s, const std::vector<Order>& orders, const Order& support) {
  const auto actual = oracle::adjudicate(M(), s, orders);
  std::vector<Order> without = orders;
  for (Order& o : without)
    if (o == support) o = Order::hold(o.kind, o.loc);
  const auto counter = oracle::adjudicate(M(), s, without);
  REQUIRE(actual.outcome);
  REQUIRE(counter.outcome);
  const Province target = M().province_of(support.target);
  if (support.type == OrderType::SupportMove) {
    for (std::size_t i = 0; i < orders.size(); ++i)
      if (orders[i].type == OrderType::Move && M().province_of(orders[i].loc) == target)
        return actual.outcome->succeeds[i] && !counter.outcome->succeeds[i];
    return false;
  }
  auto hit = [&](const oracle::Outcome& o) {
    return std::any_of(o.dislodged.begin(), o.dislodged.end(),
                       [&](Loc l) { return M().province_of(l) == target; });
  };
  return !hit(*actual.outcome) && hit(*counter.outcome);
}

GameRecord one_phase_game(const coalition::Case& c) {
  Game g(M(), coalition::position(M(), c));
  std::map<Power, std::vector<Order>> by_power;
  const auto orders = coalition::orders(M(), c);
  for (std::size_t i = 0; i < orders.size(); ++i) by_power[c.units[i].first].push_back(orders[i]);
  g.step(by_power);
  return g.record();
}

}  // namespace

TEST_CASE("scripted cross-power supports are classified exactly") {
  for (const coalition::Case& c : coalition::cases()) {
    CAPTURE(c.name);
    const GameState s = coalition::position(M(), c);
    const auto orders = coalition::orders(M(), c);
    for (std::size_t i = 0; i < orders.size(); ++i) {
      const Order one[] = {orders[i]};
      REQUIRE(validate(M(), s, c.units[i].first, one)[0].valid);
    }
    const auto checks = classify_supports(M(), s, orders);
    REQUIRE(checks.size() == c.expected.size());
    for (const coalition::Expected& e : c.expected) {
      const Order support = parse_order(M(), e.support);
      const auto it = std::find_if(checks.begin(), checks.end(), [&](const SupportCheck& k) { return k.support == support; });
      REQUIRE(it != checks.end());
      CHECK(it->cross_power == e.cross_power);
      CHECK(it->effective == e.effective);
      if (it->cross_power && it->succeeded) CHECK(oracle_effective(s, orders, support) == e.effective);
    }
  }
}

TEST_CASE("coalition metrics over records") {
  // The first case as a one-phase game: one support, cross-power and effective.
  const GameRecord rec = one_phase_game(coalition::cases()[0]);
  const GameRecord recs[] = {rec};
  CoalitionReport r = coalition_metrics(M(), recs);
  CHECK(r.supports == 1);
  CHECK(r.x_supports == 1);
  CHECK(r.effective_x_supports == 1);
  CHECK(*r.x_support_ratio() == 1.0);
  CHECK(*r.eff_x_support_ratio() == 1.0);

  // Own-power support counts only in the denominator.
  const GameRecord own = one_phase_game(coalition::cases()[4]);
  const GameRecord owns[] = {own};
  r = coalition_metrics(M(), owns);
  CHECK(r.supports == 2);
  CHECK(r.x_supports == 1);
  CHECK(*r.x_support_ratio() == 0.5);
  CHECK(*r.eff_x_support_ratio() == 0.0);

  // No supports at all: both ratios are absent rather than zero.
  Game quiet(M());
  quiet.step({});
  const GameRecord none[] = {quiet.record()};
  r = coalition_metrics(M(), none);
  CHECK(r.supports == 0);
  CHECK_FALSE(r.x_support_ratio().has_value());
  CHECK_FALSE(r.eff_x_support_ratio().has_value());
  CHECK(coalition_csv(r, "hold").find("hold,,,0,0,0") != std::string::npos);

  // A record that does not replay is left out and reported.
  GameRecord broken = rec;
  broken.phases[0].state.set_units(M(), {});
  const GameRecord mixed[] = {rec, broken};
  r = coalition_metrics(M(), mixed);
  CHECK(r.records == 1);
  CHECK(r.rejected_records == 1);
  CHECK(r.rejections.size() == 1);
}

TEST_CASE("coalition counts on generated games") {
  auto records = sampling::games(M(), 6, 808);
  const CoalitionReport r = coalition_metrics(M(), records);
  CHECK(r.records == 6);
  CHECK(r.supports > 0);
  CHECK(r.effective_x_supports <= r.x_supports);
  CHECK(r.x_supports <= r.supports);
  std::reverse(records.begin(), records.end());
  CHECK(coalition_metrics(M(), records) == r);
}

TEST_CASE("order accuracy") {
  auto P = [](const char* text) { return parse_order(M(), text); };
  const std::vector<PhaseOrders> gold = {
      {"S1901M", Power::France, {P("A PAR - BUR"), P("A MAR S A PAR - BUR")}},
      {"W1901A", Power::France, {P("A PAR B"), P("WAIVE")}},
  };
  AccuracyReport same = accuracy_metrics(M(), gold, gold);
  CHECK(*same.unit_accuracy() == 1.0);
  CHECK(*same.all_orders_accuracy() == 1.0);

  std::vector<PhaseOrders> guess = {{"S1901M", Power::France, {P("A PAR - BUR"), P("A MAR H")}}};
  const std::vector<PhaseOrders> first(gold.begin(), gold.begin() + 1);
  const AccuracyReport half = accuracy_metrics(M(), guess, first);
  CHECK(*half.unit_accuracy() == 0.5);
  CHECK(*half.all_orders_accuracy() == 0.0);
  CHECK(half.support_by_position.size() == 2);
  CHECK(half.support_by_position[1].total == 1);  // MAR is decoded after PAR
  CHECK(half.support_by_position[1].correct == 0);

  guess[0].power = Power::Germany;
  CHECK_THROWS_AS(accuracy_metrics(M(), guess, first), AlignmentError);
  CHECK_THROWS_AS(accuracy_metrics(M(), first, gold), AlignmentError);

  // A support given by the sixteenth unit in decode order lands in bucket 16.
  std::vector<Loc> sites;
  for (int l = 0; l < kNumLocations && sites.size() < 17; ++l)
    if (!M().is_coast(loc_at(l)) && M().can_occupy(loc_at(l), UnitKind::Army)) sites.push_back(loc_at(l));
  const auto ordered = decode_ordering(M(), sites);
  PhaseOrders big{"S1901M", Power::Russia, {}};
  for (Loc l : sites)
    big.orders.push_back(l == ordered[15] ? Order::support_hold(UnitKind::Army, l, UnitKind::Army, ordered[0])
                                          : Order::hold(UnitKind::Army, l));
  const PhaseOrders bigs[] = {big};
  const AccuracyReport pos = accuracy_metrics(M(), bigs, bigs);
  REQUIRE(pos.support_by_position.size() == 16);
  CHECK(pos.support_by_position[15].total == 1);
  CHECK(*pos.support_accuracy(16) == 1.0);
  CHECK_FALSE(pos.support_accuracy(3).has_value());
}

TEST_CASE("dataset statistics") {
  GameRecord solo;
  solo.initial = initial_state(M());
  GameState last = initial_state(M());
  last.set_units(M(), {{UnitKind::Army, M().location("VIE"), Power::Austria},
                       {UnitKind::Army, M().location("PAR"), Power::France}});
  for (Province sc : M().supply_centers()) last.set_sc_owner(M(), sc, std::nullopt);
  last.set_sc_owner(M(), *M().find_province("PAR"), Power::France);
  for (int i = 0; i < 18; ++i)
    if (M().supply_centers()[i] != *M().find_province("PAR")) last.set_sc_owner(M(), M().supply_centers()[i], Power::Austria);
  solo.phases.push_back({"F1901M", {}, {}, last});
  solo.outcome = {OutcomeKind::Solo, Power::Austria, {Power::Austria, Power::France}};

  const GameRecord one[] = {solo};
  const DatasetStats s = dataset_stats(one);
  CHECK(s.percent(s.wins, Power::Austria) == 100.0);
  CHECK(s.percent(s.lost, Power::France) == 100.0);
  CHECK(s.percent(s.defeated, Power::England) == 100.0);
  CHECK(*s.survival_rate(Power::Austria, Power::Austria) == 1.0);
  CHECK(*s.survival_rate(Power::Austria, Power::France) == 1.0);
  CHECK(*s.survival_rate(Power::Austria, Power::Turkey) == 0.0);
  CHECK_FALSE(s.survival_rate(Power::France, Power::Austria).has_value());

  const auto games = sampling::games(M(), 3, 4);
  const DatasetStats g = dataset_stats(games);
  for (Power p : kAllPowers) {
    const double total = g.percent(g.wins, p) + g.percent(g.draws, p) + g.percent(g.lost, p) + g.percent(g.defeated, p);
    CHECK(total == doctest::Approx(100.0));
    if (g.wins[index(p)] + g.draws[index(p)] > 0) CHECK(*g.survival_rate(p, p) == 1.0);
  }
  GameRecord ongoing = solo;
  ongoing.outcome = {};
  const GameRecord bad[] = {ongoing};
  CHECK_THROWS_AS(dataset_stats(bad), StateError);
}
