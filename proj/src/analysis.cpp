#include "diplo/analysis.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include "diplo/adjudicator.hpp"
#include "diplo/error.hpp"
#include "diplo/features.hpp"
#include "diplo/record.hpp"

namespace diplo {

namespace {

std::optional<double> quotient(double num, double den) {
  if (den == 0) return std::nullopt;
  return num / den;
}

Json optional_number(std::optional<double> v) { return v ? Json(*v) : Json(nullptr); }

std::string csv_number(std::optional<double> v) {
  if (!v) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", *v);
  return buf;
}

const GameState& final_state(const GameRecord& r) { return r.phases.empty() ? r.initial : r.phases.back().state; }

}  // namespace

std::optional<double> CoalitionReport::x_support_ratio() const { return quotient(x_supports, supports); }
std::optional<double> CoalitionReport::eff_x_support_ratio() const { return quotient(effective_x_supports, x_supports); }

std::vector<SupportCheck> classify_supports(const MapGraph& map, const GameState& state, std::span<const Order> orders) {
  std::vector<SupportCheck> out;
  const Resolution actual = resolve_movement(map, state, orders);
  for (const Order& o : orders) {
    if (!o.is_support()) continue;
    const Unit* supporter = state.unit_at(map, o.loc);
    const Unit* supported = state.unit_at(map, o.target);
    if (!supporter || !supported) throw ContractError("support without its units: " + format_order(map, o));
    SupportCheck c{o, supporter->owner};
    c.cross_power = supported->owner != supporter->owner;
    const OrderVerdict* v = actual.find(o);
    c.succeeded = v && v->succeeds;
    if (c.cross_power && c.succeeded) {
      const Resolution without = counterfactual_without(map, state, orders, o);
      const Province target = map.province_of(o.target);
      if (o.type == OrderType::SupportMove) {
        const auto it = std::find_if(orders.begin(), orders.end(), [&](const Order& x) {
          return map.province_of(x.loc) == target && x.type == OrderType::Move;
        });
        if (it != orders.end()) {
          const OrderVerdict* a = actual.find(*it);
          const OrderVerdict* b = without.find(*it);
          c.effective = a && a->succeeds && b && !b->succeeds;
        }
      } else {
        auto dislodged = [&](const Resolution& r) {
          return std::any_of(r.dislodged.begin(), r.dislodged.end(),
                             [&](const DislodgedUnit& d) { return map.province_of(d.unit.location) == target; });
        };
        c.effective = !dislodged(actual) && dislodged(without);
      }
    }
    out.push_back(c);
  }
  return out;
}

CoalitionReport coalition_metrics(const MapGraph& map, std::span<const GameRecord> records) {
  CoalitionReport r;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const GameRecord& rec = records[i];
    const ReplayReport check = replay(map, rec);
    if (!check.exact) {
      ++r.rejected_records;
      r.rejections.push_back("record " + std::to_string(i) + ": " + check.detail);
      continue;
    }
    ++r.records;
    Game game(map, rec.initial, rec.rules);
    for (const PhaseRecord& ph : rec.phases) {
      const GameState before = game.state();
      game.step_text(ph.orders);
      if (before.phase().kind != PhaseKind::Movement) continue;
      for (const SupportCheck& c : classify_supports(map, before, game.last_movement_orders())) {
        ++r.supports;
        r.x_supports += c.cross_power;
        r.effective_x_supports += c.effective;
      }
    }
  }
  return r;
}

std::optional<double> AccuracyReport::unit_accuracy() const { return quotient(unit_correct, unit_orders); }
std::optional<double> AccuracyReport::all_orders_accuracy() const { return quotient(order_sets_correct, order_sets); }
std::optional<double> AccuracyReport::support_accuracy(int position) const {
  if (position < 1 || position > static_cast<int>(support_by_position.size())) return std::nullopt;
  const PositionAccuracy& p = support_by_position[position - 1];
  return quotient(p.correct, p.total);
}

AccuracyReport accuracy_metrics(const MapGraph& map, std::span<const PhaseOrders> predictions,
                                std::span<const PhaseOrders> gold) {
  if (predictions.size() != gold.size())
    throw AlignmentError("expected " + std::to_string(gold.size()) + " prediction entries, got " +
                         std::to_string(predictions.size()));
  AccuracyReport r;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const PhaseOrders& g = gold[i];
    const PhaseOrders& p = predictions[i];
    if (g.phase != p.phase || g.power != p.power)
      throw AlignmentError("entry " + std::to_string(i) + ": gold is " + g.phase + " " +
                           std::string(power_name(g.power)) + ", prediction is " + p.phase + " " +
                           std::string(power_name(p.power)));
    // Predicted orders per site; WAIVEs are compared by count.
    std::map<int, Order> predicted;
    int predicted_waives = 0;
    for (const Order& o : p.orders) {
      if (o.type == OrderType::Waive)
        ++predicted_waives;
      else
        predicted.emplace(index(order_site(map, o)), o);
    }
    std::vector<Loc> sites;
    for (const Order& o : g.orders)
      if (o.type != OrderType::Waive) sites.push_back(order_site(map, o));
    const std::vector<Loc> decode = decode_ordering(map, sites);

    int gold_waives = 0;
    bool all = true;
    for (const Order& o : g.orders) {
      if (o.type == OrderType::Waive) {
        ++gold_waives;
        continue;
      }
      const Loc site = order_site(map, o);
      const auto it = predicted.find(index(site));
      const bool ok = it != predicted.end() && it->second == o;
      ++r.unit_orders;
      r.unit_correct += ok;
      all = all && ok;
      if (o.is_support()) {
        const auto pos = static_cast<std::size_t>(std::find(decode.begin(), decode.end(), site) - decode.begin());
        if (r.support_by_position.size() <= pos) r.support_by_position.resize(pos + 1);
        ++r.support_by_position[pos].total;
        r.support_by_position[pos].correct += ok;
      }
    }
    const int waives = std::min(gold_waives, predicted_waives);
    r.unit_orders += gold_waives;
    r.unit_correct += waives;
    all = all && gold_waives == predicted_waives && predicted.size() == sites.size();
    ++r.order_sets;
    r.order_sets_correct += all;
  }
  return r;
}

double DatasetStats::percent(const std::array<int, kNumPowers>& counts, Power p) const {
  return games ? 100.0 * counts[index(p)] / games : 0.0;
}

std::optional<double> DatasetStats::survival_rate(Power p, Power q) const {
  return quotient(survived_with[index(p)][index(q)], wins[index(p)] + draws[index(p)]);
}

DatasetStats dataset_stats(std::span<const GameRecord> records) {
  DatasetStats s;
  for (const GameRecord& rec : records) {
    if (!rec.outcome.ended()) throw StateError("game in progress");
    const GameState& last = final_state(rec);
    ++s.games;
    std::array<bool, kNumPowers> good{};
    for (Power p : kAllPowers) {
      const bool alive = !last.is_eliminated(p);
      if (rec.outcome.kind == OutcomeKind::Solo && rec.outcome.winner == p) {
        ++s.wins[index(p)];
        good[index(p)] = true;
      } else if (!alive) {
        ++s.defeated[index(p)];
      } else if (rec.outcome.kind == OutcomeKind::Draw) {
        ++s.draws[index(p)];
        good[index(p)] = true;
      } else {
        ++s.lost[index(p)];
      }
    }
    for (Power p : kAllPowers)
      if (good[index(p)])
        for (Power q : kAllPowers) s.survived_with[index(p)][index(q)] += !last.is_eliminated(q);
  }
  return s;
}

std::string coalition_json(const CoalitionReport& r, const std::string& variant) {
  Json j;
  j["variant"] = variant;
  j["x_support_ratio"] = optional_number(r.x_support_ratio());
  j["eff_x_support_ratio"] = optional_number(r.eff_x_support_ratio());
  j["supports"] = r.supports;
  j["x_supports"] = r.x_supports;
  j["effective_x_supports"] = r.effective_x_supports;
  j["records"] = r.records;
  j["rejected_records"] = r.rejected_records;
  j["rejections"] = r.rejections;
  j["note"] = "failed X-supports count towards x_supports; only successful ones can be effective";
  return j.dump(2) + "\n";
}

std::string coalition_csv(const CoalitionReport& r, const std::string& variant) {
  return "variant,x_support_ratio,eff_x_support_ratio,supports,x_supports,effective_x_supports\n" + variant + "," +
         csv_number(r.x_support_ratio()) + "," + csv_number(r.eff_x_support_ratio()) + "," +
         std::to_string(r.supports) + "," + std::to_string(r.x_supports) + "," +
         std::to_string(r.effective_x_supports) + "\n";
}

std::string accuracy_json(const AccuracyReport& r) {
  Json j;
  j["unit_accuracy"] = optional_number(r.unit_accuracy());
  j["all_orders_accuracy"] = optional_number(r.all_orders_accuracy());
  j["unit_orders"] = r.unit_orders;
  j["order_sets"] = r.order_sets;
  Json by = Json::array();
  for (std::size_t i = 0; i < r.support_by_position.size(); ++i)
    by.push_back({{"position", i + 1},
                  {"correct", r.support_by_position[i].correct},
                  {"total", r.support_by_position[i].total},
                  {"accuracy", optional_number(r.support_accuracy(static_cast<int>(i) + 1))}});
  j["support_by_position"] = by;
  return j.dump(2) + "\n";
}

std::string dataset_stats_csv(const DatasetStats& s) {
  std::string out = "power,win,draw,lost,defeated";
  for (Power q : kAllPowers) out += ",survival_" + std::string(power_name(q));
  out += "\n";
  for (Power p : kAllPowers) {
    out += std::string(power_name(p));
    for (const auto* counts : {&s.wins, &s.draws, &s.lost, &s.defeated})
      out += "," + csv_number(s.percent(*counts, p));
    for (Power q : kAllPowers) {
      const auto rate = s.survival_rate(p, q);
      out += "," + csv_number(rate ? std::optional<double>(100.0 * *rate) : std::nullopt);
    }
    out += "\n";
  }
  return out;
}

std::string dataset_stats_json(const DatasetStats& s) {
  Json j;
  j["games"] = s.games;
  Json powers;
  for (Power p : kAllPowers) {
    Json row;
    row["win"] = s.percent(s.wins, p);
    row["draw"] = s.percent(s.draws, p);
    row["lost"] = s.percent(s.lost, p);
    row["defeated"] = s.percent(s.defeated, p);
    Json survival;
    for (Power q : kAllPowers) {
      const auto rate = s.survival_rate(p, q);
      survival[std::string(power_name(q))] = rate ? Json(100.0 * *rate) : Json(nullptr);
    }
    row["survival"] = survival;
    powers[std::string(power_name(p))] = row;
  }
  j["powers"] = powers;
  return j.dump(2) + "\n";
}

}  // namespace diplo
