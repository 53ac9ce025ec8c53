#include "diplo/scenario.hpp"

#include <algorithm>
#include <sstream>

namespace diplo {

namespace {

std::vector<std::string> split_words(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream in{std::string(line)};
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

std::string join(const std::vector<std::string>& w, std::size_t from, std::size_t to) {
  std::string s;
  for (std::size_t i = from; i < to; ++i) {
    if (!s.empty()) s += ' ';
    s += w[i];
  }
  return s;
}

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

class ScenarioParser {
 public:
  ScenarioParser(const MapGraph& map) : map_(map) {}

  std::vector<Scenario> parse(std::string_view text) {
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t nl = text.find('\n', pos);
      if (nl == std::string_view::npos) nl = text.size();
      std::string_view line = text.substr(pos, nl - pos);
      ++line_;
      if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      auto words = split_words(line);
      if (!words.empty()) handle(words);
      pos = nl + 1;
    }
    if (open_) fail("case '" + cur_.id + "' has no end");
    return std::move(out_);
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ScenarioError(msg, line_); }

  Power power(const std::string& w) const {
    auto p = find_power(w);
    if (!p) fail("unknown power '" + w + "'");
    return *p;
  }

  Loc location(const std::string& w) const {
    auto l = map_.find_location(w);
    if (!l) fail("unknown location '" + w + "'");
    return *l;
  }

  UnitKind kind(const std::string& w) const {
    const std::string u = upper(w);
    if (u == "A") return UnitKind::Army;
    if (u == "F") return UnitKind::Fleet;
    fail("unit kind must be A or F, got '" + w + "'");
  }

  void check_order_text(const std::string& text) const {
    try {
      parse_order(map_, text);
    } catch (const ParseError& e) {
      fail(e.what());
    }
  }

  void handle(const std::vector<std::string>& w) {
    const std::string& kw = w[0];
    if (kw == "case") {
      if (open_) fail("case '" + cur_.id + "' has no end");
      if (w.size() < 2) fail("case needs an id");
      cur_ = Scenario{};
      cur_.id = w[1];
      cur_.title = join(w, 2, w.size());
      cur_.line = line_;
      cur_.state = initial_state(map_);
      cur_.state.set_units(map_, {});
      cur_.steps.emplace_back();
      units_.clear();
      dislodged_.clear();
      standoffs_.clear();
      open_ = true;
      started_ = false;
      return;
    }
    if (!open_) fail("'" + kw + "' outside a case");
    ScenarioStep& step = cur_.steps.back();
    auto need = [&](std::size_t n) {
      if (w.size() < n) fail("'" + kw + "' needs more arguments");
    };
    auto setup = [&] {
      if (started_) fail("'" + kw + "' after the first order or expectation");
    };

    if (kw == "phase") {
      setup();
      need(2);
      try {
        cur_.state.set_phase(Phase::parse(w[1]));
      } catch (const ArgumentError& e) {
        fail(e.what());
      }
    } else if (kw == "unit") {
      setup();
      need(4);
      Unit u{kind(w[2]), location(w[3]), power(w[1])};
      if (!map_.can_occupy(u.location, u.kind)) fail("unit cannot occupy " + w[3]);
      units_.push_back(u);
      try {
        cur_.state.set_units(map_, units_);
      } catch (const ContractError& e) {
        fail(e.what());
      }
    } else if (kw == "owner") {
      setup();
      need(3);
      const auto prov = map_.find_province(w[2]);
      if (!prov || !map_.is_supply_center(*prov)) fail("not a supply centre: " + w[2]);
      std::optional<Power> owner;
      if (upper(w[1]) != "NONE") owner = power(w[1]);
      cur_.state.set_sc_owner(map_, *prov, owner);
    } else if (kw == "dislodged") {
      setup();
      need(6);
      if (w[4] != "from") fail("expected 'from'");
      const auto origin = map_.find_province(w[5]);
      if (!origin) fail("unknown province '" + w[5] + "'");
      DislodgedUnit d{Unit{kind(w[2]), location(w[3]), power(w[1])}, *origin, w.size() > 6 && w[6] == "convoyed"};
      dislodged_.push_back(d);
      cur_.state.set_dislodged(dislodged_);
    } else if (kw == "standoff") {
      setup();
      need(2);
      const auto prov = map_.find_province(w[1]);
      if (!prov) fail("unknown province '" + w[1] + "'");
      standoffs_.push_back(*prov);
      cur_.state.set_standoffs(standoffs_);
    } else if (kw == "order") {
      need(3);
      started_ = true;
      const std::string text = join(w, 2, w.size());
      check_order_text(text);
      step.orders.emplace_back(power(w[1]), text);
    } else if (kw == "expect") {
      need(3);
      started_ = true;
      const std::string v = w.back();
      ExpectedVerdict ev;
      if (v == "succeeds") ev = ExpectedVerdict::Succeeds;
      else if (v == "fails") ev = ExpectedVerdict::Fails;
      else if (v == "invalid") ev = ExpectedVerdict::Invalid;
      else fail("verdict must be succeeds, fails or invalid");
      const std::string text = join(w, 1, w.size() - 1);
      check_order_text(text);
      step.verdicts.emplace_back(text, ev);
    } else if (kw == "expect-dislodged") {
      need(2);
      started_ = true;
      if (!step.dislodged) step.dislodged.emplace();
      if (w.size() == 2 && w[1] == "none") return;
      need(3);
      location(w[2]);
      step.dislodged->push_back(upper(w[1]) + " " + std::string(map_.location_name(location(w[2]))));
    } else if (kw == "expect-unit") {
      need(4);
      started_ = true;
      Unit u{kind(w[2]), location(w[3]), power(w[1])};
      step.units_present.emplace_back(u.owner, unit_string(map_, u));
    } else if (kw == "expect-empty") {
      need(2);
      started_ = true;
      if (!map_.find_province(w[1])) fail("unknown province '" + w[1] + "'");
      step.provinces_empty.push_back(w[1]);
    } else if (kw == "expect-phase") {
      need(2);
      started_ = true;
      try {
        step.next_phase = Phase::parse(w[1]).code();
      } catch (const ArgumentError& e) {
        fail(e.what());
      }
    } else if (kw == "advance") {
      started_ = true;
      cur_.steps.emplace_back();
    } else if (kw == "end") {
      out_.push_back(std::move(cur_));
      open_ = false;
    } else {
      fail("unknown keyword '" + kw + "'");
    }
  }

  const MapGraph& map_;
  int line_ = 0;
  bool open_ = false;
  bool started_ = false;
  Scenario cur_;
  std::vector<Unit> units_;
  std::vector<DislodgedUnit> dislodged_;
  std::vector<Province> standoffs_;
  std::vector<Scenario> out_;
};

std::string_view verdict_name(ExpectedVerdict v) {
  switch (v) {
    case ExpectedVerdict::Succeeds: return "succeeds";
    case ExpectedVerdict::Fails: return "fails";
    case ExpectedVerdict::Invalid: return "invalid";
  }
  return "?";
}

}  // namespace

std::vector<Scenario> parse_scenarios(const MapGraph& map, std::string_view text) {
  return ScenarioParser(map).parse(text);
}

ScenarioResult run_scenario(const MapGraph& map, const Scenario& sc) {
  ScenarioResult result;
  GameState state = sc.state;
  for (std::size_t si = 0; si < sc.steps.size(); ++si) {
    const ScenarioStep& step = sc.steps[si];
    const std::string where = sc.steps.size() > 1 ? " (step " + std::to_string(si + 1) + ")" : "";
    StepOutcome oc;
    oc.before = state;

    std::vector<Order> accepted;
    for (Power p : kAllPowers) {
      std::vector<Order> mine;
      std::vector<std::size_t> slots;
      for (std::size_t i = 0; i < step.orders.size(); ++i)
        if (step.orders[i].first == p) {
          mine.push_back(parse_order(map, step.orders[i].second));
          slots.push_back(i);
        }
      if (mine.empty()) continue;
      for (OrderCheck& c : validate(map, state, p, mine)) {
        if (c.valid && c.order.type != OrderType::Waive) accepted.push_back(c.order);
        oc.checks.emplace_back(p, std::move(c));
      }
    }
    // Keep checks in file order.
    std::vector<std::pair<Power, OrderCheck>> ordered;
    {
      std::array<std::size_t, kNumPowers> next{};
      std::array<std::size_t, kNumPowers> base{};
      std::size_t acc = 0;
      for (Power p : kAllPowers) {
        base[index(p)] = acc;
        for (const auto& [q, _] : step.orders)
          if (q == p) ++acc;
      }
      for (const auto& [p, _] : step.orders) ordered.push_back(oc.checks[base[index(p)] + next[index(p)]++]);
      oc.checks = std::move(ordered);
    }

    try {
      oc.resolution = resolve(map, state, accepted);
    } catch (const Error& e) {
      result.failures.push_back(sc.id + where + ": adjudication error: " + e.what());
      result.steps.push_back(std::move(oc));
      return result;
    }
    oc.after = apply(map, state, oc.resolution);

    for (const auto& [text, expected] : step.verdicts) {
      const Order o = canonicalize(map, state, parse_order(map, text));
      std::optional<ExpectedVerdict> got;
      if (const OrderVerdict* v = oc.resolution.find(o); v && !v->implicit)
        got = v->succeeds ? ExpectedVerdict::Succeeds : ExpectedVerdict::Fails;
      else
        for (const auto& [p, c] : oc.checks)
          if (c.order == o && !got) {
            // Explicit waives carry no power and get no verdict of their own.
            if (!c.valid) got = ExpectedVerdict::Invalid;
            else if (o.type == OrderType::Waive) got = ExpectedVerdict::Succeeds;
          }
      if (!got)
        result.failures.push_back(sc.id + where + ": no verdict for '" + text + "'");
      else if (*got != expected)
        result.failures.push_back(sc.id + where + ": '" + text + "' expected " + std::string(verdict_name(expected)) +
                                  ", got " + std::string(verdict_name(*got)));
    }

    if (step.dislodged) {
      std::vector<std::string> got;
      for (const DislodgedUnit& d : oc.resolution.dislodged) got.push_back(unit_string(map, d.unit));
      std::vector<std::string> want = *step.dislodged;
      std::sort(got.begin(), got.end());
      std::sort(want.begin(), want.end());
      if (got != want) {
        std::string g, x;
        for (auto& s : got) g += (g.empty() ? "" : ", ") + s;
        for (auto& s : want) x += (x.empty() ? "" : ", ") + s;
        result.failures.push_back(sc.id + where + ": dislodged [" + g + "], expected [" + x + "]");
      }
    }

    for (const auto& [owner, text] : step.units_present) {
      bool found = false;
      for (const Unit& u : oc.after.units())
        if (u.owner == owner && unit_string(map, u) == text) found = true;
      if (!found)
        result.failures.push_back(sc.id + where + ": expected " + std::string(power_name(owner)) + " " + text);
    }
    for (const std::string& name : step.provinces_empty) {
      const Province p = *map.find_province(name);
      if (const Unit* u = oc.after.unit_in(p))
        result.failures.push_back(sc.id + where + ": expected " + name + " empty, found " + unit_string(map, *u));
    }
    if (step.next_phase && oc.after.phase().code() != *step.next_phase)
      result.failures.push_back(sc.id + where + ": next phase " + oc.after.phase().code() + ", expected " +
                                *step.next_phase);

    state = oc.after;
    result.steps.push_back(std::move(oc));
  }
  return result;
}

std::string format_step_report(const MapGraph& map, const StepOutcome& step) {
  std::ostringstream out;
  out << "phase " << step.before.phase().code() << "\n";
  for (const auto& [p, c] : step.checks)
    if (!c.valid)
      out << "  invalid  " << power_name(p) << " " << format_order(map, c.order) << " (" << c.reason << ")\n";
  for (const OrderVerdict& v : step.resolution.verdicts) {
    out << "  " << (v.succeeds ? "succeeds" : "fails   ") << " " << power_name(v.power) << " "
        << format_order(map, v.order);
    if (!v.succeeds && !v.reason.empty()) out << " (" << v.reason << ")";
    if (v.implicit) out << " [default]";
    out << "\n";
  }
  for (const DislodgedUnit& d : step.resolution.dislodged)
    out << "  dislodged " << power_name(d.unit.owner) << " " << unit_string(map, d.unit) << " from "
        << map.province_name(d.attacker_origin) << "\n";
  for (Province p : step.resolution.standoffs) out << "  standoff " << map.province_name(p) << "\n";
  const bool unchanged = step.resolution.dislodged.empty() && step.after.units() == step.before.units() &&
                         step.after.sc_owners() == step.before.sc_owners();
  if (unchanged) out << "  no changes\n";
  out << "next " << step.after.phase().code() << "\n";
  return out.str();
}

}  // namespace diplo
