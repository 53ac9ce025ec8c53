#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "diplo/adjudicator.hpp"
#include "diplo/error.hpp"
#include "diplo/map.hpp"
#include "diplo/state.hpp"

namespace diplo {

// Conformance scenario file. Line oriented, '#' starts a comment:
//
//   case 6.A.1 moving to an area that is not a neighbour
//   phase S1901M                      (default S1901M)
//   unit ENGLAND F NTH
//   owner GERMANY HOL                 (override supply-centre owner; "none" clears)
//   dislodged TURKEY A BUL from SER [convoyed]
//   standoff BUR
//   order ENGLAND F NTH - PIC
//   expect F NTH - PIC invalid        (succeeds | fails | invalid)
//   expect-dislodged A HOL            (exact set; "expect-dislodged none" for empty)
//   expect-unit ENGLAND F HOL         (present after the phase)
//   expect-empty PIC                  (province vacant after the phase)
//   expect-phase F1901R
//   advance                           (resolve, apply, continue in the next phase)
//   end
//
// Supply centres start with their standard home owners.
class ScenarioError : public Error {
 public:
  ScenarioError(const std::string& msg, int line) : Error("line " + std::to_string(line) + ": " + msg), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

enum class ExpectedVerdict { Succeeds, Fails, Invalid };

struct ScenarioStep {
  std::vector<std::pair<Power, std::string>> orders;
  std::vector<std::pair<std::string, ExpectedVerdict>> verdicts;
  std::optional<std::vector<std::string>> dislodged;
  std::vector<std::pair<Power, std::string>> units_present;
  std::vector<std::string> provinces_empty;
  std::optional<std::string> next_phase;
};

struct Scenario {
  std::string id;
  std::string title;
  int line = 0;
  GameState state;
  std::vector<ScenarioStep> steps;
};

std::vector<Scenario> parse_scenarios(const MapGraph& map, std::string_view text);

struct StepOutcome {
  GameState before;
  std::vector<std::pair<Power, OrderCheck>> checks;  // in file order
  Resolution resolution;
  GameState after;
};

struct ScenarioResult {
  std::vector<StepOutcome> steps;
  std::vector<std::string> failures;  // empty when every expectation held
  bool passed() const { return failures.empty(); }
};

ScenarioResult run_scenario(const MapGraph& map, const Scenario& scenario);

// Human-readable adjudication report for one step.
std::string format_step_report(const MapGraph& map, const StepOutcome& step);

}  // namespace diplo
