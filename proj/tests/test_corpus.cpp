#include <filesystem>
#include <fstream>
#include <sstream>

#include "diplo/scenario.hpp"
#include "doctest.h"

namespace fs = std::filesystem;
using namespace diplo;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("conformance corpus") {
  const MapGraph& map = standard_map();
  int cases = 0;
  for (const auto& entry : fs::directory_iterator(DIPLO_CORPUS_DIR)) {
    if (entry.path().extension() != ".scn") continue;
    for (const Scenario& sc : parse_scenarios(map, slurp(entry.path()))) {
      ++cases;
      const ScenarioResult r = run_scenario(map, sc);
      for (const auto& f : r.failures) {
        INFO(entry.path().filename().string());
        CHECK_MESSAGE(false, f);
      }
    }
  }
  CHECK(cases >= 120);
}
