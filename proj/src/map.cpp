#include "diplo/map.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <deque>
#include <map>
#include <sstream>

#include "diplo/error.hpp"

namespace diplo {

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

[[noreturn]] void fail(const std::string& what) { throw MapIntegrityError("map integrity: " + what); }

double parse_double(std::string_view s, int line_no) {
  double v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size())
    fail("bad coordinate '" + std::string(s) + "' on line " + std::to_string(line_no));
  return v;
}

struct RawLocation {
  std::string name;
  std::string kind;
  double x = 0, y = 0;
};

std::vector<int> bfs(std::span<const std::vector<Loc>> adj, int start) {
  std::vector<int> dist(adj.size(), -1);
  std::deque<int> queue{start};
  dist[start] = 0;
  while (!queue.empty()) {
    int cur = queue.front();
    queue.pop_front();
    for (Loc n : adj[cur]) {
      if (dist[index(n)] < 0) {
        dist[index(n)] = dist[cur] + 1;
        queue.push_back(index(n));
      }
    }
  }
  return dist;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

MapGraph MapGraph::parse(std::string_view text) {
  MapGraph m;

  auto first_nl = text.find('\n');
  if (first_nl == std::string_view::npos) fail("missing checksum line");
  auto header = split_ws(text.substr(0, first_nl));
  if (header.size() != 2 || header[0] != "checksum") fail("first line must be 'checksum <hex>'");
  std::uint64_t declared = 0;
  {
    auto hs = header[1];
    auto [p, ec] = std::from_chars(hs.data(), hs.data() + hs.size(), declared, 16);
    if (ec != std::errc() || p != hs.data() + hs.size()) fail("unreadable checksum");
  }
  std::string_view body = text.substr(first_nl + 1);
  m.checksum_ = fnv1a64(body);
  if (m.checksum_ != declared) fail("checksum mismatch");

  std::vector<RawLocation> raw_locs;
  std::vector<std::pair<std::string, std::vector<std::string>>> army_lines, fleet_lines;
  std::vector<std::string> sc_names;
  std::vector<std::pair<std::string, std::vector<std::string>>> home_lines;
  std::vector<std::array<std::string, 3>> unit_lines;
  bool have_format = false;

  std::istringstream in{std::string(body)};
  std::string line;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    auto tok = split_ws(line);
    if (tok.empty() || tok[0].front() == '#') continue;
    const auto kw = tok[0];
    if (kw == "format") {
      if (tok.size() != 2 || tok[1] != "1") fail("unsupported format version");
      have_format = true;
    } else if (kw == "name") {
      if (tok.size() != 2) fail("bad name line");
      m.name_ = std::string(tok[1]);
    } else if (kw == "land" || kw == "water" || kw == "coastal" || kw == "coast") {
      if (tok.size() != 4) fail("bad location line " + std::to_string(line_no));
      raw_locs.push_back({upper(tok[1]), std::string(kw), parse_double(tok[2], line_no),
                          parse_double(tok[3], line_no)});
    } else if (kw == "army" || kw == "fleet") {
      if (tok.size() < 2 || tok[1].back() != ':') fail("bad adjacency line " + std::to_string(line_no));
      std::vector<std::string> ns;
      for (std::size_t i = 2; i < tok.size(); ++i) ns.push_back(upper(tok[i]));
      auto from = upper(tok[1].substr(0, tok[1].size() - 1));
      (kw == "army" ? army_lines : fleet_lines).emplace_back(from, std::move(ns));
    } else if (kw == "sc") {
      for (std::size_t i = 1; i < tok.size(); ++i) sc_names.push_back(upper(tok[i]));
    } else if (kw == "home") {
      if (tok.size() < 2) fail("bad home line");
      std::vector<std::string> ns;
      for (std::size_t i = 2; i < tok.size(); ++i) ns.push_back(upper(tok[i]));
      home_lines.emplace_back(std::string(tok[1]), std::move(ns));
    } else if (kw == "unit") {
      if (tok.size() != 4) fail("bad unit line " + std::to_string(line_no));
      unit_lines.push_back({std::string(tok[1]), std::string(tok[2]), upper(tok[3])});
    } else {
      fail("unknown directive '" + std::string(kw) + "' on line " + std::to_string(line_no));
    }
  }
  if (!have_format) fail("missing format line");

  // Locations and provinces.
  if (raw_locs.size() != kNumLocations)
    fail("expected " + std::to_string(kNumLocations) + " locations, found " + std::to_string(raw_locs.size()));
  std::sort(raw_locs.begin(), raw_locs.end(), [](auto& a, auto& b) { return a.name < b.name; });
  for (std::size_t i = 1; i < raw_locs.size(); ++i)
    if (raw_locs[i].name == raw_locs[i - 1].name) fail("duplicate location " + raw_locs[i].name);

  std::vector<std::string> prov_names;
  for (auto& r : raw_locs)
    if (r.kind != "coast") prov_names.push_back(r.name);
  if (prov_names.size() != kNumProvinces)
    fail("expected " + std::to_string(kNumProvinces) + " provinces, found " + std::to_string(prov_names.size()));

  std::map<std::string, int> loc_idx, prov_idx;
  for (int i = 0; i < kNumLocations; ++i) loc_idx[raw_locs[i].name] = i;
  for (int i = 0; i < kNumProvinces; ++i) {
    prov_idx[prov_names[i]] = i;
    m.province_names_[i] = prov_names[i];
  }

  for (int i = 0; i < kNumLocations; ++i) {
    const auto& r = raw_locs[i];
    m.loc_names_[i] = r.name;
    m.coords_[i] = {r.x, r.y};
    if (r.kind == "coast") {
      auto slash = r.name.find('/');
      if (slash == std::string::npos) fail("coast location without tag: " + r.name);
      auto tag = r.name.substr(slash + 1);
      if (tag != "NC" && tag != "SC" && tag != "EC" && tag != "WC") fail("malformed coast tag: " + r.name);
      auto parent = r.name.substr(0, slash);
      auto it = prov_idx.find(parent);
      if (it == prov_idx.end()) fail("coast without parent province: " + r.name);
      if (raw_locs[loc_idx[parent]].kind != "coastal") fail("coast of non-coastal province: " + r.name);
      m.loc_province_[i] = province_at(it->second);
      m.loc_is_coast_[i] = true;
      m.terrain_[i] = Terrain::Coastal;
    } else {
      if (r.name.find('/') != std::string::npos) fail("coast tag on a non-coast location: " + r.name);
      m.loc_province_[i] = province_at(prov_idx[r.name]);
      m.terrain_[i] = r.kind == "land" ? Terrain::Land : r.kind == "water" ? Terrain::Water : Terrain::Coastal;
      m.province_loc_[prov_idx[r.name]] = loc_at(i);
    }
    m.province_locs_[index(m.loc_province_[i])].push_back(loc_at(i));
  }
  for (int p = 0; p < kNumProvinces; ++p)
    if (m.province_locs_[p].size() == 2) fail("province with a single coast: " + prov_names[p]);

  auto lookup_loc = [&](const std::string& n) {
    auto it = loc_idx.find(n);
    if (it == loc_idx.end()) fail("unknown location '" + n + "'");
    return it->second;
  };

  // Adjacency.
  auto load_adj = [&](auto& lines, auto& adj, auto& adj_set, UnitKind kind) {
    for (auto& [from, ns] : lines) {
      int a = lookup_loc(from);
      for (auto& n : ns) {
        int b = lookup_loc(n);
        if (a == b) fail("self adjacency at " + from);
        adj_set[a].set(b);
      }
    }
    for (int a = 0; a < kNumLocations; ++a) {
      for (int b = 0; b < kNumLocations; ++b) {
        if (!adj_set[a].test(b)) continue;
        if (!adj_set[b].test(a))
          fail(std::string(kind == UnitKind::Army ? "army" : "fleet") + " adjacency not symmetric: " +
               m.loc_names_[a] + "-" + m.loc_names_[b]);
        adj[a].push_back(loc_at(b));
      }
    }
  };
  load_adj(army_lines, m.army_adj_, m.army_adj_set_, UnitKind::Army);
  load_adj(fleet_lines, m.fleet_adj_, m.fleet_adj_set_, UnitKind::Fleet);

  for (int a = 0; a < kNumLocations; ++a) {
    const bool split_parent = m.province_locs_[index(m.loc_province_[a])].size() > 1 && !m.loc_is_coast_[a];
    if (m.army_adj_set_[a].any() && (m.terrain_[a] == Terrain::Water || m.loc_is_coast_[a]))
      fail("army adjacency at water or coast location " + m.loc_names_[a]);
    for (Loc b : m.army_adj_[a]) {
      if (m.terrain_[index(b)] == Terrain::Water) fail("army adjacency touches water: " + m.loc_names_[a]);
    }
    if (m.fleet_adj_set_[a].any() && (m.terrain_[a] == Terrain::Land || split_parent))
      fail("fleet adjacency at land or split-coast parent location " + m.loc_names_[a]);
  }

  // Supply and home centres.
  m.sc_index_.fill(-1);
  std::sort(sc_names.begin(), sc_names.end());
  for (auto& n : sc_names) {
    auto it = prov_idx.find(n);
    if (it == prov_idx.end()) fail("supply center is not a province: " + n);
    if (m.sc_index_[it->second] >= 0) fail("duplicate supply center " + n);
    if (m.terrain_[index(m.province_loc_[it->second])] == Terrain::Water) fail("supply center at sea: " + n);
    m.sc_index_[it->second] = static_cast<int>(m.supply_centers_.size());
    m.supply_centers_.push_back(province_at(it->second));
  }
  if (m.supply_centers_.size() != kNumSupplyCenters)
    fail("expected " + std::to_string(kNumSupplyCenters) + " supply centers, found " +
         std::to_string(m.supply_centers_.size()));

  std::array<bool, kNumPowers> seen_power{};
  for (auto& [pw_name, ns] : home_lines) {
    auto pw = find_power(pw_name);
    if (!pw) fail("unknown power " + pw_name);
    if (seen_power[index(*pw)]) fail("duplicate home line for " + pw_name);
    seen_power[index(*pw)] = true;
    for (auto& n : ns) {
      auto it = prov_idx.find(n);
      if (it == prov_idx.end() || m.sc_index_[it->second] < 0) fail("home center is not a supply center: " + n);
      if (m.home_power_[it->second]) fail("home center claimed twice: " + n);
      m.home_power_[it->second] = *pw;
      m.home_centers_[index(*pw)].push_back(province_at(it->second));
    }
    std::sort(m.home_centers_[index(*pw)].begin(), m.home_centers_[index(*pw)].end());
  }
  for (int p = 0; p < kNumPowers; ++p)
    if (!seen_power[p] || m.home_centers_[p].empty()) fail("power without home centers");

  // Opening units.
  std::array<bool, kNumProvinces> occupied{};
  for (auto& [pw_name, kind_s, where] : unit_lines) {
    auto pw = find_power(pw_name);
    if (!pw) fail("unknown power " + pw_name);
    if (kind_s != "A" && kind_s != "F") fail("bad unit kind " + kind_s);
    const UnitKind kind = kind_s == "A" ? UnitKind::Army : UnitKind::Fleet;
    const Loc l = loc_at(lookup_loc(where));
    if (!m.can_occupy(l, kind)) fail("opening unit cannot occupy " + where);
    auto prov = index(m.loc_province_[index(l)]);
    if (occupied[prov]) fail("two opening units in " + prov_names[prov]);
    occupied[prov] = true;
    m.opening_units_.push_back({*pw, kind, l});
  }

  m.finalize();
  if (m.diameter_ != 8) fail("union graph diameter is " + std::to_string(m.diameter_) + ", expected 8");
  return m;
}

void MapGraph::finalize() {
  for (int a = 0; a < kNumLocations; ++a) {
    LocSet s = army_adj_set_[a] | fleet_adj_set_[a];
    for (Loc sib : province_locs_[index(loc_province_[a])]) {
      if (index(sib) != a && (index(sib) == index(province_loc_[index(loc_province_[a])]) || !loc_is_coast_[a]))
        s.set(index(sib));
    }
    for (int b = 0; b < kNumLocations; ++b)
      if (s.test(b)) union_adj_[a].push_back(loc_at(b));
  }
  // Coast/parent links must be mutual.
  for (int a = 0; a < kNumLocations; ++a)
    for (Loc b : union_adj_[a])
      if (std::find(union_adj_[index(b)].begin(), union_adj_[index(b)].end(), loc_at(a)) == union_adj_[index(b)].end())
        fail("union graph not symmetric at " + loc_names_[a]);

  for (int a = 0; a < kNumLocations; ++a) {
    auto& seas = adjacent_seas_[index(loc_province_[a])];
    for (Loc b : fleet_adj_[a])
      if (terrain_[index(b)] == Terrain::Water && std::find(seas.begin(), seas.end(), loc_province_[index(b)]) == seas.end())
        seas.push_back(loc_province_[index(b)]);
  }
  for (auto& seas : adjacent_seas_) std::sort(seas.begin(), seas.end());

  diameter_ = 0;
  for (int a = 0; a < kNumLocations; ++a) {
    auto d = bfs(union_adj_, a);
    for (int v : d) {
      if (v < 0) fail("map graph is disconnected");
      diameter_ = std::max(diameter_, v);
    }
  }

  // Province distances over the union graph with coasts merged into provinces.
  std::array<std::vector<Loc>, kNumProvinces> prov_adj;
  for (int a = 0; a < kNumLocations; ++a) {
    int pa = index(loc_province_[a]);
    for (Loc b : union_adj_[a]) {
      int pb = index(loc_province_[index(b)]);
      if (pa != pb) prov_adj[pa].push_back(loc_at(pb));
    }
  }
  province_dist_.assign(kNumProvinces * kNumProvinces, 0);
  for (int p = 0; p < kNumProvinces; ++p) {
    auto d = bfs(prov_adj, p);
    for (int q = 0; q < kNumProvinces; ++q) province_dist_[p * kNumProvinces + q] = static_cast<std::uint8_t>(d[q]);
  }

  army_dist_.assign(kNumLocations * kNumLocations, -1);
  fleet_dist_.assign(kNumLocations * kNumLocations, -1);
  for (int a = 0; a < kNumLocations; ++a) {
    auto da = bfs(army_adj_, a);
    auto df = bfs(fleet_adj_, a);
    for (int b = 0; b < kNumLocations; ++b) {
      army_dist_[a * kNumLocations + b] = static_cast<std::int8_t>(da[b]);
      fleet_dist_[a * kNumLocations + b] = static_cast<std::int8_t>(df[b]);
    }
  }
}

std::optional<Loc> MapGraph::find_location(std::string_view name) const {
  const auto u = upper(name);
  auto it = std::lower_bound(loc_names_.begin(), loc_names_.end(), u);
  if (it == loc_names_.end() || *it != u) return std::nullopt;
  return loc_at(static_cast<int>(it - loc_names_.begin()));
}

Loc MapGraph::location(std::string_view name) const {
  auto l = find_location(name);
  if (!l) throw LookupError("unknown location '" + std::string(name) + "'");
  return *l;
}

std::optional<Province> MapGraph::find_province(std::string_view name) const {
  const auto u = upper(name);
  auto it = std::lower_bound(province_names_.begin(), province_names_.end(), u);
  if (it == province_names_.end() || *it != u) return std::nullopt;
  return province_at(static_cast<int>(it - province_names_.begin()));
}

bool MapGraph::can_occupy(Loc l, UnitKind k) const {
  const Terrain t = terrain_[index(l)];
  if (k == UnitKind::Army) return t != Terrain::Water && !loc_is_coast_[index(l)];
  if (t == Terrain::Land) return false;
  // A fleet in a split-coast province must name the coast.
  return loc_is_coast_[index(l)] || province_locs_[index(loc_province_[index(l)])].size() == 1;
}

bool MapGraph::reaches_province(Loc from, Province p, UnitKind k) const {
  const auto& adj = adjacent_set(from, k);
  for (Loc l : province_locs_[index(p)])
    if (adj.test(index(l))) return true;
  return false;
}

int MapGraph::unit_distance(Loc from, Loc to, UnitKind k) const {
  const auto& d = k == UnitKind::Army ? army_dist_ : fleet_dist_;
  return d[index(from) * kNumLocations + index(to)];
}

std::vector<Loc> adjacent(const MapGraph& map, std::string_view location, UnitKind kind) {
  auto adj = map.adjacent(map.location(location), kind);
  return {adj.begin(), adj.end()};
}

DenseMatrix normalized_adjacency(std::span<const std::vector<int>> neighbors) {
  const int n = static_cast<int>(neighbors.size());
  DenseMatrix a{n, n, std::vector<double>(static_cast<std::size_t>(n) * n, 0.0)};
  for (int i = 0; i < n; ++i) {
    a(i, i) = 1.0;
    for (int j : neighbors[i]) a(i, j) = 1.0;
  }
  std::vector<double> inv_sqrt_deg(n);
  for (int i = 0; i < n; ++i) {
    double deg = 0;
    for (int j = 0; j < n; ++j) deg += a(i, j);
    inv_sqrt_deg[i] = 1.0 / std::sqrt(deg);
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) *= inv_sqrt_deg[i] * inv_sqrt_deg[j];
  return a;
}

DenseMatrix normalized_adjacency(const MapGraph& map) {
  std::vector<std::vector<int>> nbrs(kNumLocations);
  for (int i = 0; i < kNumLocations; ++i)
    for (Loc l : map.graph_neighbors(loc_at(i))) nbrs[i].push_back(index(l));
  return normalized_adjacency(nbrs);
}

MapGraph load_standard_map() { return MapGraph::parse(standard_map_text()); }

const MapGraph& standard_map() {
  static const MapGraph instance = load_standard_map();
  return instance;
}

}  // namespace diplo
