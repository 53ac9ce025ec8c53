#include "diplo/tournament.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include "json.hpp"

#include "diplo/error.hpp"

namespace diplo {

namespace {

// Gaussian in natural parameters: precision and precision-adjusted mean.
struct Gauss {
  double pi = 0;
  double tau = 0;

  static Gauss from_moments(double mu, double var) { return {1.0 / var, mu / var}; }
  double mu() const { return pi == 0 ? 0 : tau / pi; }
  double var() const { return pi == 0 ? std::numeric_limits<double>::infinity() : 1.0 / pi; }
  Gauss operator*(const Gauss& o) const { return {pi + o.pi, tau + o.tau}; }
  Gauss operator/(const Gauss& o) const { return {pi - o.pi, tau - o.tau}; }
};

const boost::math::normal kStd;
double pdf(double x) { return boost::math::pdf(kStd, x); }
double cdf(double x) { return boost::math::cdf(kStd, x); }

// Mean and variance corrections of a Gaussian truncated to d > eps (win) or
// |d| <= eps (draw), in units of its standard deviation.
double v_win(double t, double eps) {
  const double x = t - eps;
  const double denom = cdf(x);
  return denom > 0 ? pdf(x) / denom : -x;
}
double w_win(double t, double eps) {
  const double v = v_win(t, eps);
  return v * (v + t - eps);
}
double v_draw(double t, double eps) {
  const double abs_t = std::abs(t);
  const double a = eps - abs_t, b = -eps - abs_t;
  const double denom = cdf(a) - cdf(b);
  const double v = denom > 0 ? (pdf(b) - pdf(a)) / denom : a;
  return t < 0 ? -v : v;
}
double w_draw(double t, double eps) {
  const double abs_t = std::abs(t);
  const double a = eps - abs_t, b = -eps - abs_t;
  const double denom = cdf(a) - cdf(b);
  const double v = v_draw(abs_t, eps);
  return v * v + (a * pdf(a) - b * pdf(b)) / denom;
}

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

constexpr const char* kCategoryNames[] = {"win", "most_sc", "survived", "defeated"};

}  // namespace

double TrueSkillParams::draw_margin() const {
  return boost::math::quantile(kStd, (draw_probability + 1.0) / 2.0) * std::sqrt(2.0) * beta;
}

GameRanking rank_game(const GameRecord& record) {
  if (!record.outcome.ended()) throw StateError("cannot rank a game in progress");
  const GameState& last = record.phases.empty() ? record.initial : record.phases.back().state;
  // Sort key: survivors first by centres, then the eliminated latest first.
  std::array<std::pair<int, int>, kNumPowers> key{};
  for (Power p : kAllPowers) {
    if (!last.is_eliminated(p)) {
      key[index(p)] = {0, -last.sc_count(p)};
      continue;
    }
    int when = 0;
    while (when < static_cast<int>(record.phases.size()) && !record.phases[when].state.is_eliminated(p)) ++when;
    key[index(p)] = {1, -when};
  }
  GameRanking ranks{};
  for (int p = 0; p < kNumPowers; ++p) {
    int better = 0;
    for (int q = 0; q < kNumPowers; ++q) better += key[q] < key[p];
    ranks[p] = better + 1;
  }
  return ranks;
}

std::vector<Rating> trueskill_update(std::span<const Rating> ratings, std::span<const int> ranks,
                                     const TrueSkillParams& params) {
  if (ratings.size() != ranks.size()) throw ArgumentError("one rank per rating expected");
  const std::size_t n = ratings.size();
  const double beta2 = params.beta * params.beta, tau2 = params.tau * params.tau;
  std::vector<Rating> out(ratings.begin(), ratings.end());
  if (n < 2) {
    for (Rating& r : out) r.sigma = std::sqrt(r.sigma * r.sigma + tau2);
    return out;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ranks[a] < ranks[b]; });

  // Performance priors in rank order; k-th difference factor links players k and k+1.
  std::vector<Gauss> prior(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Rating& r = ratings[order[i]];
    prior[i] = Gauss::from_moments(r.mu, r.sigma * r.sigma + tau2 + beta2);
  }
  const std::size_t m = n - 1;
  std::vector<std::array<Gauss, 2>> to_perf(m);  // to player k and k+1
  std::vector<Gauss> to_diff(m), trunc(m);
  const double eps = params.draw_margin();

  auto marginal = [&](std::size_t i) {
    Gauss g = prior[i];
    if (i > 0) g = g * to_perf[i - 1][1];
    if (i < m) g = g * to_perf[i][0];
    return g;
  };
  auto cavity = [&](std::size_t i, std::size_t k) { return marginal(i) / to_perf[k][i == k ? 0 : 1]; };
  auto down = [&](std::size_t k) {
    const Gauss a = cavity(k, k), b = cavity(k + 1, k);
    to_diff[k] = Gauss::from_moments(a.mu() - b.mu(), a.var() + b.var());
  };
  auto truncate = [&](std::size_t k) {
    const Gauss cav = to_diff[k];
    const Gauss before = cav * trunc[k];
    const double sqrt_pi = std::sqrt(cav.pi);
    const double t = cav.tau / sqrt_pi, e = eps * sqrt_pi;
    const bool tied = ranks[order[k]] == ranks[order[k + 1]];
    const double v = tied ? v_draw(t, e) : v_win(t, e);
    const double w = tied ? w_draw(t, e) : w_win(t, e);
    const Gauss after{cav.pi / (1 - w), (cav.tau + sqrt_pi * v) / (1 - w)};
    trunc[k] = after / cav;
    return std::max(std::abs(after.tau - before.tau), std::sqrt(std::abs(after.pi - before.pi)));
  };
  auto up = [&](std::size_t k, int side) {
    const Gauss& d = trunc[k];
    if (side == 0) {
      const Gauss b = cavity(k + 1, k);
      to_perf[k][0] = Gauss::from_moments(d.mu() + b.mu(), d.var() + b.var());
    } else {
      const Gauss a = cavity(k, k);
      to_perf[k][1] = Gauss::from_moments(a.mu() - d.mu(), a.var() + d.var());
    }
  };

  constexpr double kMinDelta = 1e-4;
  for (int iter = 0; iter < 10; ++iter) {
    double delta = 0;
    if (m == 1) {
      down(0);
      delta = truncate(0);
    } else {
      for (std::size_t k = 0; k + 1 < m; ++k) {
        down(k);
        delta = std::max(delta, truncate(k));
        up(k, 1);
      }
      for (std::size_t k = m - 1; k > 0; --k) {
        down(k);
        delta = std::max(delta, truncate(k));
        up(k, 0);
      }
    }
    if (delta <= kMinDelta) break;
  }
  up(0, 0);
  up(m - 1, 1);

  for (std::size_t i = 0; i < n; ++i) {
    const Gauss evidence = marginal(i) / prior[i];
    const double a = 1.0 / (1.0 + beta2 * evidence.pi);
    const Rating& r = ratings[order[i]];
    const Gauss skill = Gauss::from_moments(r.mu, r.sigma * r.sigma + tau2) * Gauss{a * evidence.pi, a * evidence.tau};
    out[order[i]] = {skill.mu(), std::sqrt(skill.var())};
  }
  return out;
}

Entrant builtin_entrant(const std::string& name) {
  make_builtin_agent(name);  // validates the name
  return {name, [name] { return make_builtin_agent(name); }};
}

SeatResult seat_result(const GameRecord& record, Power power) {
  if (!record.outcome.ended()) throw StateError("game in progress");
  const GameState& last = record.phases.empty() ? record.initial : record.phases.back().state;
  if (record.outcome.kind == OutcomeKind::Solo && record.outcome.winner == power) return SeatResult::Win;
  if (last.is_eliminated(power)) return SeatResult::Defeated;
  if (record.outcome.kind == OutcomeKind::Draw) {
    int most = 0;
    for (Power p : kAllPowers) most = std::max(most, last.sc_count(p));
    if (last.sc_count(power) == most) return SeatResult::MostSc;
  }
  return SeatResult::Survived;
}

namespace {

// Plays games [0, n) in batches so that records need not all be held at
// once; `consume` sees them in game order.
constexpr int kBatch = 32;

void play_batched(const MapGraph& map, int n, std::uint64_t seed, const std::function<SeatAssignment(int)>& seats_for,
                  const Rules& rules, int threads, const std::function<void(int, const GameRecord&)>& consume) {
  for (int start = 0; start < n; start += kBatch) {
    const int count = std::min(kBatch, n - start);
    const auto records = run_games(
        map, count, seed + static_cast<std::uint64_t>(start), [&](int j) { return seats_for(start + j); }, rules,
        threads);
    for (int j = 0; j < count; ++j) consume(start + j, records[j]);
  }
}

}  // namespace

OneVsSixSummary run_1v6(const MapGraph& map, const Entrant& a, const Entrant& b, int n_games, std::uint64_t seed,
                        const Rules& rules, int threads) {
  OneVsSixSummary s;
  s.agent_a = a.name;
  s.agent_b = b.name;
  auto seats_for = [&](int i) {
    SeatAssignment seats;
    for (int p = 0; p < kNumPowers; ++p) seats.agents[p] = p == i % kNumPowers ? a.make() : b.make();
    return seats;
  };
  play_batched(map, n_games, seed, seats_for, rules, threads, [&](int i, const GameRecord& rec) {
    const Power solo = power_at(i % kNumPowers);
    ++s.games;
    ++s.a_games_by_power[index(solo)];
    for (Power p : kAllPowers) {
      const int r = static_cast<int>(seat_result(rec, p));
      if (p == solo) {
        ++s.a_counts[r];
        if (r == static_cast<int>(SeatResult::Win)) ++s.a_wins_by_power[index(p)];
      } else {
        ++s.b_counts[r];
      }
    }
  });
  return s;
}

std::array<int, kNumPowers> pool_seats(std::size_t pool_size, std::uint64_t seed, int game) {
  if (pool_size == 0) throw ArgumentError("empty pool");
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(game)};
  std::mt19937_64 rng(seq);
  std::array<int, kNumPowers> seats{};
  for (int& s : seats) s = static_cast<int>(rng() % pool_size);
  return seats;
}

PoolResult run_pool(const MapGraph& map, const std::vector<Entrant>& pool, int n_games, std::uint64_t seed,
                    const TrueSkillParams& params, const Rules& rules, int threads) {
  if (pool.size() < 1) throw ArgumentError("empty pool");
  PoolResult r;
  for (const Entrant& e : pool) r.names.push_back(e.name);
  r.ratings.assign(pool.size(), params.initial());
  r.seats.assign(pool.size(), 0);
  const double tau2 = params.tau * params.tau;

  auto seats_for = [&](int i) {
    const auto plan = pool_seats(pool.size(), seed, i);
    SeatAssignment seats;
    for (int p = 0; p < kNumPowers; ++p) seats.agents[p] = pool[plan[p]].make();
    return seats;
  };
  play_batched(map, n_games, seed, seats_for, rules, threads, [&](int i, const GameRecord& rec) {
    const auto plan = pool_seats(pool.size(), seed, i);
    const GameRanking ranks = rank_game(rec);
    std::vector<Rating> players;
    for (int p = 0; p < kNumPowers; ++p) players.push_back(r.ratings[plan[p]]);
    const auto updated = trueskill_update(players, ranks, params);

    // Each seat's posterior is the shared prior times that seat's evidence;
    // multiply all of an entrant's evidence into its prior.
    std::vector<Gauss> post(pool.size());
    std::vector<bool> seated(pool.size(), false);
    for (std::size_t e = 0; e < pool.size(); ++e)
      post[e] = Gauss::from_moments(r.ratings[e].mu, r.ratings[e].sigma * r.ratings[e].sigma + tau2);
    for (int p = 0; p < kNumPowers; ++p) {
      const int e = plan[p];
      const Gauss prior = Gauss::from_moments(r.ratings[e].mu, r.ratings[e].sigma * r.ratings[e].sigma + tau2);
      const Gauss seat = Gauss::from_moments(updated[p].mu, updated[p].sigma * updated[p].sigma);
      post[e] = post[e] * (seat / prior);
      seated[e] = true;
      ++r.seats[e];
    }
    for (std::size_t e = 0; e < pool.size(); ++e)
      if (seated[e]) r.ratings[e] = {post[e].mu(), std::sqrt(post[e].var())};
    std::vector<double> sigmas;
    for (const Rating& rt : r.ratings) sigmas.push_back(rt.sigma);
    r.sigma_trace.push_back(std::move(sigmas));
  });
  return r;
}

ChiSquare seat_homogeneity(const OneVsSixSummary& s) {
  ChiSquare out;
  const double na = std::accumulate(s.a_counts.begin(), s.a_counts.end(), 0.0);
  const double nb = std::accumulate(s.b_counts.begin(), s.b_counts.end(), 0.0);
  if (na == 0 || nb == 0) return out;
  int used = 0;
  for (int c = 0; c < 4; ++c) {
    const double total = s.a_counts[c] + s.b_counts[c];
    if (total == 0) continue;
    ++used;
    const double ea = total * na / (na + nb), eb = total * nb / (na + nb);
    out.statistic += (s.a_counts[c] - ea) * (s.a_counts[c] - ea) / ea + (s.b_counts[c] - eb) * (s.b_counts[c] - eb) / eb;
  }
  out.dof = used - 1;
  out.p_value = out.dof > 0 ? boost::math::gamma_q(out.dof / 2.0, out.statistic / 2.0) : 1.0;
  return out;
}

std::string one_vs_six_csv(const OneVsSixSummary& s) {
  std::string out = "agent_a,agent_b,pct_win,pct_most_sc,pct_survived,pct_defeated,games\n";
  out += s.agent_a + "," + s.agent_b;
  for (int c = 0; c < 4; ++c) out += "," + fixed(s.percent(static_cast<SeatResult>(c)), 1);
  out += "," + std::to_string(s.games) + "\n";
  return out;
}

std::string one_vs_six_json(const OneVsSixSummary& s) {
  nlohmann::ordered_json j;
  j["agent_a"] = s.agent_a;
  j["agent_b"] = s.agent_b;
  for (int c = 0; c < 4; ++c) j[std::string("pct_") + kCategoryNames[c]] = s.percent(static_cast<SeatResult>(c));
  j["games"] = s.games;
  nlohmann::ordered_json a, b;
  for (int c = 0; c < 4; ++c) {
    a[kCategoryNames[c]] = s.a_counts[c];
    b[kCategoryNames[c]] = s.b_counts[c];
  }
  j["a_counts"] = a;
  j["b_counts"] = b;
  nlohmann::ordered_json by_power;
  for (Power p : kAllPowers)
    by_power[std::string(power_name(p))] = {{"games", s.a_games_by_power[index(p)]},
                                            {"wins", s.a_wins_by_power[index(p)]}};
  j["a_by_power"] = by_power;
  return j.dump(2) + "\n";
}

std::string pool_csv(const PoolResult& r) {
  std::string out = "agent,mu,sigma,conservative,seats\n";
  for (std::size_t e = 0; e < r.names.size(); ++e)
    out += r.names[e] + "," + fixed(r.ratings[e].mu, 3) + "," + fixed(r.ratings[e].sigma, 3) + "," +
           fixed(r.ratings[e].conservative(), 3) + "," + std::to_string(r.seats[e]) + "\n";
  return out;
}

std::string pool_json(const PoolResult& r) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (std::size_t e = 0; e < r.names.size(); ++e)
    j.push_back({{"agent", r.names[e]},
                 {"mu", r.ratings[e].mu},
                 {"sigma", r.ratings[e].sigma},
                 {"conservative", r.ratings[e].conservative()},
                 {"seats", r.seats[e]}});
  return j.dump(2) + "\n";
}

std::string sigma_trace_csv(const PoolResult& r) {
  std::string out = "game";
  for (const auto& n : r.names) out += "," + n;
  out += "\n";
  for (std::size_t g = 0; g < r.sigma_trace.size(); ++g) {
    out += std::to_string(g + 1);
    for (double s : r.sigma_trace[g]) out += "," + fixed(s, 6);
    out += "\n";
  }
  return out;
}

}  // namespace diplo
