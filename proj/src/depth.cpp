// Depth formulas for m-elimination tournaments and the measurements they
// are checked against.

#include <algorithm>
#include <cmath>

#include "ect/analysis.hpp"

namespace ect {

int ceil_log2(long long k) {
  if (k < 1) throw InvalidArgument("ceil_log2 needs k >= 1");
  int e = 0;
  while ((1LL << e) < k) ++e;
  return e;
}

long long ceil_pow2(long long m) { return 1LL << ceil_log2(m); }

long long floor_pow2(long long m) {
  if (m < 1) throw InvalidArgument("floor_pow2 needs m >= 1");
  long long p = 1;
  while (p * 2 <= m) p *= 2;
  return p;
}

double chernoff_depth(double k, int m) {
  const double lk = std::log(k);
  return 2.0 * (m - 1) + lk + std::sqrt(4.0 * (m - 1) * lk + lk * lk);
}

double DepthBounds::min_first_phase() const { return *std::min_element(first_phase.begin(), first_phase.end()); }
double DepthBounds::min_importance() const { return *std::min_element(importance.begin(), importance.end()); }

DepthBounds depth_bounds(int k, int m) {
  if (k < 2 || m < 1) throw InvalidArgument("depth bounds need k >= 2 and m >= 1");
  DepthBounds b;
  b.k = k;
  b.m = m;
  const double L = ceil_log2(k);
  const double lk = std::log(static_cast<double>(k));
  b.ceil_m2 = ceil_pow2(m);
  b.floor_m2 = floor_pow2(m);
  const auto cm = static_cast<double>(b.ceil_m2);
  b.chernoff_d = chernoff_depth(k, m);
  b.second_phase = m > 1 ? static_cast<int>(b.ceil_m2 - 1) : 0;
  b.case4 = m <= 4.0 * std::log2(static_cast<double>(k));

  const double c1 = L + m * ceil_log2(static_cast<long long>(L) + 1);
  const double c2 = 1.5 * L + 3.0 * m;
  const double c3 = std::ceil(k / 2.0) + 2.0 * m;
  b.first_phase = {c1, c2 + 1.0, c3};
  b.importance = {c1 + cm, c2 + cm, c3 + cm};
  if (b.case4) {
    b.first_phase.push_back(2.0 * (m - 1) + lk + std::sqrt(lk) * std::sqrt(lk + 4.0 * (m - 1)));
    b.importance.push_back(2.0 * m + cm + 2.0 * lk + 2.0 * std::sqrt(m * lk));
  }
  return b;
}

LevelTracker level_tracker(long long k, int m) {
  if (k < 2 || m < 1) throw InvalidArgument("level tracker needs k >= 2 and m >= 1");
  LevelTracker t;
  std::vector<long long> pools(static_cast<std::size_t>(m), 0);
  pools[0] = k;
  t.occupancy.push_back(pools);
  while (std::any_of(pools.begin(), pools.end(), [](long long n) { return n > 1; })) {
    std::vector<long long> next(pools.size(), 0);
    for (std::size_t i = 0; i < pools.size(); ++i) {
      const long long losers = pools[i] / 2;
      next[i] += pools[i] - losers;
      if (i + 1 < pools.size()) next[i + 1] += losers;
    }
    pools = std::move(next);
    t.occupancy.push_back(pools);
    ++t.rounds;
  }
  return t;
}

MeasuredDepth measure_depth(int k, int m, Semantics semantics, int random_patterns, std::uint64_t seed) {
  const TournamentConfig cfg{k, m, semantics, false};
  std::vector<double> down(static_cast<std::size_t>(k)), up(static_cast<std::size_t>(k));
  for (Label y = 0; y < k; ++y) {
    down[static_cast<std::size_t>(y)] = -static_cast<double>(y);
    up[static_cast<std::size_t>(y)] = static_cast<double>(y);
  }
  MeasuredDepth out;
  auto take = [&](const TournamentResult& r) {
    out.first_phase_rounds = std::max(out.first_phase_rounds, r.first_phase_rounds);
    ++out.patterns;
  };
  take(run_tournament(cfg, down, {}));
  take(run_tournament(cfg, up, {}));
  for (int i = 0; i < random_patterns; ++i) {
    AdversarySpec coin;
    coin.kind = AdversaryKind::RateRandom;
    coin.rate = 0.5;
    coin.seed = derive_seed(seed, static_cast<std::uint64_t>(i));
    take(run_tournament(cfg, down, coin));
  }
  out.final_depth = ChargedFinalTree(m).importance_depth(false);
  out.importance_depth = out.first_phase_rounds + out.final_depth;
  return out;
}

int bracketed_final_rounds(int m) {
  int total = 0;
  for (int i = 1; i <= m; ++i) total += i - 1;
  return total;
}

double multi_bound_1(int k, double m) { return 2.0 + static_cast<double>(ceil_pow2(static_cast<long long>(std::ceil(m)))) / m + k / (2.0 * m); }

double multi_bound_2(int k, double m) {
  const double lk = std::log(static_cast<double>(k));
  return 4.0 + 2.0 * lk / m + 2.0 * std::sqrt(lk / m);
}

namespace {

// Importance depth of the run that the dethroning witness describes.
int witness_depth(const TournamentConfig& cfg, const std::vector<char>& witness) {
  TournamentRun run(cfg);
  std::size_t pos = 0;
  std::vector<char> outcomes;
  while (!run.finished()) {
    const std::size_t n = run.pending().size();
    if (pos + n > witness.size()) throw HarnessFault("dethroning witness is too short");
    outcomes.assign(witness.begin() + static_cast<std::ptrdiff_t>(pos), witness.begin() + static_cast<std::ptrdiff_t>(pos + n));
    pos += n;
    run.resolve(outcomes);
  }
  return run.first_phase_rounds() + run.final_tree().importance_depth(cfg.repeated);
}

}  // namespace

RatioReport ratio_report(int k, int m, Semantics semantics, const DethroningOptions& search) {
  const TournamentConfig cfg{k, m, semantics, false};
  cfg.validate();
  RatioReport rep;
  rep.k = k;
  rep.m = m;
  rep.semantics = semantics;
  rep.bound_1_applies = m >= 2 && k > 2;
  rep.bound_1 = multi_bound_1(k, m);
  rep.bound_2_applies = m <= 4.0 * std::log2(static_cast<double>(k));
  rep.bound_2 = multi_bound_2(k, m);
  if (m == 1) rep.corollary_bound = ceil_log2(k);

  auto consider = [&](double ratio, const std::string& source) {
    if (ratio > rep.worst_ratio || rep.worst_source.empty()) {
      rep.worst_ratio = ratio;
      rep.worst_source = source;
    }
  };

  // Cheapest dethroning: the adversary pays its cost, the tournament pays a
  // full unit of regret (D puts all mass on the best label).
  DethroningOptions opts = search;
  opts.stochastic_fallback = true;
  const DethroningResult d = min_dethroning_cost(cfg, opts);
  rep.dethroning_cost = d.cost;
  rep.dethroning_exact = d.exact;
  if (std::isfinite(d.cost)) consider(d.cost > 0.0 ? witness_depth(cfg, d.witness) / d.cost : kUnbounded, "dethroning");

  if (k >= 3) {
    const ParityRun p = parity_adversary_run(cfg);
    consider(p.ratio, "parity");
  }

  std::vector<double> skill(static_cast<std::size_t>(k));
  for (Label y = 0; y < k; ++y) skill[static_cast<std::size_t>(y)] = -static_cast<double>(y);
  for (auto kind : {AdversaryKind::BudgetFullLie, AdversaryKind::BudgetHalfLie}) {
    for (int b = 1; b <= 2 * m; ++b) {
      AdversarySpec spec;
      spec.kind = kind;
      spec.budget = b;
      const TournamentResult r = run_tournament(cfg, skill, spec);
      if (r.winner == 0 || r.weighted_error <= 0.0) continue;
      // D concentrated on label 0; every contradicted match cost its weight.
      double adv = 0.0;
      for (const auto& rec : r.transcript) {
        const Label loser = rec.winner == rec.match.a ? rec.match.b : rec.match.a;
        if (loser == 0) adv += rec.weight;
      }
      if (adv > 0.0) consider(r.importance_depth / adv, to_string(kind) + " b=" + std::to_string(b));
    }
  }
  return rep;
}

}  // namespace ect
