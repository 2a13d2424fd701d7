#include "ect/tournaments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>

#include "json.hpp"

namespace ect {

std::string to_string(Semantics s) { return s == Semantics::Complete ? "complete" : "pool"; }

Semantics parse_semantics(const std::string& name) {
  if (name == "complete") return Semantics::Complete;
  if (name == "pool") return Semantics::Pool;
  throw InvalidArgument("unknown semantics: " + name);
}

ChargedFinalTree::ChargedFinalTree(int m) : m_(m) {
  if (m < 1) throw InvalidArgument("final tree needs m >= 1");
  if (m >= 2) tree_.emplace(LabelTree::balanced(m));
}

int ChargedFinalTree::charge(NodeRef ref) const {
  if (ref.leaf) return 1;
  return static_cast<int>(tree_->leafset(ref.index).size());
}

int ChargedFinalTree::child_charge(int node, Side side) const {
  const auto& n = tree_->node(node);
  return charge(side == Side::Left ? n.left : n.right);
}

int ChargedFinalTree::advance_weight(int node, Side from) const { return child_charge(node, opposite(from)); }

int ChargedFinalTree::importance_depth(bool repeated) const {
  if (passthrough()) return 0;
  std::vector<int> depth(static_cast<std::size_t>(tree_->num_internal()), 0);
  auto below = [&](NodeRef ref) { return ref.leaf ? 0 : depth[static_cast<std::size_t>(ref.index)]; };
  for (int n = 0; n < tree_->num_internal(); ++n) {
    const int ca = child_charge(n, Side::Left);
    const int cb = child_charge(n, Side::Right);
    const int games = repeated ? ca + cb - 1 : std::max(ca, cb);
    depth[static_cast<std::size_t>(n)] = std::max(below(tree_->node(n).left), below(tree_->node(n).right)) + games;
  }
  return depth.back();
}

void TournamentConfig::validate() const {
  if (k < 2) throw InvalidArgument("tournament needs k >= 2");
  if (m < 1) throw InvalidArgument("tournament needs m >= 1");
}

namespace {

void insert_sorted(std::vector<Label>& v, Label y) { v.insert(std::lower_bound(v.begin(), v.end(), y), y); }

void erase_sorted(std::vector<Label>& v, Label y) {
  const auto it = std::lower_bound(v.begin(), v.end(), y);
  if (it == v.end() || *it != y) throw HarnessFault("label missing from its tournament");
  v.erase(it);
}

const TournamentConfig& validated(const TournamentConfig& cfg) {
  cfg.validate();
  return cfg;
}

}  // namespace

TournamentRun::TournamentRun(const TournamentConfig& cfg)
    : cfg_(validated(cfg)), tree0_(LabelTree::balanced(cfg.k)), final_(cfg.m) {
  const auto k = static_cast<std::size_t>(cfg_.k);
  const auto m = static_cast<std::size_t>(cfg_.m);
  available_.assign(k, 1);
  losses_.assign(k, 0);
  alive_.assign(m, {});
  for (Label y = 0; y < cfg_.k; ++y) alive_[0].push_back(y);
  entered_.assign(m, 0);
  entered_[0] = cfg_.k;
  finished_.assign(m, 0);
  phase1_winners_.assign(m, kNoLabel);
  tree0_win_.assign(k - 1, kNoLabel);
  if (!final_.passthrough()) {
    const auto nodes = static_cast<std::size_t>(final_.tree().num_internal());
    final_win_.assign(nodes, kNoLabel);
    final_done_.assign(nodes, 0);
    games_a_.assign(nodes, 0);
    games_b_.assign(nodes, 0);
  }
  record_occupancy();
  open_round();
}

Label TournamentRun::bracket0_slot(NodeRef ref) const {
  return ref.leaf ? ref.index : tree0_win_[static_cast<std::size_t>(ref.index)];
}

void TournamentRun::record_occupancy() {
  std::vector<int> row;
  for (const auto& pool : alive_) row.push_back(static_cast<int>(pool.size()));
  occupancy_.push_back(std::move(row));
}

void TournamentRun::open_round() {
  pending_.clear();
  if (!first_phase_done_) {
    open_first_phase_round();
    if (!pending_.empty()) return;
    if (!std::all_of(finished_.begin(), finished_.end(), [](char f) { return f != 0; }))
      throw HarnessFault("first phase stalled with unfinished tournaments");
    first_phase_done_ = true;
    first_phase_rounds_ = round_;
  }
  open_final_round();
}

void TournamentRun::open_first_phase_round() {
  const int r = round_ + 1;
  std::vector<char> busy(static_cast<std::size_t>(cfg_.k), 0);
  auto ready = [&](Label y) { return available_[static_cast<std::size_t>(y)] <= r && !busy[static_cast<std::size_t>(y)]; };
  auto add = [&](int t, int node, Label a, Label b) {
    pending_.push_back({r, t, node, a, b, 1.0, 1.0});
    busy[static_cast<std::size_t>(a)] = busy[static_cast<std::size_t>(b)] = 1;
  };
  if (!finished_[0]) {
    for (int n = 0; n < tree0_.num_internal(); ++n) {
      if (tree0_win_[static_cast<std::size_t>(n)] != kNoLabel) continue;
      const Label a = bracket0_slot(tree0_.node(n).left);
      const Label b = bracket0_slot(tree0_.node(n).right);
      if (a == kNoLabel || b == kNoLabel || !ready(a) || !ready(b)) continue;
      add(0, n, a, b);
    }
  }
  for (int t = 1; t < cfg_.m; ++t) {
    if (finished_[static_cast<std::size_t>(t)]) continue;
    std::vector<Label> waiting;
    for (Label y : alive_[static_cast<std::size_t>(t)])
      if (ready(y)) waiting.push_back(y);
    // Odd count: the lowest index sits out.
    const std::size_t start = waiting.size() % 2;
    for (std::size_t i = start; i + 1 < waiting.size(); i += 2) add(t, -1, waiting[i], waiting[i + 1]);
  }
}

void TournamentRun::settle_final() {
  if (final_.passthrough()) return;
  const LabelTree& ft = final_.tree();
  auto slot = [&](NodeRef ref, bool& known) {
    if (ref.leaf) {
      known = true;
      return phase1_winners_[static_cast<std::size_t>(ref.index)];
    }
    known = final_done_[static_cast<std::size_t>(ref.index)] != 0;
    return final_win_[static_cast<std::size_t>(ref.index)];
  };
  for (int n = 0; n < ft.num_internal(); ++n) {
    if (final_done_[static_cast<std::size_t>(n)]) continue;
    bool ka = false, kb = false;
    const Label a = slot(ft.node(n).left, ka);
    const Label b = slot(ft.node(n).right, kb);
    if (!ka || !kb) continue;
    // Absent or identical candidates pass through without a game.
    if (a == kNoLabel || b == kNoLabel || a == b) {
      final_win_[static_cast<std::size_t>(n)] = a == kNoLabel ? b : a;
      final_done_[static_cast<std::size_t>(n)] = 1;
    }
  }
}

void TournamentRun::open_final_round() {
  if (final_.passthrough()) {
    done_ = true;
    winner_ = phase1_winners_[0];
    return;
  }
  settle_final();
  const LabelTree& ft = final_.tree();
  const int r = round_ + 1;
  // A label that won several first-phase tournaments fills several slots;
  // it still plays at most one final match per round.
  std::vector<char> busy(static_cast<std::size_t>(cfg_.k), 0);
  for (int n = 0; n < ft.num_internal(); ++n) {
    if (final_done_[static_cast<std::size_t>(n)]) continue;
    const auto& node = ft.node(n);
    const bool ka = node.left.leaf || final_done_[static_cast<std::size_t>(node.left.index)];
    const bool kb = node.right.leaf || final_done_[static_cast<std::size_t>(node.right.index)];
    if (!ka || !kb) continue;
    const Label a = node.left.leaf ? phase1_winners_[static_cast<std::size_t>(node.left.index)]
                                   : final_win_[static_cast<std::size_t>(node.left.index)];
    const Label b = node.right.leaf ? phase1_winners_[static_cast<std::size_t>(node.right.index)]
                                    : final_win_[static_cast<std::size_t>(node.right.index)];
    if (busy[static_cast<std::size_t>(a)] || busy[static_cast<std::size_t>(b)]) continue;
    busy[static_cast<std::size_t>(a)] = busy[static_cast<std::size_t>(b)] = 1;
    if (cfg_.repeated) {
      pending_.push_back({r, cfg_.m, n, a, b, 1.0, 1.0});
    } else {
      pending_.push_back({r, cfg_.m, n, a, b, static_cast<double>(final_.advance_weight(n, Side::Left)),
                          static_cast<double>(final_.advance_weight(n, Side::Right))});
    }
  }
  if (pending_.empty()) {
    done_ = true;
    winner_ = final_win_[static_cast<std::size_t>(ft.root())];
  }
}

void TournamentRun::resolve(std::span<const char> a_wins) {
  if (done_) throw HarnessFault("tournament already finished");
  if (a_wins.size() != pending_.size()) throw InvalidArgument("one outcome per pending match is required");
  const int r = round_ + 1;
  for (std::size_t i = 0; i < pending_.size(); ++i) {
    const Match& mt = pending_[i];
    const Label winner = a_wins[i] ? mt.a : mt.b;
    const Label loser = a_wins[i] ? mt.b : mt.a;
    if (mt.tournament < cfg_.m) {
      const auto t = static_cast<std::size_t>(mt.tournament);
      available_[static_cast<std::size_t>(winner)] = r + 1;
      if (mt.tournament == 0) tree0_win_[static_cast<std::size_t>(mt.node)] = winner;
      erase_sorted(alive_[t], loser);
      ++losses_[static_cast<std::size_t>(loser)];
      if (t + 1 < alive_.size()) {
        insert_sorted(alive_[t + 1], loser);
        ++entered_[t + 1];
        available_[static_cast<std::size_t>(loser)] = r + 1;
      }
    } else {
      const auto n = static_cast<std::size_t>(mt.node);
      if (!cfg_.repeated) {
        final_win_[n] = winner;
        final_done_[n] = 1;
      } else {
        // a needs c_B game wins to advance, b needs c_A.
        (a_wins[i] ? games_a_[n] : games_b_[n]) += 1;
        if (games_a_[n] >= final_.child_charge(mt.node, Side::Right)) {
          final_win_[n] = mt.a;
          final_done_[n] = 1;
        } else if (games_b_[n] >= final_.child_charge(mt.node, Side::Left)) {
          final_win_[n] = mt.b;
          final_done_[n] = 1;
        }
      }
    }
  }

  if (!first_phase_done_) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t t = 0; t < finished_.size(); ++t) {
        if (finished_[t]) continue;
        bool done = false;
        if (cfg_.semantics == Semantics::Complete) {
          done = entered_[t] == cfg_.k && alive_[t].size() == 1;
        } else {
          const bool lower_done = std::all_of(finished_.begin(), finished_.begin() + static_cast<std::ptrdiff_t>(t),
                                              [](char f) { return f != 0; });
          done = lower_done && alive_[t].size() <= 1;
        }
        if (!done) continue;
        finished_[t] = 1;
        changed = true;
        phase1_winners_[t] = alive_[t].empty() ? kNoLabel : alive_[t].front();
        if (cfg_.semantics == Semantics::Complete && t + 1 < alive_.size()) {
          const Label w = phase1_winners_[t];
          insert_sorted(alive_[t + 1], w);
          ++entered_[t + 1];
          available_[static_cast<std::size_t>(w)] = std::max(available_[static_cast<std::size_t>(w)], r + 1);
        }
      }
    }
  }
  round_ = r;
  if (!first_phase_done_) record_occupancy();
  open_round();
}

LegalityReport check_schedule(const TournamentSchedule& s) {
  LegalityReport rep;
  const int k = s.config.k, m = s.config.m;
  std::vector<int> losses(static_cast<std::size_t>(k), 0);
  std::vector<std::vector<int>> plays(static_cast<std::size_t>(m), std::vector<int>(static_cast<std::size_t>(k), 0));
  std::vector<int> matches_per_t(static_cast<std::size_t>(m), 0);
  for (const auto& round : s.rounds) {
    std::vector<char> seen(static_cast<std::size_t>(k), 0);
    for (const MatchRecord& rec : round) {
      const Match& mt = rec.match;
      for (Label y : {mt.a, mt.b}) {
        if (seen[static_cast<std::size_t>(y)]) {
          ++rep.double_plays;
          rep.detail += "label " + std::to_string(y) + " plays twice in round " + std::to_string(mt.round) + "; ";
        }
        seen[static_cast<std::size_t>(y)] = 1;
      }
      if (mt.tournament >= m) continue;
      ++matches_per_t[static_cast<std::size_t>(mt.tournament)];
      for (Label y : {mt.a, mt.b}) {
        ++plays[static_cast<std::size_t>(mt.tournament)][static_cast<std::size_t>(y)];
        if (s.config.semantics == Semantics::Pool && losses[static_cast<std::size_t>(y)] >= m) {
          ++rep.loss_violations;
          rep.detail += "label " + std::to_string(y) + " plays after " + std::to_string(m) + " losses; ";
        }
      }
    }
    for (const MatchRecord& rec : round)
      if (rec.match.tournament < m) ++losses[static_cast<std::size_t>(rec.winner == rec.match.a ? rec.match.b : rec.match.a)];
  }
  if (losses != s.losses) {
    ++rep.loss_violations;
    rep.detail += "loss ledger disagrees with the match record; ";
  }
  if (s.config.semantics == Semantics::Pool) {
    for (Label y = 0; y < k; ++y) {
      const int l = losses[static_cast<std::size_t>(y)];
      const bool is_winner = std::find(s.winners.begin(), s.winners.end(), y) != s.winners.end();
      if (l > m || (!is_winner && l != m)) {
        ++rep.loss_violations;
        rep.detail += "label " + std::to_string(y) + " ends with " + std::to_string(l) + " losses; ";
      }
    }
  } else {
    for (int t = 0; t < m; ++t) {
      if (matches_per_t[static_cast<std::size_t>(t)] != k - 1) ++rep.bracket_violations;
      for (Label y = 0; y < k; ++y)
        if (plays[static_cast<std::size_t>(t)][static_cast<std::size_t>(y)] == 0) ++rep.bracket_violations;
    }
    if (rep.bracket_violations) rep.detail += "incomplete bracket; ";
  }
  rep.ok = rep.double_plays == 0 && rep.loss_violations == 0 && rep.bracket_violations == 0;
  return rep;
}

std::string to_string(AdversaryKind kind) {
  switch (kind) {
    case AdversaryKind::None: return "none";
    case AdversaryKind::BudgetFullLie: return "budget_full_lie";
    case AdversaryKind::BudgetHalfLie: return "budget_half_lie";
    case AdversaryKind::RateRandom: return "rate_random";
    case AdversaryKind::Parity: return "parity";
    case AdversaryKind::Staged: return "staged";
  }
  return "?";
}

AdversaryKind parse_adversary_kind(const std::string& name) {
  for (auto k : {AdversaryKind::None, AdversaryKind::BudgetFullLie, AdversaryKind::BudgetHalfLie,
                 AdversaryKind::RateRandom, AdversaryKind::Parity, AdversaryKind::Staged})
    if (to_string(k) == name) return k;
  throw InvalidArgument("unknown adversary: " + name);
}

Label true_best(std::span<const double> skill) {
  return static_cast<Label>(std::max_element(skill.begin(), skill.end()) - skill.begin());
}

bool truth_a_wins(std::span<const double> skill, Label a, Label b) {
  const double sa = skill[static_cast<std::size_t>(a)], sb = skill[static_cast<std::size_t>(b)];
  return sa > sb || (sa == sb && a < b);
}

namespace {

bool contradicts(std::span<const double> skill, Label winner, Label loser) {
  return skill[static_cast<std::size_t>(winner)] < skill[static_cast<std::size_t>(loser)];
}

}  // namespace

Adversary::Adversary(const AdversarySpec& spec, std::span<const double> skill)
    : spec_(spec), skill_(skill.begin(), skill.end()), best_(true_best(skill)), rng_(spec.seed) {
  if (spec.budget < 0.0) throw InvalidArgument("adversary budget must be >= 0");
  if (spec.kind == AdversaryKind::RateRandom && !(spec.rate >= 0.0 && spec.rate <= 1.0))
    throw InvalidArgument("adversary rate must lie in [0, 1]");
  const int k = static_cast<int>(skill_.size());
  if (spec.kind == AdversaryKind::Parity &&
      (spec.i == spec.j || spec.i < 0 || spec.j < 0 || spec.i >= k || spec.j >= k))
    throw InvalidArgument("parity adversary needs two distinct labels");
  losses_.assign(skill_.size(), 0);
  if (spec.kind == AdversaryKind::Staged) {
    // r = qk / (3k - 2); the first stage lasts 2(k-1)r/k rounds.
    const double r = static_cast<double>(spec.q) * k / (3.0 * k - 2.0);
    stage1_rounds_ = 2.0 * (k - 1) * r / k;
  }
}

bool Adversary::truthful(const Match& mt) const { return truth_a_wins(skill_, mt.a, mt.b); }

bool Adversary::lie_allowed(const Match& mt) const {
  return spec_.tournaments.empty() ||
         std::find(spec_.tournaments.begin(), spec_.tournaments.end(), mt.tournament) != spec_.tournaments.end();
}

double Adversary::cost_of(const Match& mt, bool a_wins) const {
  const Label w = a_wins ? mt.a : mt.b, l = a_wins ? mt.b : mt.a;
  return contradicts(skill_, w, l) ? (a_wins ? mt.weight_a : mt.weight_b) : 0.0;
}

bool Adversary::decide(const Match& mt) {
  const bool truth = truthful(mt);
  switch (spec_.kind) {
    case AdversaryKind::None:
      return truth;
    case AdversaryKind::BudgetFullLie:
    case AdversaryKind::BudgetHalfLie: {
      const bool involves_best = mt.a == best_ || mt.b == best_;
      const bool best_would_win = (truth ? mt.a : mt.b) == best_;
      if (!involves_best || !best_would_win || !lie_allowed(mt)) return truth;
      // A half liar can only withhold its verdict, which defaults to slot a.
      if (spec_.kind == AdversaryKind::BudgetHalfLie && mt.b != best_) return truth;
      const double cost = cost_of(mt, !truth);
      if (spent_ + cost > spec_.budget + 1e-12) return truth;
      spent_ += cost;
      return !truth;
    }
    case AdversaryKind::RateRandom: {
      const bool flip = rng_.bernoulli(spec_.rate);
      if (!flip || !lie_allowed(mt)) return truth;
      spent_ += cost_of(mt, !truth);
      return !truth;
    }
    case AdversaryKind::Parity: {
      const bool has_i = mt.a == spec_.i || mt.b == spec_.i;
      const bool has_j = mt.a == spec_.j || mt.b == spec_.j;
      if (has_i && has_j) {
        ++ij_count_;
        const Label w = ij_count_ % 2 == 1 ? spec_.i : spec_.j;
        return mt.a == w;
      }
      if (has_i) return mt.a == spec_.i;
      if (has_j) return mt.a == spec_.j;
      return truth;
    }
    case AdversaryKind::Staged: {
      Label favored = 0;
      if (mt.round > stage1_rounds_) {
        if (staged_target_ == kNoLabel) {
          staged_target_ = 1;
          for (Label y = 1; y < static_cast<Label>(losses_.size()); ++y)
            if (losses_[static_cast<std::size_t>(y)] < losses_[static_cast<std::size_t>(staged_target_)]) staged_target_ = y;
        }
        favored = staged_target_;
      }
      if (mt.a == favored) return true;
      if (mt.b == favored) return false;
      return mt.a < mt.b;
    }
  }
  return truth;
}

void Adversary::observe(const Match& mt, bool a_wins) { ++losses_[static_cast<std::size_t>(a_wins ? mt.b : mt.a)]; }

namespace {

TournamentResult run_with(const TournamentConfig& cfg, std::span<const double> skill,
                          const std::function<bool(const Match&)>& decide,
                          const std::function<void(const Match&, bool)>& observe) {
  if (static_cast<int>(skill.size()) != cfg.k) throw InvalidArgument("skill vector must have k entries");
  TournamentRun run(cfg);
  TournamentResult res;
  res.schedule.config = cfg;
  std::vector<char> outcomes;
  while (!run.finished()) {
    const auto& ms = run.pending();
    outcomes.assign(ms.size(), 0);
    for (std::size_t i = 0; i < ms.size(); ++i) {
      const bool a_wins = decide(ms[i]);
      if (observe) observe(ms[i], a_wins);
      outcomes[i] = a_wins;
      MatchRecord rec{ms[i], a_wins ? ms[i].a : ms[i].b, a_wins ? ms[i].weight_a : ms[i].weight_b, false};
      rec.contradicted = contradicts(skill, rec.winner, a_wins ? ms[i].b : ms[i].a);
      if (rec.contradicted) {
        res.weighted_error += rec.weight;
        ++res.contradictions;
      }
      res.transcript.push_back(rec);
    }
    res.schedule.rounds.emplace_back(res.transcript.end() - static_cast<std::ptrdiff_t>(ms.size()), res.transcript.end());
    run.resolve(outcomes);
  }
  res.winner = run.winner();
  res.rounds = run.round();
  res.first_phase_rounds = run.first_phase_rounds();
  res.importance_depth = run.first_phase_rounds() + run.final_tree().importance_depth(cfg.repeated);
  res.schedule.first_phase_rounds = run.first_phase_rounds();
  res.schedule.losses = run.losses();
  res.schedule.winners = run.first_phase_winners();
  res.schedule.occupancy = run.occupancy();
  return res;
}

}  // namespace

TournamentResult run_tournament(const TournamentConfig& cfg, std::span<const double> skill, const AdversarySpec& adv) {
  cfg.validate();
  if (static_cast<int>(skill.size()) != cfg.k) throw InvalidArgument("skill vector must have k entries");
  AdversarySpec spec = adv;
  if (spec.kind == AdversaryKind::Staged && spec.q == 0) {
    const std::vector<double> s(skill.begin(), skill.end());
    spec.q = run_tournament(cfg, s, {}).rounds;
  }
  Adversary adversary(spec, skill);
  TournamentResult res = run_with(
      cfg, skill, [&](const Match& mt) { return adversary.decide(mt); },
      [&](const Match& mt, bool a_wins) { adversary.observe(mt, a_wins); });
  const bool budgeted = spec.kind == AdversaryKind::BudgetFullLie || spec.kind == AdversaryKind::BudgetHalfLie ||
                        spec.budget > 0.0;
  if (budgeted && res.weighted_error > spec.budget + 1e-9)
    throw HarnessFault("adversary spent " + std::to_string(res.weighted_error) + " against a declared budget of " +
                       std::to_string(spec.budget));
  return res;
}

TournamentSchedule build_schedule(int k, int m, Semantics semantics) {
  TournamentConfig cfg{k, m, semantics, false};
  cfg.validate();
  std::vector<double> skill(static_cast<std::size_t>(k));
  for (Label y = 0; y < k; ++y) skill[static_cast<std::size_t>(y)] = -static_cast<double>(y);
  return run_tournament(cfg, skill, {}).schedule;
}

void write_transcript(const std::vector<MatchRecord>& transcript, int m, std::ostream& out) {
  for (const auto& rec : transcript) {
    nlohmann::ordered_json j;
    j["round"] = rec.match.round;
    j["tournament"] = rec.match.tournament;
    j["phase"] = rec.match.tournament < m ? 1 : 2;
    j["node"] = rec.match.node;
    j["a"] = rec.match.a;
    j["b"] = rec.match.b;
    j["weight"] = rec.weight;
    j["winner"] = rec.winner;
    j["contradicted"] = rec.contradicted;
    out << j.dump() << '\n';
  }
}

ParityRun parity_adversary_run(const TournamentConfig& cfg, std::optional<std::pair<Label, Label>> pair) {
  cfg.validate();
  if (cfg.k < 3) throw InvalidArgument("parity adversary needs k >= 3");
  if (!pair) {
    ParityRun best;
    bool first = true;
    for (Label i = 0; i < cfg.k; ++i)
      for (Label j = i + 1; j < cfg.k; ++j) {
        ParityRun r = parity_adversary_run(cfg, std::pair{i, j});
        if (first || r.ratio > best.ratio) best = r;
        first = false;
      }
    return best;
  }
  std::vector<double> skill(static_cast<std::size_t>(cfg.k));
  for (Label y = 0; y < cfg.k; ++y) skill[static_cast<std::size_t>(y)] = -static_cast<double>(y);
  AdversarySpec spec;
  spec.kind = AdversaryKind::Parity;
  spec.i = pair->first;
  spec.j = pair->second;
  const TournamentResult res = run_tournament(cfg, skill, spec);

  ParityRun out;
  out.i = spec.i;
  out.j = spec.j;
  out.winner = res.winner;
  out.depth = res.importance_depth;
  for (const auto& rec : res.transcript) {
    const bool ij = (rec.match.a == spec.i && rec.match.b == spec.j) || (rec.match.a == spec.j && rec.match.b == spec.i);
    if (ij) ++out.ij_comparisons;
  }
  std::vector<std::vector<double>> candidates;
  for (Label y = 0; y < cfg.k; ++y) {
    std::vector<double> p(static_cast<std::size_t>(cfg.k), 0.0);
    p[static_cast<std::size_t>(y)] = 1.0;
    candidates.push_back(std::move(p));
  }
  {
    std::vector<double> p(static_cast<std::size_t>(cfg.k), 0.0);
    p[static_cast<std::size_t>(spec.i)] = p[static_cast<std::size_t>(spec.j)] = 0.5;
    candidates.push_back(std::move(p));
  }
  bool first = true;
  for (const auto& p : candidates) {
    const double top = *std::max_element(p.begin(), p.end());
    const double mc = top - p[static_cast<std::size_t>(res.winner)];
    double adv = 0.0;
    for (const auto& rec : res.transcript) {
      const Label loser = rec.winner == rec.match.a ? rec.match.b : rec.match.a;
      adv += rec.weight * std::max(0.0, p[static_cast<std::size_t>(loser)] - p[static_cast<std::size_t>(rec.winner)]);
    }
    double ratio = 0.0;
    if (mc > 0.0) ratio = adv > 0.0 ? out.depth * mc / adv : kUnbounded;
    if (first || ratio > out.ratio) {
      out.ratio = ratio;
      out.multiclass_regret = mc;
      out.adversary_regret = adv;
      first = false;
    }
  }
  return out;
}

}  // namespace ect
