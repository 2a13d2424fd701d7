#pragma once

// m-elimination (error-correcting) tournaments: m first-phase
// single-elimination tournaments over k labels followed by a charged final
// elimination over their winners, plus adversarial comparators.

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ect/core.hpp"
#include "ect/rng.hpp"

namespace ect {

// complete: every first-phase tournament is a full bracket over all k labels.
// pool: losers drop to the next loss-count pool and leave after m losses.
enum class Semantics { Complete, Pool };

std::string to_string(Semantics s);
Semantics parse_semantics(const std::string& name);

inline constexpr Label kNoLabel = -1;

// Final elimination over m first-phase winners. Subtree charge = leaf count.
class ChargedFinalTree {
 public:
  explicit ChargedFinalTree(int m);

  int slots() const { return m_; }
  bool passthrough() const { return m_ == 1; }
  // Only valid when !passthrough().
  const LabelTree& tree() const { return *tree_; }

  int charge(NodeRef ref) const;
  int child_charge(int node, Side side) const;
  // Importance of advancing the candidate that arrives from `from`: the
  // charge of the opposite subtree. Identical candidates cost nothing.
  int advance_weight(int node, Side from) const;

  // Worst-case sum of importances along a leaf-to-root path. Per node this
  // is max(c_A, c_B) games, or c_A + c_B - 1 when weights are played out as
  // repeated first-to-target games.
  int importance_depth(bool repeated = false) const;

 private:
  int m_;
  std::optional<LabelTree> tree_;
};

struct TournamentConfig {
  int k = 2;
  int m = 1;
  Semantics semantics = Semantics::Complete;
  // Final-phase importance played as repeated unit-weight games.
  bool repeated = false;

  void validate() const;
};

// First-phase tournaments are 0..m-1; the final phase uses index m.
struct Match {
  int round = 0;  // 1-based
  int tournament = 0;
  int node = -1;  // tree node for tournament 0 and the final phase
  Label a = kNoLabel;
  Label b = kNoLabel;
  double weight_a = 1.0;  // importance charged when a wins against the truth
  double weight_b = 1.0;
};

struct MatchRecord {
  Match match;
  Label winner = kNoLabel;
  double weight = 0.0;  // importance of the realised outcome
  bool contradicted = false;
};

// Round-by-round execution. Pairings for a round are fixed when the round
// opens; callers read pending() and answer with resolve().
class TournamentRun {
 public:
  explicit TournamentRun(const TournamentConfig& cfg);

  const TournamentConfig& config() const { return cfg_; }
  bool finished() const { return done_; }
  int round() const { return round_; }
  const std::vector<Match>& pending() const { return pending_; }
  // a_wins[i] answers pending()[i].
  void resolve(std::span<const char> a_wins);

  Label winner() const { return winner_; }
  int first_phase_rounds() const { return first_phase_rounds_; }
  const std::vector<Label>& first_phase_winners() const { return phase1_winners_; }
  const std::vector<int>& losses() const { return losses_; }
  // Labels per first-phase tournament before round 1 and after each round
  // of the first phase.
  const std::vector<std::vector<int>>& occupancy() const { return occupancy_; }
  const ChargedFinalTree& final_tree() const { return final_; }

 private:
  void open_round();
  void open_first_phase_round();
  void open_final_round();
  void settle_final();
  void record_occupancy();
  Label bracket0_slot(NodeRef ref) const;

  TournamentConfig cfg_;
  LabelTree tree0_;
  ChargedFinalTree final_;
  int round_ = 0;
  bool done_ = false;
  bool first_phase_done_ = false;
  int first_phase_rounds_ = 0;
  Label winner_ = kNoLabel;

  std::vector<int> available_;  // first round a label may play
  std::vector<int> losses_;
  std::vector<std::vector<Label>> alive_;  // per first-phase tournament, sorted
  std::vector<int> entered_;
  std::vector<char> finished_;
  std::vector<Label> phase1_winners_;
  std::vector<Label> tree0_win_;  // winner per bracket-0 node
  std::vector<std::vector<int>> occupancy_;

  // Final phase state per final-tree node.
  std::vector<Label> final_win_;
  std::vector<char> final_done_;
  std::vector<int> games_a_, games_b_;

  std::vector<Match> pending_;
};

// Everything a complete run produced.
struct TournamentSchedule {
  TournamentConfig config;
  std::vector<std::vector<MatchRecord>> rounds;
  int first_phase_rounds = 0;
  std::vector<int> losses;
  std::vector<Label> winners;  // first-phase winners, kNoLabel when a pool ended empty
  std::vector<std::vector<int>> occupancy;
};

struct LegalityReport {
  bool ok = true;
  std::size_t double_plays = 0;
  std::size_t loss_violations = 0;
  std::size_t bracket_violations = 0;
  std::string detail;
};

LegalityReport check_schedule(const TournamentSchedule& s);

enum class AdversaryKind { None, BudgetFullLie, BudgetHalfLie, RateRandom, Parity, Staged };

std::string to_string(AdversaryKind kind);
AdversaryKind parse_adversary_kind(const std::string& name);

struct AdversarySpec {
  AdversaryKind kind = AdversaryKind::None;
  double budget = 0.0;  // weighted budget for the budget models; declared cap for others when finite
  double rate = 0.0;    // rate_random flip probability
  std::uint64_t seed = 1;
  Label i = 0, j = 1;   // parity pair
  int q = 0;            // staged: planned rounds (0 = measured from a truthful run)
  // Restrict lies to these tournaments (empty = all). The final phase is index m.
  std::vector<int> tournaments;
};

// Stateful comparator that answers matches given the true skills.
class Adversary {
 public:
  Adversary(const AdversarySpec& spec, std::span<const double> skill);

  bool decide(const Match& match);
  void observe(const Match& match, bool a_wins);

  double spent() const { return spent_; }

 private:
  bool truthful(const Match& match) const;
  bool lie_allowed(const Match& match) const;
  double cost_of(const Match& match, bool a_wins) const;

  AdversarySpec spec_;
  std::vector<double> skill_;
  Label best_;
  double spent_ = 0.0;
  Rng rng_;
  int ij_count_ = 0;
  std::vector<int> losses_;
  Label staged_target_ = kNoLabel;
  double stage1_rounds_ = 0.0;
};

// Lower index wins ties in skill.
Label true_best(std::span<const double> skill);
bool truth_a_wins(std::span<const double> skill, Label a, Label b);

struct TournamentResult {
  Label winner = kNoLabel;
  std::vector<MatchRecord> transcript;
  double weighted_error = 0.0;
  std::size_t contradictions = 0;
  int rounds = 0;
  int first_phase_rounds = 0;
  int importance_depth = 0;  // measured first phase + final-tree worst case
  TournamentSchedule schedule;
};

// Throws HarnessFault when a budgeted adversary overspends.
TournamentResult run_tournament(const TournamentConfig& cfg, std::span<const double> skill, const AdversarySpec& adv);

// Truthful run with skill decreasing in label index.
TournamentSchedule build_schedule(int k, int m, Semantics semantics);

// One JSON object per line: round, tournament, phase, node, a, b, weight,
// winner, contradicted.
void write_transcript(const std::vector<MatchRecord>& transcript, int m, std::ostream& out);

struct DethroningOptions {
  Label best = 0;
  std::uint64_t node_cap = std::uint64_t{1} << 24;
  int jobs = 1;
  // Past the cap: refuse (false) or fall back to random search (true).
  bool stochastic_fallback = false;
  int stochastic_trials = 20000;
  std::uint64_t seed = 1;
};

struct DethroningResult {
  double cost = std::numeric_limits<double>::infinity();
  bool exact = true;  // false: stochastic upper bound
  Label winner = kNoLabel;
  std::vector<char> witness;  // a_wins per match in play order
  std::uint64_t nodes = 0;
};

// Minimum total importance of contradicted matches over all outcome
// assignments that make a label other than `best` win. Skills are 1 for
// `best` and 0 elsewhere, so only matches against the best label cost.
// Throws ResourceRefusal past the node cap unless the fallback is enabled.
DethroningResult min_dethroning_cost(const TournamentConfig& cfg, const DethroningOptions& opts = {});

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

struct ParityRun {
  Label i = 0, j = 1;
  Label winner = kNoLabel;
  int depth = 0;                  // measured importance depth
  double multiclass_regret = 0.0;  // under the worst candidate distribution
  double adversary_regret = 0.0;
  double ratio = 0.0;             // kUnbounded when the adversary pays nothing
  std::size_t ij_comparisons = 0;
};

// Parity strategy on pair (i, j); with no pair, every pair is tried and the
// largest ratio is returned. Candidate distributions: one-hot on any label,
// or uniform on {i, j}. Ratio = depth * multiclass regret / adversary regret.
ParityRun parity_adversary_run(const TournamentConfig& cfg, std::optional<std::pair<Label, Label>> pair = std::nullopt);

}  // namespace ect
