#pragma once

// Merging two penalty datasets whose team names, player names and dates
// disagree. Names are matched by string similarity with a manual override
// file for the rest; games by team pair and a tolerant date rule; kicks by
// taker and time, then result, direction and foot.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gkpolicy/core.hpp"

namespace gkp::linkage {

inline constexpr double kAcceptThreshold = 0.8;

// Lower-cased, trimmed, inner whitespace collapsed to one space.
std::string normalize_name(const std::string& s);

// Ratcliff-Obershelp similarity 2M/T (recursive longest common substrings,
// earliest match on ties).
double ratcliff_obershelp(const std::string& a, const std::string& b);
std::size_t levenshtein(const std::string& a, const std::string& b);

// max(RO, 1 - lev / max length) on normalized names; throws on empty input.
double name_similarity(const std::string& a, const std::string& b);

enum class Source { A, B };
enum class EntityKind { team, player };

struct NamedEntity {
  Source source = Source::A;
  std::string raw_name;
  EntityKind kind = EntityKind::team;
};

struct MatchCandidate {
  NamedEntity left;
  NamedEntity right;
  double score = 0.0;
  bool auto_accepted = false;
};

struct UnresolvedEntity {
  NamedEntity entity;
  std::optional<MatchCandidate> best;
  std::optional<MatchCandidate> second;
};

struct EntityMapping {
  std::vector<MatchCandidate> accepted;  // auto and manual
  std::vector<UnresolvedEntity> unresolved;
  std::size_t n_auto = 0;
  std::size_t n_manual = 0;

  // Source-A name to source-B name.
  std::map<std::string, std::string> as_map() const;
};

// Auto-maps an A entity iff its best B score is > 0.8 and its second best
// is < 0.8. Two A entities auto-mapped to one B entity are both demoted.
EntityMapping map_entities(const std::vector<NamedEntity>& list_a, const std::vector<NamedEntity>& list_b);

struct Override {
  EntityKind kind = EntityKind::team;
  std::string source_name;
  std::string target_name;
};

std::vector<Override> read_overrides(const std::string& path);

// Applies manual mappings of the given kind; an override replaces any
// automatic mapping of the same source name.
void apply_overrides(EntityMapping& mapping, const std::vector<Override>& overrides, EntityKind kind);

struct GameRow {
  std::string game_id;
  std::string date;  // yyyy-mm-dd
  std::string home_team;
  std::string away_team;
};

std::vector<GameRow> read_games(const std::string& path);

// Equal, one day apart, or equal after swapping day and month of `a`.
bool dates_compatible(const std::string& a, const std::string& b);

struct GamePair {
  std::string game_a;
  std::string game_b;
};

struct GameMatching {
  std::vector<GamePair> pairs;
  std::vector<std::string> unmatched_a;
};

// Throws ValidationError when one game matches two or more games of the
// other source.
GameMatching map_games(const std::vector<GameRow>& games_a, const std::vector<GameRow>& games_b,
                       const std::map<std::string, std::string>& team_mapping);

struct KickPair {
  std::size_t a = 0;  // indices into the per-game kick lists
  std::size_t b = 0;
  bool by_tiebreak = false;
};

struct KickMatching {
  std::vector<KickPair> pairs;
  std::vector<std::size_t> unresolved_a;
};

// Kicks of one matched game. Candidates share the mapped taker and lie
// within `minute_tolerance`; several candidates are narrowed by result,
// then direction (when the A kick has one), then foot.
KickMatching map_penalties(const std::vector<PenaltyRecord>& pens_a, const std::vector<PenaltyRecord>& pens_b,
                           const std::map<std::string, std::string>& player_mapping, int minute_tolerance = 5);

struct StageCount {
  std::string stage;
  std::size_t auto_matched = 0;
  std::size_t manual = 0;
  std::size_t unresolved = 0;
  std::size_t total = 0;
};

struct MergeResult {
  std::vector<PenaltyRecord> records;
  std::vector<StageCount> report;
  std::vector<std::string> unresolved;  // human-readable lines
  std::vector<std::string> warnings;
};

struct MergeOptions {
  std::optional<std::string> overrides_path;
  int minute_tolerance = 5;
};

// Each directory holds games.csv (game_id, date, home_team, away_team) and
// penalties.csv in the record schema with match_id = game_id and taker_id
// carrying the player name. Matched kicks are merged cell by cell, nonempty
// A cells (annotations) winning over B; unmatched kicks are reported, not
// emitted.
MergeResult merge_directories(const std::string& dir_a, const std::string& dir_b, const MergeOptions& options = {});

}  // namespace gkp::linkage
