#include "gkpolicy/linkage.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <set>

#include <fmt/format.h>

#include "gkpolicy/csv.hpp"
#include "gkpolicy/error.hpp"
#include "gkpolicy/records_io.hpp"

namespace gkp::linkage {

namespace {

struct Block {
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t size = 0;
};

// Longest common substring of a[alo, ahi) and b[blo, bhi); ties resolve to
// the earliest start in a, then in b.
Block longest_match(const std::string& a, const std::string& b, std::size_t alo, std::size_t ahi, std::size_t blo,
                    std::size_t bhi) {
  Block best{alo, blo, 0};
  std::vector<std::size_t> prev(bhi - blo + 1, 0);
  std::vector<std::size_t> cur(bhi - blo + 1, 0);
  for (std::size_t i = alo; i < ahi; ++i) {
    std::fill(cur.begin(), cur.end(), 0);
    for (std::size_t j = blo; j < bhi; ++j) {
      if (a[i] != b[j]) continue;
      const std::size_t k = prev[j - blo] + 1;
      cur[j - blo + 1] = k;
      if (k > best.size) best = {i + 1 - k, j + 1 - k, k};
    }
    std::swap(prev, cur);
  }
  return best;
}

std::optional<std::chrono::year_month_day> parse_ymd(const std::string& s) {
  int y = 0;
  unsigned m = 0;
  unsigned d = 0;
  char tail = 0;
  if (std::sscanf(s.c_str(), "%d-%u-%u%c", &y, &m, &d, &tail) != 3) return std::nullopt;
  std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!ymd.ok()) return std::nullopt;
  return ymd;
}

std::string describe(const GameRow& g) {
  return fmt::format("{} {} vs {} ({})", g.game_id, g.home_team, g.away_team, g.date);
}

std::vector<NamedEntity> entities(const std::set<std::string>& names, Source source, EntityKind kind) {
  std::vector<NamedEntity> out;
  for (const auto& n : names) out.push_back({source, n, kind});
  return out;
}

EntityKind parse_kind(const std::string& s) {
  const std::string k = normalize_name(s);
  if (k == "team") return EntityKind::team;
  if (k == "player") return EntityKind::player;
  throw ValidationError(fmt::format("override kind must be team or player, got '{}'", s), {{"kind", s}});
}

void add_counts(StageCount& total, const EntityMapping& m) {
  total.manual += m.n_manual;
  total.auto_matched += m.n_auto;
  total.unresolved += m.unresolved.size();
  total.total += m.n_auto + m.n_manual + m.unresolved.size();
}

}  // namespace

std::string normalize_name(const std::string& s) {
  std::string out;
  bool pending_space = false;
  for (unsigned char c : s) {
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

double ratcliff_obershelp(const std::string& a, const std::string& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t matched = 0;
  std::vector<std::array<std::size_t, 4>> queue{{0, a.size(), 0, b.size()}};
  while (!queue.empty()) {
    const auto [alo, ahi, blo, bhi] = queue.back();
    queue.pop_back();
    const Block m = longest_match(a, b, alo, ahi, blo, bhi);
    if (m.size == 0) continue;
    matched += m.size;
    if (alo < m.i && blo < m.j) queue.push_back({alo, m.i, blo, m.j});
    if (m.i + m.size < ahi && m.j + m.size < bhi) queue.push_back({m.i + m.size, ahi, m.j + m.size, bhi});
  }
  return 2.0 * static_cast<double>(matched) / static_cast<double>(a.size() + b.size());
}

std::size_t levenshtein(const std::string& a, const std::string& b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0U : 1U)});
      diag = up;
    }
  }
  return row[b.size()];
}

double name_similarity(const std::string& a, const std::string& b) {
  const std::string na = normalize_name(a);
  const std::string nb = normalize_name(b);
  if (na.empty() || nb.empty()) throw ValidationError("name_similarity needs two nonempty names");
  const double ro = ratcliff_obershelp(na, nb);
  const double len = static_cast<double>(std::max(na.size(), nb.size()));
  const double lev = std::max(0.0, 1.0 - static_cast<double>(levenshtein(na, nb)) / len);
  return std::max(ro, lev);
}

std::map<std::string, std::string> EntityMapping::as_map() const {
  std::map<std::string, std::string> out;
  for (const auto& c : accepted) out[c.left.raw_name] = c.right.raw_name;
  return out;
}

EntityMapping map_entities(const std::vector<NamedEntity>& list_a, const std::vector<NamedEntity>& list_b) {
  for (const auto* list : {&list_a, &list_b}) {
    for (const auto& e : *list) {
      if (normalize_name(e.raw_name).empty()) throw ValidationError("entity names must be nonempty");
    }
  }
  EntityMapping out;
  std::vector<MatchCandidate> autos;
  for (const auto& a : list_a) {
    UnresolvedEntity u{a, std::nullopt, std::nullopt};
    for (const auto& b : list_b) {
      const MatchCandidate c{a, b, name_similarity(a.raw_name, b.raw_name), false};
      if (!u.best || c.score > u.best->score) {
        u.second = u.best;
        u.best = c;
      } else if (!u.second || c.score > u.second->score) {
        u.second = c;
      }
    }
    const double second = u.second ? u.second->score : 0.0;
    if (u.best && u.best->score > kAcceptThreshold && second < kAcceptThreshold) {
      MatchCandidate c = *u.best;
      c.auto_accepted = true;
      autos.push_back(c);
    } else {
      out.unresolved.push_back(std::move(u));
    }
  }
  std::map<std::string, int> claims;
  for (const auto& c : autos) ++claims[c.right.raw_name];
  for (auto& c : autos) {
    if (claims[c.right.raw_name] > 1) {
      c.auto_accepted = false;
      out.unresolved.push_back({c.left, c, std::nullopt});
    } else {
      out.accepted.push_back(c);
      ++out.n_auto;
    }
  }
  return out;
}

std::vector<Override> read_overrides(const std::string& path) {
  const csv::Table t = csv::read_file(path);
  const std::size_t kind = t.require_column("kind");
  const std::size_t source = t.require_column("source_name");
  const std::size_t target = t.require_column("target_name");
  std::vector<Override> out;
  for (const auto& row : t.rows) out.push_back({parse_kind(row.at(kind)), row.at(source), row.at(target)});
  return out;
}

void apply_overrides(EntityMapping& mapping, const std::vector<Override>& overrides, EntityKind kind) {
  for (const auto& o : overrides) {
    if (o.kind != kind) continue;
    std::optional<NamedEntity> left;
    auto acc = std::find_if(mapping.accepted.begin(), mapping.accepted.end(),
                            [&](const MatchCandidate& c) { return c.left.raw_name == o.source_name; });
    if (acc != mapping.accepted.end()) {
      left = acc->left;
      if (acc->auto_accepted) --mapping.n_auto; else --mapping.n_manual;
      mapping.accepted.erase(acc);
    }
    auto un = std::find_if(mapping.unresolved.begin(), mapping.unresolved.end(),
                           [&](const UnresolvedEntity& u) { return u.entity.raw_name == o.source_name; });
    if (un != mapping.unresolved.end()) {
      left = un->entity;
      mapping.unresolved.erase(un);
    }
    if (!left) continue;
    const NamedEntity right{Source::B, o.target_name, kind};
    mapping.accepted.push_back({*left, right, name_similarity(o.source_name, o.target_name), false});
    ++mapping.n_manual;
  }
}

std::vector<GameRow> read_games(const std::string& path) {
  const csv::Table t = csv::read_file(path);
  const std::size_t id = t.require_column("game_id");
  const std::size_t date = t.require_column("date");
  const std::size_t home = t.require_column("home_team");
  const std::size_t away = t.require_column("away_team");
  std::vector<GameRow> out;
  for (const auto& row : t.rows) out.push_back({row.at(id), row.at(date), row.at(home), row.at(away)});
  return out;
}

bool dates_compatible(const std::string& a, const std::string& b) {
  const auto da = parse_ymd(a);
  const auto db = parse_ymd(b);
  if (!da || !db) throw ValidationError(fmt::format("dates must be yyyy-mm-dd: '{}' / '{}'", a, b));
  const auto days = (std::chrono::sys_days{*da} - std::chrono::sys_days{*db}).count();
  if (days >= -1 && days <= 1) return true;
  const std::chrono::year_month_day swapped{da->year(), std::chrono::month{static_cast<unsigned>(da->day())},
                                            std::chrono::day{static_cast<unsigned>(da->month())}};
  return swapped.ok() && swapped == *db;
}

GameMatching map_games(const std::vector<GameRow>& games_a, const std::vector<GameRow>& games_b,
                       const std::map<std::string, std::string>& team_mapping) {
  GameMatching out;
  std::map<std::string, std::vector<std::string>> claimed;
  for (const auto& ga : games_a) {
    const auto home = team_mapping.find(ga.home_team);
    const auto away = team_mapping.find(ga.away_team);
    if (home == team_mapping.end() || away == team_mapping.end()) {
      out.unmatched_a.push_back(ga.game_id);
      continue;
    }
    const std::set<std::string> pair{home->second, away->second};
    std::vector<const GameRow*> hits;
    for (const auto& gb : games_b) {
      if (std::set<std::string>{gb.home_team, gb.away_team} == pair && dates_compatible(ga.date, gb.date)) {
        hits.push_back(&gb);
      }
    }
    if (hits.empty()) {
      out.unmatched_a.push_back(ga.game_id);
      continue;
    }
    if (hits.size() > 1) {
      std::string list;
      for (const auto* h : hits) list += fmt::format("\n  {}", describe(*h));
      throw ValidationError(fmt::format("game {} matches several games:{}", describe(ga), list));
    }
    out.pairs.push_back({ga.game_id, hits.front()->game_id});
    claimed[hits.front()->game_id].push_back(ga.game_id);
  }
  for (const auto& [b, as] : claimed) {
    if (as.size() > 1) {
      throw ValidationError(fmt::format("game {} is matched by several games: {}", b, fmt::join(as, ", ")));
    }
  }
  return out;
}

KickMatching map_penalties(const std::vector<PenaltyRecord>& pens_a, const std::vector<PenaltyRecord>& pens_b,
                           const std::map<std::string, std::string>& player_mapping, int minute_tolerance) {
  if (minute_tolerance < 0) throw ValidationError("minute tolerance must be >= 0");
  std::vector<std::size_t> order(pens_a.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return chrono_key(pens_a[x]) < chrono_key(pens_a[y]); });

  KickMatching out;
  std::vector<bool> used(pens_b.size(), false);
  for (std::size_t ia : order) {
    const auto& a = pens_a[ia];
    const auto taker = player_mapping.find(a.taker_id);
    std::vector<std::size_t> cand;
    if (taker != player_mapping.end()) {
      for (std::size_t ib = 0; ib < pens_b.size(); ++ib) {
        const auto& b = pens_b[ib];
        if (!used[ib] && b.taker_id == taker->second && std::abs(a.minute - b.minute) <= minute_tolerance) {
          cand.push_back(ib);
        }
      }
    }
    bool tiebreak = false;
    const std::array<std::function<bool(const PenaltyRecord&)>, 3> rules{
        [&](const PenaltyRecord& b) { return b.outcome == a.outcome; },
        [&](const PenaltyRecord& b) { return !kick_direction(a) || kick_direction(b) == kick_direction(a); },
        [&](const PenaltyRecord& b) { return b.foot == a.foot; }};
    for (const auto& rule : rules) {
      if (cand.size() <= 1) break;
      tiebreak = true;
      std::vector<std::size_t> kept;
      for (std::size_t ib : cand) {
        if (rule(pens_b[ib])) kept.push_back(ib);
      }
      cand = std::move(kept);
    }
    if (cand.size() == 1) {
      used[cand.front()] = true;
      out.pairs.push_back({ia, cand.front(), tiebreak});
    } else {
      out.unresolved_a.push_back(ia);
    }
  }
  std::sort(out.pairs.begin(), out.pairs.end(), [](const KickPair& x, const KickPair& y) { return x.a < y.a; });
  std::sort(out.unresolved_a.begin(), out.unresolved_a.end());
  return out;
}

MergeResult merge_directories(const std::string& dir_a, const std::string& dir_b, const MergeOptions& options) {
  namespace fs = std::filesystem;
  for (const auto& dir : {dir_a, dir_b}) {
    for (const char* file : {"games.csv", "penalties.csv"}) {
      if (!fs::exists(fs::path(dir) / file)) {
        throw MissingArtifactError(fmt::format("{} not found in {}", file, dir));
      }
    }
  }
  MergeResult result;
  const auto games_a = read_games((fs::path(dir_a) / "games.csv").string());
  const auto games_b = read_games((fs::path(dir_b) / "games.csv").string());
  std::vector<Override> overrides;
  if (options.overrides_path) overrides = read_overrides(*options.overrides_path);

  std::set<std::string> teams_a, teams_b;
  for (const auto& g : games_a) teams_a.insert({g.home_team, g.away_team});
  for (const auto& g : games_b) teams_b.insert({g.home_team, g.away_team});
  EntityMapping teams = map_entities(entities(teams_a, Source::A, EntityKind::team),
                                     entities(teams_b, Source::B, EntityKind::team));
  apply_overrides(teams, overrides, EntityKind::team);
  StageCount team_stage{"teams"};
  add_counts(team_stage, teams);
  for (const auto& u : teams.unresolved) result.unresolved.push_back(fmt::format("team: {}", u.entity.raw_name));

  const GameMatching games = map_games(games_a, games_b, teams.as_map());
  StageCount game_stage{"games", games.pairs.size(), 0, games.unmatched_a.size(),
                        games.pairs.size() + games.unmatched_a.size()};
  for (const auto& g : games.unmatched_a) result.unresolved.push_back(fmt::format("game: {}", g));

  const csv::Table pen_a = csv::read_file((fs::path(dir_a) / "penalties.csv").string());
  const csv::Table pen_b = csv::read_file((fs::path(dir_b) / "penalties.csv").string());
  std::map<std::string, std::vector<std::size_t>> rows_a, rows_b;
  std::vector<PenaltyRecord> recs_a, recs_b;
  for (const auto* side : {&pen_a, &pen_b}) {
    auto& recs = side == &pen_a ? recs_a : recs_b;
    auto& rows = side == &pen_a ? rows_a : rows_b;
    for (const auto& row : side->rows) {
      recs.push_back(record_from_fields(*side, row, result.warnings));
      rows[recs.back().match_id].push_back(recs.size() - 1);
    }
  }

  StageCount player_stage{"players"};
  StageCount kick_stage{"penalties"};
  std::set<std::string> matched_games;
  auto pairs = games.pairs;
  std::sort(pairs.begin(), pairs.end(), [](const GamePair& x, const GamePair& y) { return x.game_a < y.game_a; });
  const auto& columns = record_columns();
  for (const auto& gp : pairs) {
    matched_games.insert(gp.game_a);
    std::vector<PenaltyRecord> ka, kb;
    for (std::size_t i : rows_a[gp.game_a]) ka.push_back(recs_a[i]);
    for (std::size_t i : rows_b[gp.game_b]) kb.push_back(recs_b[i]);
    std::set<std::string> players_a, players_b;
    for (const auto& k : ka) players_a.insert(k.taker_id);
    for (const auto& k : kb) players_b.insert(k.taker_id);
    EntityMapping players = map_entities(entities(players_a, Source::A, EntityKind::player),
                                         entities(players_b, Source::B, EntityKind::player));
    apply_overrides(players, overrides, EntityKind::player);
    add_counts(player_stage, players);
    for (const auto& u : players.unresolved) {
      result.unresolved.push_back(fmt::format("player: {} in game {}", u.entity.raw_name, gp.game_a));
    }

    const KickMatching kicks = map_penalties(ka, kb, players.as_map(), options.minute_tolerance);
    kick_stage.auto_matched += kicks.pairs.size();
    kick_stage.unresolved += kicks.unresolved_a.size();
    kick_stage.total += ka.size();
    for (std::size_t i : kicks.unresolved_a) {
      result.unresolved.push_back(fmt::format("penalty: {} in game {}", ka[i].kick_id, gp.game_a));
    }
    for (const auto& p : kicks.pairs) {
      const auto& row_a = pen_a.rows[rows_a[gp.game_a][p.a]];
      const auto& row_b = pen_b.rows[rows_b[gp.game_b][p.b]];
      csv::Table merged;
      merged.header = columns;
      std::vector<std::string> cells;
      for (const auto& col : columns) {
        const auto ca = pen_a.column(col);
        const auto cb = pen_b.column(col);
        std::string cell = ca ? row_a.at(*ca) : std::string();
        if (cell.empty() && cb) cell = row_b.at(*cb);
        cells.push_back(std::move(cell));
      }
      result.records.push_back(record_from_fields(merged, cells, result.warnings));
    }
  }
  for (const auto& [game, idx] : rows_a) {
    if (matched_games.count(game)) continue;
    kick_stage.unresolved += idx.size();
    kick_stage.total += idx.size();
  }
  result.report = {team_stage, game_stage, player_stage, kick_stage};
  return result;
}

}  // namespace gkp::linkage
