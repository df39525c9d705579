#include "gkpolicy/records_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

#include <fmt/format.h>
#include <json.hpp>

#include "gkpolicy/error.hpp"

namespace gkp {

namespace {

using FieldMap = std::map<std::string, std::string, std::less<>>;

const std::string* find(const FieldMap& f, std::string_view name) {
  auto it = f.find(name);
  if (it == f.end() || it->second.empty() || it->second == "null") return nullptr;
  return &it->second;
}

int parse_int(const std::string& s, std::string_view field) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ValidationError(fmt::format("{}: '{}' is not an integer", field, s), {{std::string(field), "not an integer"}});
  }
  return v;
}

double parse_double(const std::string& s, std::string_view field) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used == s.size() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw ValidationError(fmt::format("{}: '{}' is not a finite number", field, s), {{std::string(field), "not a number"}});
}

bool parse_bool(const std::string& s, std::string_view field) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ValidationError(fmt::format("{}: '{}' is not a boolean", field, s), {{std::string(field), "not a boolean"}});
}

PenaltyRecord record_from_map(const FieldMap& f, std::vector<std::string>& warnings) {
  PenaltyRecord r;
  const std::string* v = nullptr;
  if (!(v = find(f, "kick_id"))) throw ValidationError("kick_id is required", {{"kick_id", "missing"}});
  r.kick_id = *v;
  if ((v = find(f, "match_id"))) r.match_id = *v;
  if ((v = find(f, "taker_id"))) r.taker_id = *v;
  if ((v = find(f, "keeper_id"))) r.keeper_id = *v;
  if ((v = find(f, "minute"))) r.minute = parse_int(*v, "minute");
  if (r.minute < 0) throw ValidationError("minute must be >= 0", {{"minute", "negative"}});
  if ((v = find(f, "is_shootout"))) r.is_shootout = parse_bool(*v, "is_shootout");
  if ((v = find(f, "shootout_kick_index"))) r.shootout_kick_index = parse_int(*v, "shootout_kick_index");
  if ((v = find(f, "shootout_team_kick_index"))) {
    r.shootout_team_kick_index = parse_int(*v, "shootout_team_kick_index");
  }
  if (!r.is_shootout && (r.shootout_kick_index || r.shootout_team_kick_index)) {
    throw ValidationError(fmt::format("kick {}: shootout indices set on an in-game kick", r.kick_id),
                          {{"shootout_kick_index", "must be empty when is_shootout is false"}});
  }
  if ((v = find(f, "goal_diff"))) r.goal_diff = parse_int(*v, "goal_diff");
  if ((v = find(f, "foot"))) r.foot = parse_foot(*v);
  if ((v = find(f, "taker_strategy"))) r.taker_strategy = parse_taker_strategy(*v);
  if ((v = find(f, "end_x"))) r.end_x = parse_double(*v, "end_x");
  if ((v = find(f, "end_z"))) r.end_z = parse_double(*v, "end_z");
  if ((v = find(f, "keeper_dive_zone"))) r.keeper_dive_zone = parse_dive_zone(*v);
  if ((v = find(f, "keeper_timing"))) r.keeper_timing = parse_timing(*v);
  if ((v = find(f, "date"))) r.date = *v;
  if ((v = find(f, "team_id"))) r.team_id = *v;
  if ((v = find(f, "taker_position"))) r.taker_position = parse_position_line(*v);
  if ((v = find(f, "taker_age"))) r.taker_age = parse_double(*v, "taker_age");
  if ((v = find(f, "keeper_height_cm"))) r.keeper_height_cm = parse_double(*v, "keeper_height_cm");

  const bool have_coords = r.end_x.has_value() && r.end_z.has_value();
  const bool coords_on = have_coords && coordinates_on_target(*r.end_x, *r.end_z);
  if ((v = find(f, "outcome"))) {
    r.outcome = parse_outcome(*v);
    if (have_coords && (r.outcome == Outcome::off_target) == coords_on) {
      warnings.push_back(fmt::format(
          "kick {}: outcome '{}' disagrees with coordinates ({}, {}); keeping the outcome flag",
          r.kick_id, to_string(r.outcome), *r.end_x, *r.end_z));
    }
  } else if (have_coords && !coords_on) {
    r.outcome = Outcome::off_target;
  } else {
    throw ValidationError(fmt::format("kick {}: outcome missing and not derivable", r.kick_id),
                          {{"outcome", "missing"}});
  }

  if ((v = find(f, "pressure"))) {
    r.pressure = parse_pressure(*v);
  } else {
    r.pressure = pressure_label(r.is_shootout, r.minute, r.goal_diff);
  }
  return r;
}

std::string opt_int(const std::optional<int>& v) { return v ? std::to_string(*v) : std::string(); }
std::string opt_double(const std::optional<double>& v) { return v ? csv::format_double(*v) : std::string(); }

std::vector<std::string> record_cells(const PenaltyRecord& r) {
  return {r.kick_id,
          r.match_id,
          r.taker_id,
          r.keeper_id,
          std::to_string(r.minute),
          r.is_shootout ? "true" : "false",
          opt_int(r.shootout_kick_index),
          opt_int(r.shootout_team_kick_index),
          std::to_string(r.goal_diff),
          std::string(to_string(r.foot)),
          std::string(to_string(r.taker_strategy)),
          opt_double(r.end_x),
          opt_double(r.end_z),
          std::string(to_string(r.outcome)),
          std::string(to_string(r.keeper_dive_zone)),
          std::string(to_string(r.keeper_timing)),
          std::string(to_string(r.pressure)),
          r.date,
          r.team_id,
          r.taker_position ? std::string(to_string(*r.taker_position)) : std::string(),
          opt_double(r.taker_age),
          opt_double(r.keeper_height_cm)};
}

}  // namespace

const std::vector<std::string>& record_columns() {
  static const std::vector<std::string> columns{
      "kick_id",          "match_id",       "taker_id",
      "keeper_id",        "minute",         "is_shootout",
      "shootout_kick_index", "shootout_team_kick_index", "goal_diff",
      "foot",             "taker_strategy", "end_x",
      "end_z",            "outcome",        "keeper_dive_zone",
      "keeper_timing",    "pressure",       "date",
      "team_id",          "taker_position", "taker_age",
      "keeper_height_cm"};
  return columns;
}

PenaltyRecord record_from_fields(const csv::Table& table, const std::vector<std::string>& row,
                                 std::vector<std::string>& warnings) {
  FieldMap f;
  for (std::size_t i = 0; i < table.header.size() && i < row.size(); ++i) f[table.header[i]] = row[i];
  return record_from_map(f, warnings);
}

RecordSet read_records_csv(std::istream& in) {
  const auto table = csv::read(in);
  RecordSet out;
  out.records.reserve(table.rows.size());
  for (const auto& row : table.rows) out.records.push_back(record_from_fields(table, row, out.warnings));
  return out;
}

RecordSet read_records_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingArtifactError(fmt::format("cannot open records file '{}'", path));
  return read_records_csv(in);
}

void write_records_csv(std::ostream& out, const std::vector<PenaltyRecord>& records) {
  csv::Table t;
  t.header = record_columns();
  t.rows.reserve(records.size());
  for (const auto& r : records) t.rows.push_back(record_cells(r));
  csv::write(out, t);
}

void write_records_csv_file(const std::string& path, const std::vector<PenaltyRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(fmt::format("cannot write '{}'", path));
  write_records_csv(out, records);
}

std::string record_to_json_line(const PenaltyRecord& r) {
  nlohmann::ordered_json j;
  const auto cells = record_cells(r);
  const auto& cols = record_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) {
    const auto& name = cols[i];
    const auto& cell = cells[i];
    if (cell.empty()) {
      j[name] = nullptr;
    } else if (name == "minute" || name == "goal_diff" || name == "shootout_kick_index" ||
               name == "shootout_team_kick_index") {
      j[name] = std::stoi(cell);
    } else if (name == "is_shootout") {
      j[name] = r.is_shootout;
    } else if (name == "end_x" || name == "end_z" || name == "taker_age" || name == "keeper_height_cm") {
      j[name] = std::stod(cell);
    } else {
      j[name] = cell;
    }
  }
  return j.dump();
}

PenaltyRecord record_from_json_line(std::string_view line, std::vector<std::string>& warnings) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(fmt::format("malformed JSON record: {}", e.what()));
  }
  if (!j.is_object()) throw ValidationError("JSON record must be an object");
  FieldMap f;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& v = it.value();
    if (v.is_null()) continue;
    if (v.is_string()) {
      f[it.key()] = v.get<std::string>();
    } else if (v.is_boolean()) {
      f[it.key()] = v.get<bool>() ? "true" : "false";
    } else if (v.is_number_integer()) {
      f[it.key()] = std::to_string(v.get<long long>());
    } else if (v.is_number()) {
      f[it.key()] = csv::format_double(v.get<double>());
    } else {
      throw ValidationError(fmt::format("field '{}' has an unsupported JSON type", it.key()),
                            {{it.key(), "unsupported type"}});
    }
  }
  return record_from_map(f, warnings);
}

RecordSet read_records_jsonl(std::istream& in) {
  RecordSet out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.records.push_back(record_from_json_line(line, out.warnings));
  }
  return out;
}

void write_records_jsonl(std::ostream& out, const std::vector<PenaltyRecord>& records) {
  for (const auto& r : records) out << record_to_json_line(r) << '\n';
}

RecordSet read_records_file(const std::string& path) {
  const bool jsonl = path.ends_with(".jsonl") || path.ends_with(".ndjson");
  if (!jsonl) return read_records_csv_file(path);
  std::ifstream in(path);
  if (!in) throw MissingArtifactError(fmt::format("cannot open records file '{}'", path));
  return read_records_jsonl(in);
}

}  // namespace gkp
