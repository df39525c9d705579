#pragma once

// Flat serialization of PenaltyRecord as CSV and as line-delimited JSON.
// Column/field names match the struct members; missing values are empty
// cells in CSV and null in JSON.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "gkpolicy/core.hpp"
#include "gkpolicy/csv.hpp"

namespace gkp {

struct RecordSet {
  std::vector<PenaltyRecord> records;
  std::vector<std::string> warnings;
};

const std::vector<std::string>& record_columns();

// Parse one row given by column name. Applies the ingestion rules:
// an explicit outcome flag wins over coordinates (with a warning when they
// disagree); an empty outcome is derived from coordinates only when they are
// off target; an empty pressure is computed from context.
PenaltyRecord record_from_fields(const csv::Table& table, const std::vector<std::string>& row,
                                 std::vector<std::string>& warnings);

RecordSet read_records_csv(std::istream& in);
RecordSet read_records_csv_file(const std::string& path);
void write_records_csv(std::ostream& out, const std::vector<PenaltyRecord>& records);
void write_records_csv_file(const std::string& path, const std::vector<PenaltyRecord>& records);

std::string record_to_json_line(const PenaltyRecord& record);
PenaltyRecord record_from_json_line(std::string_view line, std::vector<std::string>& warnings);
RecordSet read_records_jsonl(std::istream& in);
void write_records_jsonl(std::ostream& out, const std::vector<PenaltyRecord>& records);

// Dispatches on the file extension (.jsonl / .ndjson, otherwise CSV).
RecordSet read_records_file(const std::string& path);

}  // namespace gkp
