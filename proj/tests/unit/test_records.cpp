#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "gkpolicy/csv.hpp"
#include "gkpolicy/datagen.hpp"
#include "gkpolicy/error.hpp"
#include "gkpolicy/records_io.hpp"

namespace gkp {
namespace {

TEST(Csv, QuotesOnlyWhenNeeded) {
  EXPECT_EQ(csv::quote("plain"), "plain");
  EXPECT_EQ(csv::quote("a,b"), "\"a,b\"");
  EXPECT_EQ(csv::quote("say \"hi\""), "\"say \"\"hi\"\"\"");
}

TEST(Csv, TableRoundTrip) {
  csv::Table t;
  t.header = {"name", "note"};
  t.rows = {{"Real Madrid, CF", "line\nbreak"}, {"x", ""}, {"q\"uote", "z"}};
  std::stringstream ss;
  csv::write(ss, t);
  const csv::Table back = csv::read(ss);
  EXPECT_EQ(back.header, t.header);
  EXPECT_EQ(back.rows, t.rows);
}

TEST(Csv, RequireColumnNamesTheMissingOne) {
  csv::Table t;
  t.header = {"a"};
  EXPECT_EQ(t.require_column("a"), 0U);
  EXPECT_FALSE(t.column("b").has_value());
  EXPECT_THROW(t.require_column("b"), ValidationError);
}

TEST(Csv, ShortestRoundTripDoubles) {
  EXPECT_EQ(csv::format_double(0.1), "0.1");
  EXPECT_EQ(csv::format_double(2.0), "2");
  EXPECT_EQ(csv::format_double(std::nan("")), "");
  const double v = 0.7824646176163925;
  EXPECT_EQ(std::stod(csv::format_double(v)), v);
}

std::vector<PenaltyRecord> sample_records() {
  datagen::GeneratorConfig c;
  c.n_kicks = 300;
  c.seed = 5;
  return datagen::generate(c);
}

TEST(Records, CsvRoundTripIsLossless) {
  const auto recs = sample_records();
  std::stringstream ss;
  write_records_csv(ss, recs);
  const auto back = read_records_csv(ss);
  EXPECT_TRUE(back.warnings.empty());
  EXPECT_EQ(back.records, recs);
}

TEST(Records, JsonlRoundTripIsLossless) {
  const auto recs = sample_records();
  std::stringstream ss;
  write_records_jsonl(ss, recs);
  const auto back = read_records_jsonl(ss);
  EXPECT_EQ(back.records, recs);
}

TEST(Records, OutcomeFlagWinsOverCoordinatesWithWarning) {
  std::stringstream ss("kick_id,end_x,end_z,outcome\nk1,5.0,1.0,goal\n");
  const auto set = read_records_csv(ss);
  ASSERT_EQ(set.records.size(), 1U);
  EXPECT_EQ(set.records[0].outcome, Outcome::goal);
  EXPECT_EQ(set.warnings.size(), 1U);
}

TEST(Records, EmptyOutcomeDerivedOnlyForOffTargetCoordinates) {
  std::stringstream off("kick_id,end_x,end_z,outcome\nk1,0.0,3.0,\n");
  EXPECT_EQ(read_records_csv(off).records[0].outcome, Outcome::off_target);
  std::stringstream on("kick_id,end_x,end_z,outcome\nk1,0.0,1.0,\n");
  EXPECT_THROW(read_records_csv(on), ValidationError);
}

TEST(Records, PressureComputedWhenAbsent) {
  std::stringstream ss("kick_id,minute,goal_diff,outcome\nk1,88,0,goal\nk2,10,2,goal\n");
  const auto set = read_records_csv(ss);
  EXPECT_EQ(set.records[0].pressure, Pressure::high);
  EXPECT_EQ(set.records[1].pressure, Pressure::low);
}

TEST(Records, RejectsMalformedCells) {
  std::stringstream bad_int("kick_id,minute,outcome\nk1,ten,goal\n");
  EXPECT_THROW(read_records_csv(bad_int), ValidationError);
  std::stringstream no_id("kick_id,outcome\n,goal\n");
  EXPECT_THROW(read_records_csv(no_id), ValidationError);
  std::stringstream idx("kick_id,is_shootout,shootout_kick_index,outcome\nk1,false,3,goal\n");
  EXPECT_THROW(read_records_csv(idx), ValidationError);
}

TEST(Records, JsonNullIsMissing) {
  std::vector<std::string> warnings;
  const auto r = record_from_json_line(R"({"kick_id":"k9","end_x":null,"outcome":"saved"})", warnings);
  EXPECT_EQ(r.kick_id, "k9");
  EXPECT_FALSE(r.end_x.has_value());
  EXPECT_EQ(r.outcome, Outcome::saved);
  EXPECT_THROW(record_from_json_line("[1,2]", warnings), ValidationError);
}

}  // namespace
}  // namespace gkp
