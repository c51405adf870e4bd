#include "dtscore/io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "dtscore/csv.hpp"
#include "dtscore/error.hpp"

namespace dtscore {
namespace {

namespace fs = std::filesystem;

Error error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "expected an Error";
  return Error(Errc::InvalidArgument, "none");
}

TEST(Csv, QuotingAndLineEndings) {
  const auto t = csv::parse("\xEF\xBB\xBF" "a,b\r\n\"x, y\",\"say \"\"hi\"\"\"\r\n\r\n1,\"two\nlines\"\n");
  ASSERT_EQ(t.header, (std::vector<std::string>{"a", "b"}));
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.rows[0][0], "x, y");
  EXPECT_EQ(t.rows[0][1], "say \"hi\"");
  EXPECT_EQ(t.rows[1][1], "two\nlines");
  EXPECT_EQ(t.column("b"), 1u);
  EXPECT_FALSE(t.column("c").has_value());
}

TEST(Csv, Errors) {
  EXPECT_EQ(error_of([] { csv::parse("a,b\n1\n"); }).code(), Errc::ParseError);
  EXPECT_EQ(error_of([] { csv::parse("a,b\n\"1,2\n"); }).code(), Errc::ParseError);
}

TEST(Csv, EscapeRoundTrip) {
  std::mt19937_64 rng(77);
  const std::vector<std::string> pieces = {"a", ",", "\"", "\n", "\r\n", " ", "牙刷", "　", "x\"y"};
  for (int t = 0; t < 500; ++t) {
    std::vector<std::string> fields(1 + rng() % 5);
    for (auto& f : fields) {
      const std::size_t len = 1 + rng() % 6;
      for (std::size_t i = 0; i < len; ++i) f += pieces[rng() % pieces.size()];
    }
    std::vector<std::string> header(fields.size());
    for (std::size_t i = 0; i < header.size(); ++i) header[i] = "c" + std::to_string(i);
    const auto parsed = csv::parse(csv::format_row(header) + csv::format_row(fields));
    ASSERT_EQ(parsed.rows.size(), 1u);
    EXPECT_EQ(parsed.rows[0], fields);
  }
}

TEST(Csv, NumberFormat) {
  EXPECT_EQ(csv::format_number(0.5), "0.5");
  EXPECT_EQ(csv::format_number(-0.0), "0");
  EXPECT_EQ(csv::format_number(1.0 / 3.0), "0.333333333");
}

TEST(ParseResponses, WellFormed) {
  const auto recs = parse_responses_text(
      "subject_id,prompt_id,order,response_text,group_label\n"
      "s1,bedsheet,1,\"铺在地上, 野餐\",creative\n"
      "s1,bedsheet,2,做风筝,creative\n");
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].response_text, "铺在地上, 野餐");
  EXPECT_EQ(recs[1].order, 2);
  EXPECT_EQ(recs[1].group_label, "creative");
}

TEST(ParseResponses, HeaderOnlyIsEmpty) {
  EXPECT_TRUE(parse_responses_text("subject_id,prompt_id,order,response_text\n").empty());
}

TEST(ParseResponses, ErrorsNameTheRow) {
  const auto bad_order = error_of([] {
    parse_responses_text("subject_id,prompt_id,order,response_text\ns1,p,1,x\ns1,p,a,y\n");
  });
  EXPECT_EQ(bad_order.code(), Errc::ParseError);
  EXPECT_NE(std::string(bad_order.what()).find("row 2"), std::string::npos);
  const auto missing = error_of([] { parse_responses_text("subject_id,prompt_id,response_text\ns1,p,x\n"); });
  EXPECT_EQ(missing.code(), Errc::SchemaError);
  EXPECT_NE(std::string(missing.what()).find("row 0"), std::string::npos);
  const auto empty = error_of([] { parse_responses_text("subject_id,prompt_id,order,response_text\ns1,p,1,\" \"\n"); });
  EXPECT_EQ(empty.code(), Errc::ParseError);
  EXPECT_NE(std::string(empty.what()).find("row 1"), std::string::npos);
}

TEST(ParseRatings, Scales) {
  const std::string header = "subject_id,prompt_id,order,rater_id,rating,rating_kind\n";
  EXPECT_EQ(parse_ratings_text(header + "s,p,1,R1,4,originality\n")[0].rating, 4.0);
  const auto out_of_range = error_of([&] { parse_ratings_text(header + "s,p,1,R1,5,originality\n"); });
  EXPECT_EQ(out_of_range.code(), Errc::RangeError);
  EXPECT_NE(std::string(out_of_range.what()).find("row 1"), std::string::npos);
  const auto flex = parse_ratings_text(header + "s,p,0,R1,5,flexibility\n");
  EXPECT_EQ(flex[0].kind, RatingKind::Flexibility);
  EXPECT_EQ(flex[0].order, 0);
  EXPECT_EQ(error_of([&] { parse_ratings_text(header + "s,p,1,R1,0.5,flexibility\n"); }).code(), Errc::RangeError);
}

ScoreTable one_trial_two_models() {
  ScoreTable t;
  for (const char* m : {"m2", "m1"}) {
    t.response_scores.push_back({"s1", "p", 1, m, 0.25, 3});
    t.subject_scores.push_back({"s1", "p", m, 0.25, 0.0, 1});
  }
  t.ensemble_scores.push_back({"s1", "p", 0.0, 0.0, ""});
  return t;
}

RunManifest manifest() {
  RunManifest m;
  m.config_digest = "c";
  m.dataset_digest = "d";
  m.timestamp = "2024-01-01T00:00:00Z";
  return m;
}

TEST(Export, EmptyTableGivesHeaderOnlyFiles) {
  const auto dir = fs::temp_directory_path() / "dtscore_export_empty";
  fs::remove_all(dir);
  export_scores(ScoreTable{}, manifest(), dir);
  for (const char* name : {"response_scores.csv", "subject_scores.csv", "ensemble_scores.csv"}) {
    const auto t = csv::read_file(dir / name);
    EXPECT_FALSE(t.header.empty()) << name;
    EXPECT_TRUE(t.rows.empty()) << name;
  }
  EXPECT_TRUE(fs::exists(dir / "run_manifest.json"));
  fs::remove_all(dir);
}

TEST(Export, DeterministicAndSorted) {
  const auto dir = fs::temp_directory_path() / "dtscore_export_det";
  fs::remove_all(dir);
  const auto table = one_trial_two_models();
  export_scores(table, manifest(), dir / "a");
  auto shuffled = table;
  std::reverse(shuffled.subject_scores.begin(), shuffled.subject_scores.end());
  export_scores(shuffled, manifest(), dir / "b");
  for (const char* name : {"response_scores.csv", "subject_scores.csv", "ensemble_scores.csv", "run_manifest.json"}) {
    EXPECT_EQ(read_file_bytes(dir / "a" / name), read_file_bytes(dir / "b" / name)) << name;
  }
  const auto subjects = read_subject_scores(dir / "a" / "subject_scores.csv");
  ASSERT_EQ(subjects.size(), 2u);
  EXPECT_EQ(subjects[0].model_id, "m1");
  EXPECT_EQ(subjects[1].originality_topk, 0.25);
  fs::remove_all(dir);
}

TEST(Export, ResponsesRoundTripThroughCsv) {
  std::mt19937_64 rng(81);
  const std::vector<std::string> pieces = {"牙刷", ",", "\"", " 刷", "鞋", "x", "\n"};
  std::vector<ResponseRecord> records;
  for (int i = 1; i <= 40; ++i) {
    std::string text = "t";
    for (int j = 0; j < 4; ++j) text += pieces[rng() % pieces.size()];
    records.push_back({"s" + std::to_string(i % 4), "p", i, text, std::nullopt});
  }
  std::string file = csv::format_row({"subject_id", "prompt_id", "order", "response_text"});
  for (const auto& r : records) file += csv::format_row({r.subject_id, r.prompt_id, std::to_string(r.order), r.response_text});
  auto parsed = parse_responses_text(file);
  for (auto& r : records) r = validate_record(r);
  EXPECT_EQ(parsed, records);
}

TEST(RunConfig, ParsesAndResolvesPaths) {
  const auto cfg = parse_run_config(R"({
    "schema_version": 1, "top_k": 2, "cache_dir": "c", "output_dir": "/abs/out",
    "prompts": {"bedsheet": "床单"},
    "models": [{"model_id": "h", "backend": "test", "dim": 8}]
  })", "/base");
  EXPECT_EQ(cfg.top_k, 2u);
  EXPECT_EQ(cfg.cache_dir, fs::path("/base/c"));
  EXPECT_EQ(cfg.output_dir, fs::path("/abs/out"));
  EXPECT_EQ(cfg.ensemble_models, (std::vector<std::string>{"h"}));
  EXPECT_EQ(cfg.standardize_scope, StandardizeScope::PerPrompt);
  EXPECT_EQ(cfg.digest.size(), 64u);
}

TEST(RunConfig, Errors) {
  const auto bad = [](const std::string& json) { return error_of([&] { parse_run_config(json, "/"); }).code(); };
  const std::string models = R"("models": [{"model_id": "h", "backend": "test", "dim": 8}])";
  const std::string prompts = R"("prompts": {"p": "x"})";
  EXPECT_EQ(bad("{" + prompts + "," + models + R"(, "colour": 1})"), Errc::ConfigError);
  EXPECT_EQ(bad("{" + prompts + "," + models + R"(, "schema_version": 2})"), Errc::ConfigError);
  EXPECT_EQ(bad("{" + prompts + "}"), Errc::ConfigError);
  EXPECT_EQ(bad("{" + models + "}"), Errc::ConfigError);
  EXPECT_EQ(bad("{" + prompts + R"(, "models": [{"model_id": "r", "backend": "remote", "dim": 8}]})"), Errc::ConfigError);
  EXPECT_EQ(bad("{" + prompts + "," + models + R"(, "ensemble_models": ["zzz"]})"), Errc::ConfigError);
  EXPECT_EQ(bad("not json"), Errc::ConfigError);
}

TEST(Manifest, SourceDateEpoch) {
  setenv("SOURCE_DATE_EPOCH", "86400", 1);
  EXPECT_EQ(manifest_timestamp(), "1970-01-02T00:00:00Z");
  unsetenv("SOURCE_DATE_EPOCH");
}

}  // namespace
}  // namespace dtscore
