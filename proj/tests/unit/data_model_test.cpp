#include "dtscore/data_model.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "dtscore/error.hpp"

namespace dtscore {
namespace {

ResponseRecord rec(std::string s, std::string p, int order, std::string text = "x") {
  return ResponseRecord{std::move(s), std::move(p), order, std::move(text), std::nullopt};
}

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return Errc::InvalidArgument;
}

TEST(BuildTrials, GroupsOneTrialInOrder) {
  const std::vector<ResponseRecord> records = {rec("s1", "p1", 2, "b"), rec("s1", "p1", 1, "a")};
  const auto trials = build_trials(records);
  ASSERT_EQ(trials.size(), 1u);
  ASSERT_EQ(trials[0].responses.size(), 2u);
  EXPECT_EQ(trials[0].responses[0].response_text, "a");
  EXPECT_EQ(trials[0].responses[1].response_text, "b");
}

TEST(BuildTrials, PartitionsByPrompt) {
  const std::vector<ResponseRecord> records = {rec("s1", "p2", 1), rec("s1", "p1", 1)};
  const auto trials = build_trials(records);
  ASSERT_EQ(trials.size(), 2u);
  EXPECT_EQ(trials[0].prompt_id, "p1");
  EXPECT_EQ(trials[1].prompt_id, "p2");
}

TEST(BuildTrials, DuplicateOrderIsRejected) {
  const std::vector<ResponseRecord> records = {rec("s1", "p1", 1), rec("s1", "p1", 1)};
  EXPECT_EQ(code_of([&] { build_trials(records); }), Errc::DuplicateOrder);
}

TEST(BuildTrials, GapIsRejected) {
  const std::vector<ResponseRecord> records = {rec("s1", "p1", 1), rec("s1", "p1", 3)};
  EXPECT_EQ(code_of([&] { build_trials(records); }), Errc::OrderGap);
  const std::vector<ResponseRecord> no_first = {rec("s2", "p1", 2)};
  EXPECT_EQ(code_of([&] { build_trials(no_first); }), Errc::OrderGap);
}

TEST(BuildTrials, PermutationInvariantAndRoundTrips) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<ResponseRecord> records;
    const int subjects = 1 + static_cast<int>(rng() % 5);
    for (int s = 0; s < subjects; ++s) {
      for (int p = 0; p < 3; ++p) {
        const int k = 1 + static_cast<int>(rng() % 6);
        for (int o = 1; o <= k; ++o) {
          records.push_back(rec("s" + std::to_string(s), "p" + std::to_string(p), o,
                                "t" + std::to_string(rng() % 1000)));
        }
      }
    }
    const auto reference = build_trials(records);
    auto shuffled = records;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto again = build_trials(shuffled);
    ASSERT_EQ(flatten_trials(reference), flatten_trials(again));

    auto flat = flatten_trials(reference);
    auto sorted_input = records;
    auto key = [](const ResponseRecord& r) { return std::tie(r.subject_id, r.prompt_id, r.order); };
    std::sort(sorted_input.begin(), sorted_input.end(), [&](auto& a, auto& b) { return key(a) < key(b); });
    std::sort(flat.begin(), flat.end(), [&](auto& a, auto& b) { return key(a) < key(b); });
    EXPECT_EQ(flat, sorted_input);
  }
}

TEST(ValidateRecord, TrimsOnlySurroundingWhitespace) {
  const auto r = validate_record(rec("s", "p", 1, "　 铺 床单 \t"));
  EXPECT_EQ(r.response_text, "铺 床单");
}

TEST(ValidateRecord, RejectsBlankTextAndBadOrder) {
  EXPECT_EQ(code_of([] { validate_record(rec("s", "p", 1, "  \n")); }), Errc::InvalidRecord);
  EXPECT_EQ(code_of([] { validate_record(rec("s", "p", 0, "a")); }), Errc::InvalidRecord);
  EXPECT_EQ(code_of([] { validate_record(rec("", "p", 1, "a")); }), Errc::InvalidRecord);
}

TEST(EmbeddingVector, RejectsNonFiniteAndEmpty) {
  EXPECT_THROW(EmbeddingVector({}), Error);
  EXPECT_THROW(EmbeddingVector({1.0, std::nan("")}), Error);
  EXPECT_EQ(EmbeddingVector({1.0, 2.0}).dim(), 2u);
}

TEST(RatingScale, BoundsPerKind) {
  EXPECT_EQ(rating_scale(RatingKind::Originality).min, 0.0);
  EXPECT_EQ(rating_scale(RatingKind::Originality).max, 4.0);
  EXPECT_EQ(rating_scale(RatingKind::Flexibility).min, 1.0);
  EXPECT_EQ(rating_scale(RatingKind::Flexibility).max, 5.0);
}

}  // namespace
}  // namespace dtscore
