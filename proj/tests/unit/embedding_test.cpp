#include "dtscore/embedding.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "dtscore/error.hpp"
#include "dtscore/text.hpp"

namespace dtscore {
namespace {

EmbeddingVector v(std::initializer_list<double> xs) { return EmbeddingVector(std::vector<double>(xs)); }

TEST(MeanPool, Examples) {
  EXPECT_EQ(mean_pool(std::vector{v({1, 0}), v({0, 1})}), v({0.5, 0.5}));
  EXPECT_EQ(mean_pool(std::vector{v({2, 4})}), v({2, 4}));
  EXPECT_EQ(mean_pool(std::vector{v({1, 1}), v({3, 1}), v({5, 4})}), v({3, 2}));
}

TEST(MeanPool, ErrorsOnEmptyAndRaggedInput) {
  EXPECT_THROW(mean_pool(std::vector<EmbeddingVector>{}), Error);
  EXPECT_THROW(mean_pool(std::vector{v({1, 2}), v({1, 2, 3})}), Error);
}

TEST(ClsPool, Examples) {
  EXPECT_EQ(cls_pool(std::vector{v({1, 2}), v({9, 9})}), v({1, 2}));
  EXPECT_EQ(cls_pool(std::vector{v({7, 8})}), v({7, 8}));
  try {
    cls_pool(std::vector<EmbeddingVector>{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::EmptyInput);
  }
}

TEST(Pooling, MeanIsPermutationInvariantClsIsNot) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  bool cls_changed = false;
  for (int t = 0; t < 100; ++t) {
    std::vector<EmbeddingVector> toks;
    for (int i = 0; i < 5; ++i) toks.push_back(v({g(rng), g(rng), g(rng)}));
    auto shuffled = toks;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto a = mean_pool(toks);
    const auto b = mean_pool(shuffled);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
    cls_changed = cls_changed || !(cls_pool(toks) == cls_pool(shuffled));
  }
  EXPECT_TRUE(cls_changed);
}

TEST(FilterStopwords, Examples) {
  const StopwordList list({"的"});
  const std::vector<std::string> tokens = {"我", "的", "书"};
  EXPECT_EQ(filter_stopwords(tokens, list), (std::vector<std::string>{"我", "书"}));
  const std::vector<std::string> disjoint = {"牙刷", "刷鞋"};
  EXPECT_EQ(filter_stopwords(disjoint, list), disjoint);
  const std::vector<std::string> all = {"的", "的"};
  EXPECT_TRUE(filter_stopwords(all, list).empty());
}

TEST(FilterStopwords, Idempotent) {
  const StopwordList list({"但", "的", "了"});
  const std::vector<std::string> tokens = {"但", "我", "的", "书", "了", "的", "好"};
  const auto once = filter_stopwords(tokens, list);
  EXPECT_EQ(filter_stopwords(once, list), once);
}

TEST(StopwordList, LoadSkipsCommentsAndBlankLines) {
  const auto path = std::filesystem::temp_directory_path() / "dtscore_stopwords_test.txt";
  {
    std::ofstream out(path);
    out << "# Chinese stop words\n的\n\n但\n#了\n";
  }
  const auto list = StopwordList::load(path);
  EXPECT_EQ(list.count(), 2u);
  EXPECT_TRUE(list.contains("的"));
  EXPECT_TRUE(list.contains("但"));
  EXPECT_FALSE(list.contains("#了"));
  EXPECT_FALSE(list.contains("了"));
  std::filesystem::remove(path);
  EXPECT_THROW(StopwordList({""}), Error);
}

// Frozen from tests/oracles/test_embed_reference.py.
TEST(TestEmbed, MatchesReferenceProcedure) {
  const std::vector<double> brush = {-0.5308916528071314, 0.0, 0.36316413373493234, -0.04628149898994517,
                                     0.0, -0.3931324841218171, 0.0, 0.6554164612883334};
  const std::vector<double> latin = {-0.2332167887204203, -0.1959722126667754, 0.0, -0.6780340302831888,
                                     0.0, 0.31626282614538903, 0.0, 0.5894510156899301};
  const auto a = test_embed("用牙刷刷鞋", 8);
  const auto b = test_embed("toothbrush", 8);
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_DOUBLE_EQ(a[i], brush[i]) << i;
    EXPECT_DOUBLE_EQ(b[i], latin[i]) << i;
  }
}

TEST(TestEmbed, UnitNormAndDeterministic) {
  std::mt19937_64 rng(11);
  const std::u32string alphabet = U"床单牙刷鞋子用来做成abcXYZ 12";
  for (int t = 0; t < 200; ++t) {
    std::string s;
    const int len = 1 + static_cast<int>(rng() % 20);
    for (int i = 0; i < len; ++i) {
      s += text::encode_utf8(alphabet[rng() % alphabet.size()]);
    }
    const std::size_t dim = 1 + rng() % 64;
    const auto e = test_embed(s, dim);
    double sq = 0.0;
    for (double x : e.values()) sq += x * x;
    EXPECT_NEAR(std::sqrt(sq), 1.0, 1e-9);
    EXPECT_EQ(e, test_embed(s, dim));
  }
}

TEST(TestEmbed, RejectsEmptyText) {
  try {
    test_embed("", 8);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::EmptyInput);
  }
}

TEST(ModelConfig, BackendRequirements) {
  ModelConfig c{.model_id = "m", .backend = BackendKind::Remote, .dim = 4};
  EXPECT_THROW(validate(c), Error);
  c.endpoint = "http://localhost:1";
  EXPECT_NO_THROW(validate(c));
  c.stopword_list = "stop.txt";
  EXPECT_THROW(validate(c), Error);
  ModelConfig local{.model_id = "w", .backend = BackendKind::Local, .dim = 4};
  EXPECT_THROW(validate(local), Error);
  local.artifact_path = "vec.txt";
  local.stopword_list = "stop.txt";
  EXPECT_NO_THROW(validate(local));
  ModelConfig zero{.model_id = "z", .backend = BackendKind::Test, .dim = 0};
  EXPECT_THROW(validate(zero), Error);
}

TEST(Quantize, RoundsToBinary32) {
  const auto q = quantize_f32(v({0.1, 1.0 / 3.0}));
  EXPECT_EQ(q[0], static_cast<double>(0.1f));
  EXPECT_EQ(q[1], static_cast<double>(static_cast<float>(1.0 / 3.0)));
  EXPECT_EQ(quantize_f32(q), q);
}

}  // namespace
}  // namespace dtscore
