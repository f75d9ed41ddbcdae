// Copyright 2026 The kconflict Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <set>

#include "kconflict/error.h"
#include "kconflict/rng.h"
#include "kconflict/text.h"

namespace kconflict {
namespace {

TEST(Fnv1a64Test, KnownVectors) {
  EXPECT_EQ(Fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(Fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(Fnv1a64("foobar"), 0x85944171f73967e8ULL);
}

TEST(SplitMix64Test, KnownVector) {
  // First output of the reference generator seeded with 0.
  EXPECT_EQ(SplitMix64(0), 0xe220a8397b1dcdafULL);
}

TEST(DeriveSeedTest, MatchesComposition) {
  const uint64_t expected = SplitMix64(SplitMix64(42 ^ Fnv1a64("q1")) ^ Fnv1a64("op"));
  EXPECT_EQ(DeriveSeed(42, "q1", "op"), expected);
  EXPECT_NE(DeriveSeed(42, "q1", "op"), DeriveSeed(42, "q2", "op"));
  EXPECT_NE(DeriveSeed(42, "q1", "op"), DeriveSeed(43, "q1", "op"));
  EXPECT_NE(DeriveSeed(42, "q1", "op"), DeriveSeed(42, "q1", "other"));
}

TEST(RngTest, SameSeedSameStream) {
  Rng a(7), b(7);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.NextU64(), b.NextU64());
}

TEST(RngTest, UniformIndexInRangeAndCoversAll) {
  Rng rng(1);
  std::set<size_t> seen;
  for (int i = 0; i < 2000; ++i) {
    const size_t v = rng.UniformIndex(7);
    ASSERT_LT(v, 7u);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 7u);
}

TEST(RngTest, UniformRealInUnitInterval) {
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.UniformReal();
    ASSERT_GE(v, 0.0);
    ASSERT_LT(v, 1.0);
  }
}

TEST(RngTest, SampleWithoutReplacementDistinct) {
  Rng rng(3);
  const auto picks = rng.SampleWithoutReplacement(10, 6);
  ASSERT_EQ(picks.size(), 6u);
  EXPECT_EQ(std::set<size_t>(picks.begin(), picks.end()).size(), 6u);
  for (size_t p : picks) EXPECT_LT(p, 10u);
  EXPECT_EQ(rng.SampleWithoutReplacement(4, 4).size(), 4u);
}

TEST(RngTest, ShuffleIsPermutation) {
  Rng rng(4);
  std::vector<int> v = {1, 2, 3, 4, 5, 6};
  rng.Shuffle(v);
  std::multiset<int> m(v.begin(), v.end());
  EXPECT_EQ(m, (std::multiset<int>{1, 2, 3, 4, 5, 6}));
}

TEST(NormalizeAnswerTest, Examples) {
  EXPECT_EQ(NormalizeAnswer("The U.S."), "us");
  EXPECT_EQ(NormalizeAnswer("1995"), "1995");
  EXPECT_EQ(NormalizeAnswer("the 1995"), "1995");
  EXPECT_EQ(NormalizeAnswer("  Heartbreak   Hotel "), "heartbreak hotel");
  EXPECT_EQ(NormalizeAnswer("An apple a day"), "apple day");
  EXPECT_EQ(NormalizeAnswer("theory"), "theory");
  EXPECT_EQ(NormalizeAnswer("..."), "");
}

TEST(NormalizeAliasesTest, SortedUniqueNonEmpty) {
  EXPECT_EQ(NormalizeAliases({"The U.S.", "US", "!!", "Norway"}),
            (std::vector<std::string>{"norway", "us"}));
}

TEST(Utf8Test, CodePointOffsets) {
  const std::string text = "Zürich – 1995";
  EXPECT_EQ(CodePointLength(text), 13u);
  EXPECT_EQ(SubstrCodePoints(text, 0, 6), "Zürich");
  EXPECT_EQ(SubstrCodePoints(text, 9, 13), "1995");
  EXPECT_EQ(EncodeUtf8(DecodeUtf8(text)), text);
}

TEST(Utf8Test, InvalidInputThrows) {
  EXPECT_THROW(DecodeUtf8(std::string("\xff\xfe", 2)), DatasetError);
}

TEST(TextTest, TrimAndSplit) {
  EXPECT_EQ(Trim("  a b  "), "a b");
  EXPECT_EQ(SplitWhitespace(" a  b\tc "), (std::vector<std::string>{"a", "b", "c"}));
}

}  // namespace
}  // namespace kconflict
