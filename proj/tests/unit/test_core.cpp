#include <gtest/gtest.h>

#include <random>

#include "kanbun/char_forms.hpp"
#include "kanbun/core.hpp"
#include "kanbun/error.hpp"
#include "kanbun/utf8.hpp"

namespace kanbun {
namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::Io;
}

TEST(Utf8, RoundTripsMixedScripts) {
  const std::string s = "春眠暁を覚えずABC𠀋";
  const auto d = utf8::decode(s);
  EXPECT_EQ(d.size(), 11u);
  EXPECT_EQ(d.back(), U'\U0002000B');
  EXPECT_EQ(utf8::encode(d), s);
}

TEST(Utf8, RejectsMalformed) {
  EXPECT_EQ(code_of([] { utf8::decode("\xC0\xAF"); }), ErrorCode::InvalidUtf8);
  EXPECT_EQ(code_of([] { utf8::decode("\xED\xA0\x80"); }), ErrorCode::InvalidUtf8);
  EXPECT_EQ(code_of([] { utf8::decode("\xE6\x98"); }), ErrorCode::InvalidUtf8);
  EXPECT_EQ(code_of([] { utf8::decode("\xF4\x90\x80\x80"); }), ErrorCode::InvalidUtf8);
}

TEST(SegmentChars, SplitsShungyoLine) {
  const auto s = segment_chars("春眠不覚暁", "a", "p");
  ASSERT_EQ(s.size(), 5u);
  EXPECT_EQ(s.chars, U"春眠不覚暁");
  EXPECT_EQ(s.at(3), U'不');
  EXPECT_EQ(s.text(), "春眠不覚暁");
  EXPECT_EQ(s.id, "a");
  EXPECT_EQ(s.poem_id, "p");
}

TEST(SegmentChars, RejectsEmptyAndNonCjk) {
  EXPECT_EQ(code_of([] { segment_chars(""); }), ErrorCode::EmptyInput);
  try {
    segment_chars("春 眠");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonCjkCharacter);
    EXPECT_NE(std::string(e.what()).find("offset 1"), std::string::npos);
  }
  EXPECT_EQ(code_of([] { segment_chars("春眠。"); }), ErrorCode::NonCjkCharacter);
  EXPECT_EQ(code_of([] { segment_chars("春を"); }), ErrorCode::NonCjkCharacter);
}

TEST(SegmentChars, ConcatenationReproducesInput) {
  std::mt19937 rng(3);
  const std::u32string pool = U"春眠不覚暁処聞啼鳥㐀𠀀𪜀";
  for (int t = 0; t < 200; ++t) {
    std::u32string s;
    const int n = 1 + static_cast<int>(rng() % 10);
    for (int i = 0; i < n; ++i) s += pool[rng() % pool.size()];
    const auto raw = utf8::encode(s);
    const auto seg = segment_chars(raw);
    std::string joined;
    for (char32_t c : seg.chars) joined += utf8::encode(c);
    EXPECT_EQ(joined, raw);
  }
}

TEST(ReadingOrder, ValidatesInvariants) {
  EXPECT_NO_THROW(ReadingOrder::from_permutation({1, 2, 5, 4, 3}));
  EXPECT_EQ(code_of([] { ReadingOrder::from_permutation({1, 1, 2}); }), ErrorCode::InvalidOrder);
  EXPECT_EQ(code_of([] { ReadingOrder::from_permutation({1, 4, 2}); }), ErrorCode::InvalidOrder);

  ReadingOrder o;
  o.flags = parse_flags("nnun");
  o.order = {1, 2, 4};
  EXPECT_NO_THROW(o.validate());
  o.order = {1, 2, 3, 4};
  EXPECT_EQ(code_of([&] { o.validate(); }), ErrorCode::InvalidOrder);
  o.order = {1, 2};
  EXPECT_EQ(code_of([&] { o.validate(); }), ErrorCode::InvalidOrder);
  EXPECT_EQ(flags_string(parse_flags("nrun")), "nrun");
  EXPECT_EQ(code_of([] { parse_flags("nx"); }), ErrorCode::InvalidOrder);
}

TEST(ReadingOrder, Identity) {
  EXPECT_TRUE(ReadingOrder::identity(5).is_identity());
  EXPECT_FALSE(ReadingOrder::from_permutation({2, 1}).is_identity());
}

TEST(CharForms, BuiltinMapsCommonPairs) {
  const auto& t = CharFormTable::builtin();
  EXPECT_GT(t.size(), 250u);
  EXPECT_EQ(normalize_forms(U"學", t), U"学");
  EXPECT_EQ(normalize_forms(U"春眠不覺曉", t), U"春眠不覚暁");
  EXPECT_EQ(normalize_forms(U"處處聞啼鳥", t), U"処処聞啼鳥");
  EXPECT_EQ(normalize_forms(U"夜來風雨聲", t), U"夜来風雨声");
}

TEST(CharForms, EmptyTableIsIdentity) {
  CharFormTable empty;
  EXPECT_EQ(normalize_forms(U"春眠不覚暁", empty), U"春眠不覚暁");
}

TEST(CharForms, IdempotentAndLengthPreserving) {
  const auto& t = CharFormTable::builtin();
  std::mt19937 rng(11);
  const std::u32string pool = U"學覺曉處來聲擧黃樓萬徑獨晚爲春眠覚暁学花鳥を";
  for (int k = 0; k < 500; ++k) {
    std::u32string s;
    const int n = static_cast<int>(rng() % 12);
    for (int i = 0; i < n; ++i) s += pool[rng() % pool.size()];
    const auto once = normalize_forms(s, t);
    EXPECT_EQ(once.size(), s.size());
    EXPECT_EQ(normalize_forms(once, t), once);
  }
}

TEST(CharForms, ParseRejectsBadTables) {
  EXPECT_EQ(CharFormTable::parse("# c\n學\t学\n\n").size(), 1u);
  EXPECT_EQ(code_of([] { CharFormTable::parse("學\t学\n斈\t学\n"); }), ErrorCode::BadCharTable);
  EXPECT_EQ(code_of([] { CharFormTable::parse("學\t学\n学\t孝\n"); }), ErrorCode::BadCharTable);
  EXPECT_EQ(code_of([] { CharFormTable::parse("學学\n"); }), ErrorCode::BadCharTable);
  try {
    CharFormTable::parse("學\t学\nab\tc\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
}

}  // namespace
}  // namespace kanbun
