#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "fdinet/core/csv.hpp"
#include "fdinet/core/error.hpp"
#include "fdinet/core/format.hpp"
#include "fdinet/core/keyvalue.hpp"

using namespace fdinet;

TEST(Format, RoundtripIsShortestAndExact) {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.125, -2.5e17}) {
    const auto s = format_roundtrip(v);
    EXPECT_EQ(*parse_double(s), v) << s;
  }
  EXPECT_EQ(format_roundtrip(0.1), "0.1");
  EXPECT_EQ(format_roundtrip(std::numeric_limits<double>::quiet_NaN()), "");
}

TEST(Format, SixSignificantDigits) {
  EXPECT_EQ(format_sig(3.14159265), "3.14159");
  EXPECT_EQ(format_sig(1234567.0), "1.23457e+06");
  EXPECT_EQ(format_fixed(0.5, 3), "0.500");
}

TEST(Format, ParseDoubleAcceptsPlainNumbersOnly) {
  EXPECT_EQ(*parse_double(" +2.5 "), 2.5);
  EXPECT_FALSE(parse_double("1,000"));
  EXPECT_FALSE(parse_double("abc"));
  EXPECT_FALSE(parse_double(""));
  EXPECT_FALSE(parse_double("nan"));
  EXPECT_FALSE(parse_double("inf"));
}

TEST(Csv, ParsesHeaderRowsAndLineNumbers) {
  auto t = csv::parse("\xEF\xBB\xBF" "a,b\n1,2\n\n3,4\n", "mem");
  EXPECT_EQ(t.header, (std::vector<std::string>{"a", "b"}));
  ASSERT_EQ(t.rows.size(), 2u);
  EXPECT_EQ(t.line_numbers[1], 4u);
}

TEST(Csv, FieldCountMismatchNamesLine) {
  try {
    csv::parse("a,b\n1,2\n3\n", "mem.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ParseError);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(Csv, EmptyInputRejected) {
  try {
    csv::parse("\n\n", "blank.csv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyInput);
  }
}

TEST(KeyValue, CommentsAndFirstEquals) {
  auto kv = parse_key_values("# c\n a = b=c  # tail\n\nx=1\n", "spec");
  ASSERT_EQ(kv.size(), 2u);
  EXPECT_EQ(kv[0].key, "a");
  EXPECT_EQ(kv[0].value, "b=c");
  EXPECT_EQ(kv[1].line, 4u);
  EXPECT_THROW(parse_key_values("novalue\n", "spec"), Error);
}

TEST(KeyValue, SplitList) {
  EXPECT_EQ(split_list(" a, b ,c "), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(split_list("ln_dist:ln_cc", ':'), (std::vector<std::string>{"ln_dist", "ln_cc"}));
}

TEST(Error, MessageCarriesKind) {
  try {
    fail(ErrorKind::AlphaNotOne, "x");
  } catch (const Error& e) {
    EXPECT_EQ(std::string(e.what()), "AlphaNotOne: x");
    EXPECT_EQ(e.kind(), ErrorKind::AlphaNotOne);
  }
}
