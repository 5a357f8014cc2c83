#include <gtest/gtest.h>

#include "galign/number.hpp"

using galign::Number;

TEST(Number, ParsesDecimalsExactly) {
  EXPECT_EQ(*galign::parse_decimal("0.75"), Number(3, 4));
  EXPECT_EQ(*galign::parse_decimal("29.75"), Number(119, 4));
  EXPECT_EQ(*galign::parse_decimal("80"), Number(80));
  EXPECT_EQ(*galign::parse_decimal("1e-3"), Number(1, 1000));
  EXPECT_EQ(*galign::parse_decimal("2.5E2"), Number(250));
}

TEST(Number, RejectsMalformedText) {
  for (const char* text : {"", ".", "1.", "abc", "1.2.3", "--1", "1e", "0x10"}) {
    EXPECT_FALSE(galign::parse_decimal(text)) << text;
  }
}

TEST(Number, FormatsTerminatingDecimalsWithoutRounding) {
  EXPECT_EQ(galign::format_decimal(Number(119, 4)), "29.75");
  EXPECT_EQ(galign::format_decimal(Number(9, 8)), "1.125");
  EXPECT_EQ(galign::format_decimal(Number(3)), "3");
  EXPECT_EQ(galign::format_decimal(Number(-1, 2)), "-0.5");
  EXPECT_EQ(galign::format_decimal(Number(0)), "0");
}

TEST(Number, RoundsNonTerminatingValues) {
  EXPECT_EQ(galign::format_decimal(Number(20, 11), 6), "1.818182");
  EXPECT_EQ(galign::format_decimal(Number(1, 3), 4), "0.3333");
  EXPECT_EQ(galign::format_decimal(Number(2, 3), 12), "0.666666666667");
  EXPECT_FALSE(galign::is_terminating_decimal(Number(1, 3)));
  EXPECT_TRUE(galign::is_terminating_decimal(Number(1, 80)));
}

TEST(Number, FixedPointRoundsHalfAwayFromZero) {
  EXPECT_EQ(galign::format_fixed(Number(119, 4), 2), "29.75");
  EXPECT_EQ(galign::format_fixed(Number(33), 2), "33.00");
  EXPECT_EQ(galign::format_fixed(Number(1, 8), 2), "0.13");
  EXPECT_EQ(galign::format_fixed(Number(-1, 8), 2), "-0.13");
  EXPECT_EQ(galign::format_fixed(Number(5, 11), 6), "0.454545");
}

TEST(Number, DoubleRoundTripUsesShortestForm) {
  EXPECT_EQ(galign::from_double(0.1), Number(1, 10));
  EXPECT_EQ(galign::from_double(29.75), Number(119, 4));
  EXPECT_DOUBLE_EQ(galign::to_double(Number(20, 11)), 20.0 / 11.0);
}
