#include <gtest/gtest.h>

#include "spcc/csv.hpp"
#include "spcc/hashing.hpp"
#include "spcc/timestamp.hpp"

namespace spcc {
namespace {

TEST(Timestamp, ParsesZonesAndFractions) {
  EXPECT_EQ(parse_iso8601("1970-01-01T00:00:00Z"), 0);
  EXPECT_EQ(parse_iso8601("1970-01-01T00:00:10.75Z"), 10);
  EXPECT_EQ(parse_iso8601("1970-01-01T01:00:00+01:00"), 0);
  EXPECT_EQ(parse_iso8601("1970-01-01T00:00:00"), 0);
  EXPECT_EQ(parse_iso8601("2005-10-17T09:00:00Z"), 1129539600);
  EXPECT_FALSE(parse_iso8601("2005-13-01T00:00:00Z"));
  EXPECT_FALSE(parse_iso8601("yesterday"));
}

TEST(Timestamp, FormatRoundTrips) {
  EXPECT_EQ(format_iso8601(1129539600), "2005-10-17T09:00:00Z");
  EXPECT_EQ(parse_iso8601(format_iso8601(951782400)), 951782400);  // leap day 2000
}

TEST(Csv, QuotedFieldsAndLineEndings) {
  auto rows = csv::parse("a,\"b,c\",\"d\"\"e\"\r\n\nx,y,z\n");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].fields, (std::vector<std::string>{"a", "b,c", "d\"e"}));
  EXPECT_EQ(rows[1].fields, (std::vector<std::string>{"x", "y", "z"}));
  EXPECT_EQ(rows[1].line, 3u);
}

TEST(Csv, MalformedRowDoesNotAbortTheRest) {
  auto rows = csv::parse("a,b\n\"open,b\nc,d\n");
  ASSERT_GE(rows.size(), 2u);
  EXPECT_FALSE(rows.front().malformed);
  EXPECT_EQ(rows.back().fields, (std::vector<std::string>{"c", "d"}));
  bool saw_malformed = false;
  for (const auto& r : rows) saw_malformed = saw_malformed || r.malformed;
  EXPECT_TRUE(saw_malformed);
}

TEST(Csv, EscapeRoundTrips) {
  const std::vector<std::string> fields{"plain", "with,comma", "with \"quote\"", "multi\nline"};
  auto rows = csv::parse(csv::join_row(fields) + "\n");
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].fields, fields);
}

TEST(Utf8, Validation) {
  EXPECT_TRUE(is_valid_utf8("plain ascii"));
  EXPECT_TRUE(is_valid_utf8("Kaiserslautern \xc3\xa4"));
  EXPECT_FALSE(is_valid_utf8("\xff\xfe"));
  EXPECT_FALSE(is_valid_utf8("\xc3"));
}

TEST(Hashing, KnownDigestAndConstantTimeCompare) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_TRUE(constant_time_equal("token", "token"));
  EXPECT_FALSE(constant_time_equal("token", "tokem"));
  EXPECT_FALSE(constant_time_equal("token", "token2"));
  EXPECT_FALSE(constant_time_equal("", "x"));
}

}  // namespace
}  // namespace spcc
