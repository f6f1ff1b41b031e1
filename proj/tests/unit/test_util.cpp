#include "slrkit/errors.hpp"
#include "slrkit/unicode.hpp"
#include "slrkit/util.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <atomic>

using namespace slrkit;

TEST_CASE("sha256 of known vectors") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("string helpers") {
  CHECK(trim("  a b \t\n") == "a b");
  CHECK(split("a,,b", ',') == std::vector<std::string>{"a", "", "b"});
  CHECK(split_list(" a ; b,, c ") == std::vector<std::string>{"a", "b", "c"});
  CHECK(join({"x", "y"}, "-") == "x-y");
  CHECK(starts_with_ci("HTTPS://doi", "https://"));
  CHECK(format_fixed(0.123456789, 6) == "0.123457");
  CHECK(format_fixed(2.0, 2) == "2.00");
}

TEST_CASE("csv quoting round-trips through the parser") {
  const std::vector<std::string> fields{"plain", "with,comma", "with \"quote\"", "multi\nline", ""};
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) line += (i ? "," : "") + csv_field(fields[i]);
  const auto rows = parse_csv(line + "\r\nx,y\n");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == fields);
  CHECK(rows[1] == std::vector<std::string>{"x", "y"});
  CHECK_THROWS_AS(parse_csv("\"open"), Error);
}

TEST_CASE("iso timestamps") {
  CHECK(is_iso8601_utc("2024-03-01T10:00:00Z"));
  CHECK(is_iso8601_utc(utc_now_iso8601()));
  CHECK_FALSE(is_iso8601_utc("2024-03-01 10:00:00"));
  CHECK_FALSE(is_iso8601_utc("2024-13-01T10:00:00Z"));
}

TEST_CASE("parallel_for visits every index once") {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; }, 4);
  for (const auto& h : hits) CHECK(h.load() == 1);
}

TEST_CASE("files") {
  testing::TempDir dir;
  const auto p = dir.path() / "a" / "b.txt";
  write_file(p, "caf\xc3\xa9");
  CHECK(read_utf8_file(p) == "caf\xc3\xa9");
  write_file(p, "\xff\xfe");
  CHECK_THROWS_AS(read_utf8_file(p), IngestError);
  CHECK_THROWS_AS(read_file(dir.path() / "missing"), IngestError);
}

TEST_CASE("unicode normalization") {
  CHECK(unicode::nfkc("\xef\xac\x81") == "fi");  // ligature
  CHECK(unicode::lower("\xc3\x84RGER") == "\xc3\xa4rger");
  CHECK(unicode::to_ascii("M\xc3\xbcller") == "Muller");
  CHECK(unicode::length("\xc3\xa4" "b") == 2);
  CHECK(unicode::is_valid_utf8("ok"));
  CHECK_FALSE(unicode::is_valid_utf8("\xc3"));
}
