#include "torivec/ioutil.h"

#include <cstdio>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "test_util.h"

using namespace torivec;

TEST_CASE("format_double is shortest round-trip") {
  CHECK(format_double(0.0) == "0");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(0.07) == "0.07");
  CHECK(format_double(-2.5) == "-2.5");
  const double third = 1.0 / 3.0;
  double back = 0.0;
  REQUIRE(parse_double(format_double(third), back));
  CHECK(back == third);  // bitwise round trip
  REQUIRE(parse_double(format_double(1e-300), back));
  CHECK(back == 1e-300);
}

TEST_CASE("parse_double rejects partial and empty fields") {
  double v = 0.0;
  CHECK(parse_double("3.25", v));
  CHECK(v == 3.25);
  CHECK_FALSE(parse_double("", v));
  CHECK_FALSE(parse_double("1.2x", v));
  CHECK_FALSE(parse_double("nanabc", v));
  CHECK(parse_double("-0.5", v));
  CHECK(v == -0.5);
}

TEST_CASE("split_csv_line keeps empty fields") {
  auto f = split_csv_line("a,b,c");
  REQUIRE(f.size() == 3);
  CHECK(f[0] == "a");
  CHECK(f[2] == "c");

  f = split_csv_line("1.5,,0.9");
  REQUIRE(f.size() == 3);
  CHECK(f[1].empty());

  f = split_csv_line("x,");
  REQUIRE(f.size() == 2);
  CHECK(f[1].empty());

  f = split_csv_line("");
  REQUIRE(f.size() == 1);
  CHECK(f[0].empty());
}

TEST_CASE("crc32 matches the standard check value") {
  const std::string check = "123456789";
  CHECK(crc32(check.data(), check.size()) == 0xCBF43926u);  // published CRC-32 test vector
  CHECK(crc32("", 0) == 0u);
}

TEST_CASE("text file round trip and file crc") {
  const std::string dir = testutil::make_temp_dir("ioutil");
  const std::string path = dir + "/x.txt";
  const std::string content = "line1\nline2\n";
  write_text_file(path, content);
  CHECK(read_text_file(path) == content);
  CHECK(crc32_file(path) == crc32(content.data(), content.size()));
  CHECK_THROWS(read_text_file(dir + "/missing.txt"));
}

TEST_CASE("path helpers") {
  CHECK(path_stem("a/b/song.csv") == "song");
  CHECK(path_stem("song.csv") == "song");
  CHECK(path_stem("a/b/noext") == "noext");
  CHECK(resolve_relative("dir/manifest.jsonl", "contours/x.csv") == "dir/contours/x.csv");
  CHECK(resolve_relative("manifest.jsonl", "x.csv") == "x.csv");
  CHECK(resolve_relative("dir/manifest.jsonl", "/abs/x.csv") == "/abs/x.csv");
}
