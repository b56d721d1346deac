#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <string>

#include "swv/csv.hpp"

using namespace swv;

TEST_CASE("split_line handles quoting, escapes, and CR") {
  CHECK(csv::split_line("a,b,c") == std::vector<std::string>{"a", "b", "c"});
  CHECK(csv::split_line("a,,c") == std::vector<std::string>{"a", "", "c"});
  CHECK(csv::split_line("\"a,b\",c") == std::vector<std::string>{"a,b", "c"});
  CHECK(csv::split_line("\"he said \"\"hi\"\"\",x") ==
        std::vector<std::string>{"he said \"hi\"", "x"});
  CHECK(csv::split_line("a,b\r") == std::vector<std::string>{"a", "b"});
  CHECK(csv::split_line("") == std::vector<std::string>{""});
}

TEST_CASE("quote round-trips awkward fields") {
  for (const std::string s : {"plain", "with,comma", "with\"quote", "both,\"x\""}) {
    CHECK(csv::split_line(csv::quote(s)).at(0) == s);
  }
}

TEST_CASE("write_file then read_file round-trips") {
  const auto path = (std::filesystem::temp_directory_path() / "swv_csv_test.csv").string();
  csv::write_file(path, {"id", "note"}, {{"1", "hello, world"}, {"2", "say \"hi\""}});
  const csv::Table t = csv::read_file(path);
  REQUIRE(t.header == std::vector<std::string>{"id", "note"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][1] == "hello, world");
  CHECK(t.rows[1][1] == "say \"hi\"");
  CHECK(t.column("note") == 1);
  CHECK(t.column("missing") == -1);
  std::remove(path.c_str());
}

TEST_CASE("read_file errors on missing or empty files") {
  CHECK_THROWS_AS(csv::read_file("/nonexistent/file.csv"), ArgumentError);
  const auto path = (std::filesystem::temp_directory_path() / "swv_csv_empty.csv").string();
  { std::ofstream(path); }
  CHECK_THROWS_AS(csv::read_file(path), ArgumentError);
  std::remove(path.c_str());
}

TEST_CASE("format_double round-trips doubles exactly") {
  for (double v : {0.1, -1.0 / 3.0, 1e-17, 123456.789, 2.0}) {
    CHECK(std::stod(csv::format_double(v)) == v);
  }
}
