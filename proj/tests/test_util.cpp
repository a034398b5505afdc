#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "stableval/errors.hpp"
#include "stableval/util.hpp"
#include "support/tmpdir.hpp"

using namespace stableval;

TEST_SUITE("util") {

TEST_CASE("format_fixed rounds half up at one decimal") {
  CHECK(format_fixed(23.33, 1) == "23.3");
  CHECK(format_fixed(23.35, 1) == "23.4");
  CHECK(format_fixed(0.0, 1) == "0.0");
  CHECK(format_fixed(99.99, 1) == "100.0");
  CHECK(format_fixed(31.249999999, 1) == "31.2");
  CHECK(format_fixed(31.25, 1) == "31.3");
}

TEST_CASE("format_fixed honors the stored binary value at ties") {
  // 23.745 is stored slightly above the printed tie, so it bumps up
  CHECK(format_fixed(23.745, 2) == "23.75");
  // 2.675 is stored slightly below it, so it must not
  CHECK(format_fixed(2.675, 2) == "2.67");
  // 68.75 is exactly representable and sits on the tie
  CHECK(format_fixed(68.75, 1) == "68.8");
}

TEST_CASE("format_fixed handles negatives away from zero") {
  CHECK(format_fixed(-1.25, 1) == "-1.3");
  CHECK(format_fixed(-0.04, 1) == "0.0");
  CHECK(format_fixed(-0.0, 1) == "0.0");
  CHECK(format_fixed(-2.5, 0) == "-3");
}

TEST_CASE("format_fixed widths and guards") {
  CHECK(format_fixed(5.0, 0) == "5");
  CHECK(format_fixed(5.0, 3) == "5.000");
  CHECK(format_fixed(1.644853626, 6) == "1.644854");
  CHECK(format_fixed(0.05, 2) == "0.05");
  CHECK_THROWS_AS(format_fixed(1.0, -1), validation_error);
  CHECK_THROWS_AS(format_fixed(1.0, 10), validation_error);
  CHECK_THROWS_AS(format_fixed(std::nan(""), 1), validation_error);
}

TEST_CASE("format1 is the one decimal shorthand") {
  CHECK(format1(31.18) == "31.2");
  CHECK(format1(54.35) == "54.4");
}

TEST_CASE("fnv1a64 matches published vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("fnv1a64 chains through the seed overload") {
  const uint64_t h = fnv1a64("foo");
  CHECK(fnv1a64(h, "bar") == fnv1a64("foobar"));
}

TEST_CASE("to_hex is fixed width lowercase") {
  CHECK(to_hex(0) == "0000000000000000");
  CHECK(to_hex(0xabcdef0123456789ULL) == "abcdef0123456789");
}

TEST_CASE("trim strips surrounding whitespace only") {
  CHECK(trim("  a b  ") == "a b");
  CHECK(trim("\t\r\n x\n") == "x");
  CHECK(trim("") == "");
  CHECK(trim("   ") == "");
}

TEST_CASE("split_csv_line handles quotes and CRLF") {
  CHECK(split_csv_line("a,b,c") == std::vector<std::string>{"a", "b", "c"});
  CHECK(split_csv_line("a,,c") == std::vector<std::string>{"a", "", "c"});
  CHECK(split_csv_line("\"a,b\",c\r") == std::vector<std::string>{"a,b", "c"});
  CHECK(split_csv_line("\"he said \"\"hi\"\"\",x") ==
        std::vector<std::string>{"he said \"hi\"", "x"});
  CHECK(split_csv_line("") == std::vector<std::string>{""});
}

TEST_CASE("csv_escape quotes only when needed") {
  CHECK(csv_escape("plain") == "plain");
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(split_csv_line(csv_escape("x,\"y\"")).at(0) == "x,\"y\"");
}

TEST_CASE("write_file_atomic then read_file round trips") {
  testsup::tmpdir dir;
  const std::string path = dir.str("nested/out.txt");
  std::filesystem::create_directories(dir.path() / "nested");
  write_file_atomic(path, "line one\nline two\n");
  CHECK(read_file(path) == "line one\nline two\n");
  write_file_atomic(path, "replaced");
  CHECK(read_file(path) == "replaced");
  CHECK_THROWS_AS(read_file(dir.str("missing.txt")), io_error);
}

TEST_CASE("now_ms is monotone enough to order events") {
  const int64_t a = now_ms();
  const int64_t b = now_ms();
  CHECK(b >= a);
  CHECK(a > 1000000000000LL);
}

}  // TEST_SUITE
