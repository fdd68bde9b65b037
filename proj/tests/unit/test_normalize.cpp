#include "doctest.h"

#include "canary/normalize.hpp"
#include "canary/text.hpp"

using namespace canary;

TEST_CASE("phone renderings normalize to one form") {
  const char* renderings[] = {
      "555-123-4567",     "555.123.4567",     "555 123 4567",     "(555) 123-4567",  "(555)123-4567",
      "(555) 123 4567",   "(555) 123.4567",   "5551234567",       "+1 555-123-4567", "+1 (555) 123-4567",
      "+15551234567",     "+1 555 123 4567",  "+1.555.123.4567",  "1-555-123-4567",  "1 555 123 4567",
      "1 (555) 123-4567", "1.555.123.4567",   "+1-555-123-4567",  "+1 (555)123-4567", "+1 5551234567",
  };
  int n = 0;
  for (const char* r : renderings) {
    CAPTURE(r);
    CHECK(normalize_response(std::string("Call ") + r + " today") == "call 555-123-4567 today");
    ++n;
  }
  CHECK(n == 20);
  CHECK(normalize_response("id 55512345678") == "id 55512345678");
  CHECK(normalize_response("dial 123-4567") == "dial 123-4567");
}

TEST_CASE("dates normalize to ISO form") {
  CHECK(normalize_response("March 5, 2024") == "2024-03-05");
  CHECK(normalize_response("5 Mar 2024") == "2024-03-05");
  CHECK(normalize_response("2024/03/05") == "2024-03-05");
  CHECK(normalize_response("03/05/2024") == "2024-03-05");
  CHECK(normalize_response("05.03.2024") == "2024-03-05");
  CHECK(normalize_response("2024-3-5") == "2024-03-05");
  CHECK(normalize_response("opened on September 30, 1987.") == "opened on 1987-09-30.");
  CHECK(normalize_response("February 30, 2024") != "2024-02-30");
}

TEST_CASE("thousands separators and whitespace") {
  CHECK(normalize_response("It holds 1,234,567 items") == "it holds 1234567 items");
  CHECK(normalize_response("  Alpha \n\t Beta ") == "alpha beta");
  CHECK(normalize_response("a, b, 1, 2") == "a, b, 1, 2");
}

TEST_CASE("normalization is idempotent") {
  Rng rng(3);
  const std::vector<std::string> parts{"March",  "5,",   "2024",  "(555)", "123-4567", "1,234", ",567", "+1",
                                       "Ash Vale", "  ", "\n",    "03/05/2024", "5551234567", "1", ".", "-",
                                       "Mar",    "05.03.2024", "2024/3/5", "apr", "30", "1999,", "1-"};
  for (int trial = 0; trial < 5000; ++trial) {
    std::string s;
    auto n = 1 + rng.below(8);
    for (std::uint64_t i = 0; i < n; ++i) {
      s += parts[rng.below(parts.size())];
      if (rng.chance(0.7)) s += ' ';
    }
    auto once = normalize_response(s);
    CAPTURE(s);
    REQUIRE(normalize_response(once) == once);
  }
}
