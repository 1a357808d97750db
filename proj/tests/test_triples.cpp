#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <shabc/triples.hpp>

#include <sstream>
#include <string>

using namespace shabc;

namespace {

AbcTriple triple_of(const std::string& a, const std::string& c,
                    const std::string& b = "") {
  std::optional<FactoredInteger> bk;
  if (!b.empty()) bk = parse_factored(b);
  return make_triple(parse_factored(a), parse_factored(c), bk);
}

}  // namespace

TEST_CASE("make_triple assembles fields and the radical") {
  AbcTriple t = triple_of("1", "3^2");
  CHECK(t.a.value() == 1);
  CHECK(t.b.value() == 8);
  CHECK(t.c.value() == 9);
  CHECK(t.rad.value() == 6);
  CHECK(t.str() == "a=1  b=2^3  c=3^2");
}

TEST_CASE("make_triple accepts a pre-factored middle term") {
  AbcTriple t = triple_of("7^3", "2^4 3 11 13^2 19^5", "5^13 181");
  CHECK(t.b.value() == mpz_class("220947265625"));
  CHECK(t.a.value() + t.b.value() == t.c.value());
  CHECK(t.rad.value() == 103273170);
}

TEST_CASE("make_triple validation") {
  // Sign and ordering constraints.
  CHECK_THROWS_AS(triple_of("-7", "2^4 3"), ValidationError);
  CHECK_THROWS_AS(triple_of("11", "7"), ValidationError);       // c <= a
  CHECK_THROWS_AS(triple_of("3^2", "3^2"), ValidationError);    // b = 0
  CHECK_THROWS_AS(triple_of("5", "3^2"), ValidationError);      // a >= b
  // Coprimality of a and c.
  CHECK_THROWS_AS(triple_of("2", "2^3"), ValidationError);
  // Supplied b must equal c - a.
  CHECK_THROWS_AS(triple_of("1", "3^2", "7"), ValidationError);
  CHECK_THROWS_AS(triple_of("1", "3^2", "2^2"), ValidationError);
}

TEST_CASE("radical_of flattens exponents across parts") {
  FactoredInteger x = parse_factored("2^3 3^2");
  FactoredInteger y = parse_factored("3 5^4");
  CHECK(radical_of({&x}).value() == 6);
  CHECK(radical_of({&x, &y}).value() == 30);
}

TEST_CASE("radicals of the benchmark triples") {
  CHECK(triple_of("2^2 11", "5^9 139^6").rad.value() ==
        mpz_class("6770408926710"));
  CHECK(triple_of("5^4 19^13 103", "3^19 11^4 463^5").rad.value() ==
        mpz_class("2111349279492568830"));
  CHECK(triple_of("2^5 67^8 107 22381", "3^22 7^14 43 83").rad.value() ==
        mpz_class("2249854771815161490"));
  CHECK(triple_of("29^4 2213^2", "2^9 5^16 11^9 79").rad.value() ==
        mpz_class("655240793892471930"));
  CHECK(triple_of("29", "2 17216879 257390962660901").rad.value() ==
        mpz_class("771075616409767595348346"));
  CHECK(triple_of("5^14 19", "11^7 37^2 353").rad.value() == 573247290);
}

TEST_CASE("quality and merit of the benchmark triples") {
  struct Row {
    const char* a;
    const char* c;
    double lambda, merit;
  };
  const Row rows[] = {
      {"2^2 11", "5^9 139^6", 1.4924319, 24.256344},
      {"5^4 19^13 103", "3^19 11^4 463^5", 1.4493543, 31.883256},
      {"2^5 67^8 107 22381", "3^22 7^14 43 83", 1.4102206, 26.622447},
      {"29^4 2213^2", "2^9 5^16 11^9 79", 1.4123476, 25.907308},
      {"1", "3^2", 1.2262944, 0.053511035},
  };
  for (const Row& r : rows) {
    CAPTURE(r.c);
    AbcTriple t = triple_of(r.a, r.c);
    CHECK(lambda_quality(t).to_double() ==
          doctest::Approx(r.lambda).epsilon(1e-7));
    CHECK(merit(t).to_double() == doctest::Approx(r.merit).epsilon(1e-7));
  }
}

TEST_CASE("middle terms of the benchmark triples factor as expected") {
  CHECK(triple_of("2^2 11", "5^9 139^6").b.str() == "3^2 13^10 17 151 4423");
  CHECK(triple_of("5^4 19^13 103", "3^19 11^4 463^5").b.str() ==
        "2^13 13^9 29 2441 7673^2");
  CHECK(triple_of("29", "2 17216879 257390962660901").b.str() == "3^46");
}

TEST_CASE("load_triple_list parses fields in any order and skips comments") {
  std::istringstream in(
      "# header comment\n"
      "\n"
      "a=7^3 c=2^4 3 11 13^2 19^5 b=5^13 181\n"
      "c=3^2 a=1   # inline comment\n"
      "b=2^5 3 7^13 a=5^14 19 c=11^7 37^2 353\n");
  TripleList lst = load_triple_list(in);
  REQUIRE(lst.triples.size() == 3);
  CHECK(lst.issues.empty());
  CHECK(lst.triples[0].a.value() == 343);
  CHECK(lst.triples[1].c.value() == 9);
  CHECK(lst.triples[2].b.value() == parse_factored("2^5 3 7^13").value());
}

TEST_CASE("load_triple_list collects invalid lines with their numbers") {
  std::istringstream in(
      "a=1 c=3^2\n"
      "d=3\n"
      "a=1\n"
      "a=4 c=3^2\n"
      "a=1 c=3^2 b=7\n"
      "a=2 c=2^3\n"
      "a=1 a=1 c=3^2\n");
  TripleList lst = load_triple_list(in);
  CHECK(lst.triples.size() == 1);
  REQUIRE(lst.issues.size() == 6);
  CHECK(lst.issues[0].line == 2);  // unknown field
  CHECK(lst.issues[1].line == 3);  // missing c=
  CHECK(lst.issues[2].line == 4);  // 4 is not in factored form
  CHECK(lst.issues[3].line == 5);  // b mismatch
  CHECK(lst.issues[4].line == 6);  // not coprime
  CHECK(lst.issues[5].line == 7);  // duplicate field
  CHECK(lst.issues[0].message.find("expected a=, b= or c=") !=
        std::string::npos);
}

TEST_CASE("load_triple_list demands at least one valid triple") {
  std::istringstream empty("");
  CHECK_THROWS_AS(load_triple_list(empty), ValidationError);
  std::istringstream comments("# nothing here\n\n# still nothing\n");
  CHECK_THROWS_AS(load_triple_list(comments), ValidationError);
  std::istringstream bad("a=1\n");
  CHECK_THROWS_AS(load_triple_list(bad), ValidationError);
}

TEST_CASE("bundled triple list loads cleanly") {
  TripleList lst = load_triple_file(std::string(SHABC_SOURCE_DIR) +
                                    "/data/triples.txt");
  CHECK(lst.issues.empty());
  REQUIRE(lst.triples.size() >= 6);
  CHECK(lst.triples[0].a.value() == 343);
  CHECK(lst.triples[0].rad.value() == 103273170);
  for (const AbcTriple& t : lst.triples) {
    CAPTURE(t.str());
    CHECK(t.a.value() + t.b.value() == t.c.value());
    CHECK(t.a.value() < t.b.value());
    CHECK(gcd(t.a.value(), t.c.value()) == 1);
  }
  CHECK_THROWS_AS(load_triple_file("/nonexistent/triples.txt"),
                  ValidationError);
}
