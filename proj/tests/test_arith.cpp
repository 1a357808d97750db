#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <doctest.h>

#include "shabc/bigreal.hpp"
#include "shabc/factored.hpp"
#include "shabc/factorize.hpp"

#include <random>
#include <string>
#include <vector>

using namespace shabc;

namespace {

mpz_class zpow(unsigned long base, unsigned long e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), base, e);
  return r;
}

double rel_err(const BigReal& got, double want) {
  return std::abs(got.to_double() - want) / std::abs(want);
}

}  // namespace

TEST_CASE("parse_factored basic forms") {
  CHECK(parse_factored("2^2 11").value() == 44);
  CHECK(parse_factored("1").value() == 1);
  CHECK(parse_factored("-1").value() == -1);
  CHECK(parse_factored("-3 5^2").value() == -75);
  CHECK(parse_factored("2*3*5").value() == 30);

  // Independent product: 3^19 11^4 463^5.
  mpz_class want = zpow(3, 19) * zpow(11, 4) * zpow(463, 5);
  CHECK(parse_factored("3^19 11^4 463^5").value() == want);

  // Unordered primes are accepted and sorted.
  FactoredInteger f = parse_factored("11 2^2");
  CHECK(f.value() == 44);
  CHECK(f.factors().front().p == 2);
}

TEST_CASE("parse_factored rejections") {
  CHECK_THROWS_AS(parse_factored("4"), ValidationError);        // non-prime base
  CHECK_THROWS_AS(parse_factored("2 2"), ValidationError);      // repeated prime
  CHECK_THROWS_AS(parse_factored("2^"), ValidationError);       // malformed
  CHECK_THROWS_AS(parse_factored(""), ValidationError);
  CHECK_THROWS_AS(parse_factored("2^0"), ValidationError);      // exponent >= 1
}

TEST_CASE("factored render round-trip") {
  for (const char* s : {"2^2 11", "1", "-1", "3^19 11^4 463^5", "-2 7^3"}) {
    FactoredInteger f = parse_factored(s);
    CHECK(parse_factored(f.str()) == f);
  }
  CHECK(parse_factored("2^2 11").str() == "2^2 11");
}

TEST_CASE("factored arithmetic") {
  FactoredInteger a = parse_factored("2^2 11");
  FactoredInteger b = parse_factored("2 3");
  CHECK((a * b).value() == 264);
  CHECK(a.pow(2).value() == 44 * 44);
  CHECK(a.negate().value() == -44);
  CHECK(a.negate().abs() == a);
  CHECK(a.valuation(2) == 2);
  CHECK(a.valuation(3) == 0);
  CHECK(FactoredInteger::gcd(a, b).value() == 2);
  CHECK(a.radical().value() == 22);
  CHECK(a.square_free() == false);
  CHECK(parse_factored("2 3 5").square_free() == true);
  CHECK(a.divide_exact(parse_factored("2")).value() == 22);
  CHECK_THROWS_AS(a.divide_exact(b), ValidationError);  // 3 does not divide 44
}

TEST_CASE("is_prime certified") {
  CHECK(is_prime(2));
  CHECK(is_prime(3));
  CHECK_FALSE(is_prime(1));
  CHECK_FALSE(is_prime(0));
  CHECK_FALSE(is_prime(561));   // Carmichael
  CHECK_FALSE(is_prime(2047));  // strong pseudoprime base 2
  CHECK(is_prime(mpz_class("2305843009213693951")));  // 2^61 - 1
  CHECK(is_prime(1048583));     // 2^20 + 7
}

TEST_CASE("factorize known values") {
  // 5^9 139^6 - 44 = 3^2 13^10 17 151 4423
  mpz_class b1 = zpow(5, 9) * zpow(139, 6) - 44;
  FactoredInteger f1 = factorize(b1);
  CHECK(f1 == parse_factored("3^2 13^10 17 151 4423"));

  // 3^19 11^4 463^5 - 5^4 19^13 103 = 2^13 13^9 29 2441 7673^2
  mpz_class b3 = zpow(3, 19) * zpow(11, 4) * zpow(463, 5) -
                 zpow(5, 4) * zpow(19, 13) * 103;
  CHECK(factorize(b3) == parse_factored("2^13 13^9 29 2441 7673^2"));

  CHECK(factorize(72) == parse_factored("2^3 3^2"));
  CHECK(factorize(-72).value() == -72);
  CHECK(factorize(1).is_unit());
  CHECK_THROWS_AS(factorize(0), ValidationError);
}

TEST_CASE("factorize randomized round-trip") {
  std::mt19937_64 rng(7);
  const auto& ps = primes_below(100000);
  const std::vector<unsigned long> big{999999937ul, 999999893ul, 715827883ul};
  for (int trial = 0; trial < 30; ++trial) {
    mpz_class n = 1;
    int parts = 1 + static_cast<int>(rng() % 4);
    for (int i = 0; i < parts; ++i)
      n *= ps[rng() % ps.size()];
    if (trial % 3 == 0) n *= big[rng() % big.size()];
    FactoredInteger f = factorize(n);
    CHECK(f.value() == n);
    mpz_class prod = f.sign();
    for (const auto& pp : f.factors()) {
      CHECK(is_prime(pp.p));
      for (unsigned e = 0; e < pp.e; ++e) prod *= pp.p;
    }
    CHECK(prod == n);
  }
}

TEST_CASE("factorize budget failure is clean") {
  // Product of two 25-digit primes; a starved budget must fail with the
  // composite cofactor, not loop.
  mpz_class p("1000000000000000000000000000057");
  mpz_class q("1000000000000000000000000000099");
  REQUIRE(is_prime(p));
  REQUIRE(is_prime(q));
  FactorBudget tiny;
  tiny.trial_bound = 100;
  tiny.rho_iterations = 50;
  try {
    factorize(p * q, tiny);
    FAIL("expected FactorizationError");
  } catch (const FactorizationError& e) {
    CHECK(e.cofactor % p == 0);
  }
}

TEST_CASE("primes_below") {
  // The cache is shared and may hold more than requested; the returned list
  // must cover the bound and begin with the primes in order.
  const auto& ps = primes_below(30);
  std::vector<uint32_t> want{2, 3, 5, 7, 11, 13, 17, 19, 23, 29};
  REQUIRE(ps.size() >= want.size());
  CHECK(std::vector<uint32_t>(ps.begin(), ps.begin() + want.size()) == want);
  CHECK(std::is_sorted(ps.begin(), ps.end()));
}

TEST_CASE("bigreal basics and rendering") {
  BigReal x(std::string("37.9640"), 40);
  CHECK(x.str_sig_fixed(6) == "37.9640");
  BigReal y(std::string("0.0042658002"), 40);
  CHECK(y.str_sig_fixed(6) == "0.00426580");
  BigReal g(std::string("96.29391"), 40);
  CHECK(g.str_sig_fixed(6) == "96.2939");

  CHECK(BigReal(2L).sqrt().to_double() == doctest::Approx(std::sqrt(2.0)));
  CHECK(BigReal(1L).exp().to_double() == doctest::Approx(std::exp(1.0)));
  CHECK(BigReal(10L).log().to_double() == doctest::Approx(std::log(10.0)));
  CHECK(BigReal::pi(40).to_double() == doctest::Approx(3.14159265358979));
  CHECK(BigReal(-3L).abs().to_double() == 3.0);
  CHECK(BigReal(2.5).to_ll_rounded() == 2);  // ties-to-even is fine: 2.5 -> 2
  CHECK(BigReal(7L) > BigReal(3L));
  CHECK(BigReal(0L).is_zero());
  CHECK(BigReal().is_nan());
  CHECK_THROWS_AS(BigReal(-1L).sqrt(), std::domain_error);
  CHECK_THROWS_AS(BigReal(0L).log(), std::domain_error);
}

TEST_CASE("bigreal precision is never silently reduced") {
  BigReal wide(1L, 60);
  BigReal narrow(1L, 20);
  BigReal sum = wide + narrow;
  CHECK(sum.precision_bits() == wide.precision_bits());
  BigReal sum2 = narrow + wide;
  CHECK(sum2.precision_bits() == wide.precision_bits());
}

TEST_CASE("bigreal hex serialization round-trips bit-identically") {
  BigReal v = BigReal::pi(47) / BigReal(7L, 47);
  BigReal back = BigReal::from_hex(v.hex());
  CHECK(back == v);
  CHECK(back.precision_bits() == v.precision_bits());
  BigReal neg = -v;
  CHECK(BigReal::from_hex(neg.hex()) == neg);
}

TEST_CASE("agm fixed point and symmetry") {
  BigReal one(1L, 40);
  CHECK(agm(one, one).to_double() == 1.0);
  BigReal a(3L, 40), b(7L, 40);
  CHECK((agm(a, b) - agm(b, a)).abs().to_double() < 1e-35);
  // Homogeneity: agm(kx, ky) = k agm(x, y).
  BigReal k(5L, 40);
  BigReal lhs = agm(a * k, b * k);
  BigReal rhs = agm(a, b) * k;
  CHECK(((lhs - rhs) / rhs).abs().to_double() < 1e-35);
  // Mean property.
  BigReal m = agm(a, b);
  CHECK(m > a);
  CHECK(m < b);
  CHECK_THROWS_AS(agm(BigReal(0L, 40), one), std::domain_error);
  // Quadratic convergence: far fewer iterations than digits.
  AgmResult r = agm_iterated(BigReal(1L, 40), BigReal(std::string("0.5"), 40));
  CHECK(r.iterations <= 40);
}

TEST_CASE("agm matches fixed oracle values") {
  // AGM(1, sqrt(b/c)) for the a=5^4 19^13 103, c=3^19 11^4 463^5 relation.
  mpz_class c3 = zpow(3, 19) * zpow(11, 4) * zpow(463, 5);
  mpz_class a3 = zpow(5, 4) * zpow(19, 13) * 103;
  mpz_class b3 = c3 - a3;
  unsigned d = 40;
  BigReal alpha = (BigReal(b3, d) / BigReal(c3, d)).sqrt();
  CHECK(rel_err(agm(BigReal(1L, d), alpha), 0.9999981307) < 1e-8);

  // Same for a=2^5 67^8 107 22381, c=3^22 7^14 43 83.
  mpz_class c4 = zpow(3, 22) * zpow(7, 14) * 43 * 83;
  mpz_class a4 = zpow(2, 5) * zpow(67, 8) * 107 * mpz_class(22381);
  BigReal alpha4 = (BigReal(c4 - a4, d) / BigReal(c4, d)).sqrt();
  CHECK(rel_err(agm(BigReal(1L, d), alpha4), 0.9998975716) < 1e-8);

  // sqrt(a/c) variant used by negative twists on the same relation.
  BigReal alpha6 = (BigReal(a3, d) / BigReal(c3, d)).sqrt();
  CHECK(rel_err(agm(BigReal(1L, d), alpha6), 0.215527816) < 1e-8);

  // a=7^3 against c=2^4 3 11 13^2 19^5.
  mpz_class cw = zpow(2, 4) * 3 * 11 * zpow(13, 2) * zpow(19, 5);
  BigReal alphaw = (BigReal(cw - 343, d) / BigReal(cw, d)).sqrt();
  CHECK(rel_err(agm(BigReal(1L, d), alphaw), 0.999999999612) < 1e-9);

  // a=5^14 19 against c=11^7 37^2 353.
  mpz_class cn = zpow(11, 7) * zpow(37, 2) * 353;
  mpz_class an = zpow(5, 14) * 19;
  BigReal alphan = (BigReal(cn - an, d) / BigReal(cn, d)).sqrt();
  CHECK(rel_err(agm(BigReal(1L, d), alphan), 0.996909518624) < 1e-9);
}

TEST_CASE("agm at reduced precision agrees to the smaller precision") {
  BigReal x(std::string("0.37"), 40), one40(1L, 40);
  BigReal x20(std::string("0.37"), 20), one20(1L, 20);
  BigReal full = agm(one40, x);
  BigReal half = agm(one20, x20);
  CHECK((full - half).abs().to_double() < 1e-18);
}
