#ifndef SHABC_FACTORED_HPP
#define SHABC_FACTORED_HPP

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace shabc {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ValidationError : Error {
  using Error::Error;
};
struct InternalError : Error {
  using Error::Error;
};

// Certified primality: deterministic for n < 2^64 (Miller-Rabin with a proven
// base set), BPSW + 64 Miller-Rabin rounds above.
bool is_prime(const mpz_class& n);

struct PrimePower {
  mpz_class p;
  unsigned e = 1;
  bool operator==(const PrimePower& o) const { return p == o.p && e == o.e; }
};

// Nonzero integer kept in fully factored form: sign and prime powers with
// strictly increasing primes, plus the cached product.  The cache is checked
// against the factors whenever a value is assembled from parts.
class FactoredInteger {
 public:
  FactoredInteger() : sign_(1), value_(1) {}  // the unit 1
  FactoredInteger(int sign, std::vector<PrimePower> factors);

  static FactoredInteger one() { return FactoredInteger(); }
  static FactoredInteger from_prime(const mpz_class& p, unsigned e = 1);

  int sign() const { return sign_; }
  const std::vector<PrimePower>& factors() const { return factors_; }
  const mpz_class& value() const { return value_; }
  mpz_class abs_value() const { return sign_ < 0 ? mpz_class(-value_) : value_; }
  bool is_unit() const { return factors_.empty(); }

  unsigned valuation(const mpz_class& p) const;
  bool divides(const mpz_class& p) const { return valuation(p) > 0; }
  bool square_free() const;

  FactoredInteger operator*(const FactoredInteger& o) const;
  FactoredInteger pow(unsigned e) const;
  FactoredInteger negate() const;
  FactoredInteger abs() const;
  // Exact division; throws ValidationError when o does not divide *this.
  FactoredInteger divide_exact(const FactoredInteger& o) const;

  static FactoredInteger gcd(const FactoredInteger& a, const FactoredInteger& b);
  FactoredInteger radical() const;  // positive, exponents dropped to 1

  // "2^2 11", "-3 5^2", "1".
  std::string str() const;

  bool operator==(const FactoredInteger& o) const {
    return sign_ == o.sign_ && factors_ == o.factors_;
  }
  bool operator!=(const FactoredInteger& o) const { return !(*this == o); }

 private:
  void rebuild_and_check(const mpz_class* expected);
  int sign_;
  std::vector<PrimePower> factors_;
  mpz_class value_;
};

// Grammar: optional '-', then prime powers "p^e" or "p" separated by
// whitespace or '*' or the middle dot; "1" and "-1" are the units.  Primes
// may arrive unordered; repeats of the same prime are an error.
FactoredInteger parse_factored(std::string_view text);

}  // namespace shabc

#endif
