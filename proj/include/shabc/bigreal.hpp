#ifndef SHABC_BIGREAL_HPP
#define SHABC_BIGREAL_HPP

#include <gmpxx.h>
#include <mpfr.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace shabc {

// Arbitrary-precision real backed by MPFR.  Every value carries its own
// precision; arithmetic rounds to the wider of the two operands, so precision
// is never silently reduced.  All operations use round-to-nearest.
class BigReal {
 public:
  static constexpr unsigned kMinDigits = 10;
  static constexpr unsigned kDefaultDigits = 40;

  // Global default used by constructors that do not name a precision.
  static void set_default_digits(unsigned digits);
  static unsigned default_digits();
  static mpfr_prec_t bits_for_digits(unsigned digits);

  BigReal();                                       // NaN at default precision
  explicit BigReal(long v, unsigned digits = 0);   // digits==0: default
  explicit BigReal(unsigned long v, unsigned digits = 0);
  explicit BigReal(double v, unsigned digits = 0);
  explicit BigReal(const mpz_class& v, unsigned digits = 0);
  explicit BigReal(const std::string& decimal, unsigned digits = 0);

  BigReal(const BigReal& o);
  BigReal(BigReal&& o) noexcept;
  BigReal& operator=(const BigReal& o);
  BigReal& operator=(BigReal&& o) noexcept;
  ~BigReal();

  mpfr_prec_t precision_bits() const { return mpfr_get_prec(v_); }

  BigReal operator+(const BigReal& o) const;
  BigReal operator-(const BigReal& o) const;
  BigReal operator*(const BigReal& o) const;
  BigReal operator/(const BigReal& o) const;
  BigReal operator-() const;
  BigReal& operator+=(const BigReal& o);
  BigReal& operator-=(const BigReal& o);
  BigReal& operator*=(const BigReal& o);
  BigReal& operator/=(const BigReal& o);

  int cmp(const BigReal& o) const { return mpfr_cmp(v_, o.v_); }
  bool operator<(const BigReal& o) const { return cmp(o) < 0; }
  bool operator>(const BigReal& o) const { return cmp(o) > 0; }
  bool operator<=(const BigReal& o) const { return cmp(o) <= 0; }
  bool operator>=(const BigReal& o) const { return cmp(o) >= 0; }
  bool operator==(const BigReal& o) const { return mpfr_equal_p(v_, o.v_); }
  bool operator!=(const BigReal& o) const { return !(*this == o); }

  int sign() const { return mpfr_sgn(v_); }
  bool is_nan() const { return mpfr_nan_p(v_) != 0; }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }

  BigReal abs() const;
  BigReal sqrt() const;   // error on negative
  BigReal log() const;    // error on non-positive
  BigReal exp() const;
  BigReal pow(const BigReal& e) const;

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  long long to_ll_rounded() const;      // nearest integer, error if too large
  mpz_class to_mpz_rounded() const;     // nearest integer

  // Decimal rendering with the given number of significant digits.
  std::string str(unsigned sig_digits) const;
  // Fixed-point style with exactly `sig` significant digits, trailing zeros
  // kept ("37.9640", "0.00426580").  Used for report columns.
  std::string str_sig_fixed(unsigned sig) const;
  // Exact hexadecimal serialization; round-trips bit-identically.
  std::string hex() const;
  static BigReal from_hex(const std::string& s);

  static BigReal pi(unsigned digits = 0);
  static BigReal nan(unsigned digits = 0);

  // Raw handle for hot loops; precision/rounding discipline is the caller's.
  mpfr_ptr raw() { return v_; }
  mpfr_srcptr raw() const { return v_; }

 private:
  struct RawPrec {};
  BigReal(mpfr_prec_t bits, RawPrec) { mpfr_init2(v_, bits); }
  mpfr_t v_;
};

struct AgmResult {
  BigReal value;
  unsigned iterations;
};

// Arithmetic-geometric mean of x, y > 0 by the (a,g) -> ((a+g)/2, sqrt(ag))
// iteration, run to the working precision.
AgmResult agm_iterated(const BigReal& x, const BigReal& y);
BigReal agm(const BigReal& x, const BigReal& y);

}  // namespace shabc

#endif
